//! Saddle-point expansions at the dilogarithm saddle `z₀`.
//!
//! Near `z₀` write `p(z) = p(z₀) + Σ_{k≥0} p_k ε^{k+2}` and
//! `q(z) = Σ_{k≥0} q_k ε^k` with `z = z₀ + ε`. The integral
//! `∫ e^{−Np} q dz` then expands as `2e^{−Np(z₀)} Σ_s Γ(s+½) a_{2s}/N^{s+½}`,
//! and the coefficients `b_t(σ)` and `c_{ℓ,t}` below are finite combinations of
//! the `a_{2s}` for the weights `q·u_{σ,j}` and `q·v*_{ℓ,j}`.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dilog::{cutoff, find_saddle, p_d, strip_q, strip_v, DilogZero, SaddlePoint};
use crate::error::{Error, Result};
use crate::residues::Family;
use crate::scalar::{ComplexExt, Real};
use crate::sequences::{bernoulli_over_factorial, binom_half, factorial, gamma_half, rational_to};
use crate::series::{exp_linear, Coeff, TruncatedSeries};
use crate::sine_products::{cot_derivatives, EmConfig};

type Series<R> = TruncatedSeries<Complex<R>>;

/// Partial ordinary Bell polynomials `B̂_{i,j}(p₁, p₂, …)` for `i ≤ imax`,
/// `j ≤ jmax`, indexed `[j][i]`. `p[k]` holds `p_{k+1}`; missing terms are zero.
///
/// Row `j` is the coefficient list of `(p₁x + p₂x² + …)^j`.
pub fn bell_table<C: Coeff>(imax: usize, jmax: usize, p: &[C]) -> Vec<Vec<C>> {
    assert!(!p.is_empty(), "bell_table needs at least one coefficient to fix the field");
    let zero = p[0].zero_like();
    let mut first = vec![zero.clone(); imax + 1];
    first[0] = p[0].one_like();
    let mut rows = vec![first];
    for j in 1..=jmax {
        let prev = &rows[j - 1];
        let mut row = vec![zero.clone(); imax + 1];
        for (i, slot) in row.iter_mut().enumerate().skip(j) {
            let mut acc = zero.clone();
            for k in 1..=(i + 1 - j).min(p.len()) {
                if !prev[i - k].is_zero_exact() {
                    acc = acc + p[k - 1].clone() * prev[i - k].clone();
                }
            }
            *slot = acc;
        }
        rows.push(row);
    }
    rows
}

/// `B̂_{i,j}(p₁, p₂, …)`; `p[k]` holds `p_{k+1}` and must be non-empty.
pub fn bell_partial<C: Coeff>(i: usize, j: usize, p: &[C]) -> C {
    if j > i {
        return p[0].zero_like();
    }
    bell_table(i, j, p)[j][i].clone()
}

/// Weight multiplying `q` in the saddle-point integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Q,
    QU { sigma: i64, j: usize },
    QVstar { l: usize, j: usize },
}

/// Local expansions of `p` and the weighted `q` at a saddle.
#[derive(Clone, Debug)]
pub struct LocalSeriesPair<R: Real> {
    /// `p(z₀+ε) − p(z₀)`, starting at `ε²`: coefficients `p₀, p₁, …`.
    pub p_series: Series<R>,
    /// Weighted `q(z₀+ε)`: coefficients `q₀, q₁, …`.
    pub q_series: Series<R>,
    pub center: SaddlePoint<R>,
    /// Direction of the path through the saddle.
    pub omega: Complex<R>,
}

impl<R: Real> LocalSeriesPair<R> {
    /// Number of known `p_k` and `q_k`.
    pub fn depth(&self) -> usize {
        self.p_series.coeffs().len().min(self.q_series.coeffs().len())
    }

    pub fn p(&self, k: usize) -> Complex<R> {
        self.p_series.coeffs()[k].clone()
    }

    pub fn q(&self, k: usize) -> Complex<R> {
        self.q_series.coeffs()[k].clone()
    }

    /// The same pair with `q` multiplied by `w(z₀+ε)`.
    pub fn with_weight(&self, w: &Series<R>) -> Self {
        let mut out = self.clone();
        out.q_series = self.q_series.mul(w).truncate(self.q_series.trunc());
        out
    }
}

fn affine<R: Real>(a: Complex<R>, b: Complex<R>, trunc: usize) -> Series<R> {
    if trunc >= 2 {
        TruncatedSeries::linear(a, b, trunc as i64)
    } else {
        TruncatedSeries::constant(a, 1)
    }
}

fn two_pi_i<R: Real>(like: &Complex<R>) -> Complex<R> {
    let two_pi = like.re.pi() * like.re.int(2);
    Complex::new(like.re.zero_like(), two_pi)
}

/// Series of `p` and `q`, times the chosen weight, about `saddle.z` to `depth` terms.
///
/// `p·z` has derivative `log(1 − e^{2πiz})`, so `p` comes from integrating a
/// logarithm of an exponential series. `q` is the square root of
/// `iz/(1 − e^{2πiz})` normalised to agree with [`strip_q`] at the centre.
pub fn local_series<R: Real>(
    saddle: &SaddlePoint<R>,
    weight: Weight,
    depth: usize,
) -> Result<LocalSeriesPair<R>> {
    let z0 = saddle.z.clone();
    let prec = z0.prec();
    if depth == 0 {
        return Err(Error::Domain("depth must be positive".into()));
    }
    if 2 * depth as u32 + 16 > prec {
        return Err(Error::Precision(format!("depth {depth} needs more than {prec} bits")));
    }
    let one = z0.one_like();
    let t = depth as i64 + 2;
    let tpi = two_pi_i(&z0);
    let x0 = (tpi.clone() * z0.clone()).exp();
    let one_minus =
        |trunc: i64| TruncatedSeries::constant(one.clone(), trunc).sub(&exp_linear(&tpi, trunc).scale(&x0));
    let pz = one_minus(t).log()?.integral()?.truncate(t).add_scalar(&(saddle.p_value.clone() * z0.clone()));
    let full = pz.mul(&affine(z0.clone(), one.clone(), t as usize).recip()?).truncate(t);
    let c1 = full.coeff(1).unwrap();
    let c2 = full.coeff(2).unwrap();
    let slack = z0.re.one_like().ldexp(-(prec as i32) / 2);
    if ComplexExt::abs(&c1) > slack * (z0.re.one_like() + ComplexExt::abs(&c2)) {
        return Err(Error::Precision(format!(
            "p' at the centre is {:e}, not a saddle at this precision",
            ComplexExt::abs(&c1).to_f64()
        )));
    }
    let p_series = TruncatedSeries::new(2, full.coeffs()[2..].to_vec());

    let d = depth as i64;
    let i = z0.i_like();
    let s = affine(i.clone() * z0.clone(), i, depth).mul(&one_minus(d).recip()?).truncate(d);
    let mut half_log = s.log()?.scale(&Complex::from_re(z0.re.ratio(1, 2))).with_lead(0);
    let mut coeffs = half_log.clone().into_coeffs();
    coeffs[0] = z0.zero_like();
    half_log = TruncatedSeries::new(0, coeffs);
    let q0 = strip_q(&z0);
    let mut q_series = half_log.exp()?.scale(&q0);
    match weight {
        Weight::Q => {}
        Weight::QU { sigma, j } => {
            let u = u_series(sigma, j, &z0, depth)?;
            q_series = q_series.mul(&u[j]).truncate(d);
        }
        Weight::QVstar { l, j } => {
            let v = vstar_series(l, j, &z0, depth)?;
            q_series = q_series.mul(&v[j]).truncate(d);
        }
    }
    Ok(LocalSeriesPair { p_series, q_series, center: saddle.clone(), omega: z0 })
}

/// `g_ℓ(z+ε)` for `ℓ = 1..=count` as series to `trunc` terms.
fn g_series<R: Real>(count: usize, z: &Complex<R>, trunc: usize) -> Result<Vec<Series<R>>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let pi = z.re.pi();
    let piz = ComplexExt::scale(z, &pi);
    let cots = cot_derivatives(2 * count - 2 + trunc - 1, &piz)?;
    let base = affine(piz, Complex::from_re(pi.clone()), trunc);
    let base2 = base.mul(&base).truncate(trunc as i64);
    let mut pw = base;
    let mut out = Vec::with_capacity(count);
    for l in 1..=count {
        // cot^{(2ℓ−2)}(πz + πε) = Σ_i cot^{(2ℓ−2+i)}(πz) (πε)^i / i!
        let mut shifted = Vec::with_capacity(trunc);
        let mut f = z.re.one_like();
        for i in 0..trunc {
            shifted.push(ComplexExt::scale(&cots[2 * l - 2 + i], &f));
            f = f * pi.clone() / z.re.int(i as i64 + 1);
        }
        let ratio = rational_to::<R>(&bernoulli_over_factorial(2 * l), z.prec());
        let g = pw.mul(&TruncatedSeries::new(0, shifted)).truncate(trunc as i64);
        out.push(g.scale(&Complex::from_re(-ratio)));
        pw = pw.mul(&base2).truncate(trunc as i64);
    }
    Ok(out)
}

/// `u_{σ,j}(z+ε)` for `j = 0..=jmax`, where
/// `Σ_j u_{σ,j} x^j = exp((2πiσz + g₁(z))x + g₂(z)x³ + g₃(z)x⁵ + …)`.
pub fn u_series<R: Real>(sigma: i64, jmax: usize, z: &Complex<R>, trunc: usize) -> Result<Vec<Series<R>>> {
    let one = z.one_like();
    let tr = trunc as i64;
    let g = g_series((jmax + 1) / 2, z, trunc)?;
    let zero_series = TruncatedSeries::constant(z.zero_like(), tr);
    // exponent coefficients A_k of x^k
    let mut a = vec![zero_series.clone(); jmax + 1];
    for (l, gl) in g.into_iter().enumerate() {
        let k = 2 * l + 1;
        a[k] = gl;
    }
    if jmax >= 1 {
        let c = ComplexExt::scale(&two_pi_i(z), &z.re.int(sigma));
        a[1] = a[1].add(&affine(c.clone() * z.clone(), c, trunc));
    }
    let mut u = vec![TruncatedSeries::constant(one, tr)];
    for j in 1..=jmax {
        let mut acc = zero_series.clone();
        for k in (1..=j).step_by(2) {
            let term = a[k].mul(&u[j - k]).truncate(tr);
            acc = acc.add(&term.scale(&Complex::from_re(z.re.int(k as i64))));
        }
        u.push(acc.scale(&Complex::from_re(z.re.one_like() / z.re.int(j as i64))));
    }
    Ok(u)
}

/// `v*_{ℓ,j}(z+ε) = Σ_{t≤j} B̂_{ℓ−1+t,ℓ−1}(1/1!, 1/2!, …) (2πiz)^{ℓ−1+t} u_{1,j−t}(z)`
/// for `j = 0..=jmax`.
pub fn vstar_series<R: Real>(l: usize, jmax: usize, z: &Complex<R>, trunc: usize) -> Result<Vec<Series<R>>> {
    if l == 0 {
        return Err(Error::Domain("v* needs l >= 1".into()));
    }
    let tr = trunc as i64;
    let u = u_series(1, jmax, z, trunc)?;
    let inv_fact: Vec<BigRational> =
        (1..=l + jmax).map(|k| BigRational::new(One::one(), factorial(k))).collect();
    let bell = bell_table(l - 1 + jmax, l - 1, &inv_fact);
    let tpi = two_pi_i(z);
    let base = affine(tpi.clone() * z.clone(), tpi, trunc);
    let mut pows = vec![base.powi(l as i64 - 1)?.truncate(tr)];
    for t in 1..=jmax {
        pows.push(pows[t - 1].mul(&base).truncate(tr));
    }
    let prec = z.prec();
    let mut out = Vec::with_capacity(jmax + 1);
    for j in 0..=jmax {
        let mut acc = TruncatedSeries::constant(z.zero_like(), tr);
        for t in 0..=j {
            let b = &bell[l - 1][l - 1 + t];
            if b.is_zero() {
                continue;
            }
            let c = Complex::from_re(rational_to::<R>(b, prec));
            acc = acc.add(&pows[t].mul(&u[j - t]).truncate(tr).scale(&c));
        }
        out.push(acc);
    }
    Ok(out)
}

/// `u_{σ,j}(z)`.
pub fn u_weight<R: Real>(sigma: i64, j: usize, z: &Complex<R>) -> Result<Complex<R>> {
    Ok(u_series(sigma, j, z, 1)?[j].coeff(0).unwrap())
}

/// `v*_{ℓ,j}(z)`.
pub fn vstar_weight<R: Real>(l: usize, j: usize, z: &Complex<R>) -> Result<Complex<R>> {
    Ok(vstar_series(l, j, z, 1)?[j].coeff(0).unwrap())
}

/// `a_{2s} = ω/(2(ω²p₀)^{1/2}) Σ_{i≤2s} q_{2s−i} Σ_{j≤i} p₀^{−s−j} C(−s−½, j) B̂_{i,j}(p₁, p₂, …)`,
/// with the root of positive real part.
pub fn wojdylo_a2s<R: Real>(pair: &LocalSeriesPair<R>, s: usize) -> Result<Complex<R>> {
    if pair.depth() < 2 * s + 1 {
        return Err(Error::Domain(format!("a_{} needs depth {}, have {}", 2 * s, 2 * s + 1, pair.depth())));
    }
    let p0 = pair.p(0);
    let prec = p0.prec();
    let root = (pair.omega.clone() * pair.omega.clone() * p0.clone()).sqrt();
    if !(root.re > root.re.zero_like()) {
        return Err(Error::Domain("(omega^2 p0)^(1/2) has no root with positive real part".into()));
    }
    let inv_p0 = p0.recip();
    let ratios: Vec<Complex<R>> = (1..=(2 * s).max(1)).map(|k| pair.p(k) * inv_p0.clone()).collect();
    let bell = bell_table(2 * s, 2 * s, &ratios);
    let mut sum = p0.zero_like();
    for i in 0..=2 * s {
        let mut inner = p0.zero_like();
        for (j, row) in bell.iter().enumerate().take(i + 1) {
            let c = binom_half::<R>(s as u64, j as u64, prec);
            inner = inner + ComplexExt::scale(&row[i], &c);
        }
        sum = sum + pair.q(2 * s - i) * inner;
    }
    let pref = pair.omega.clone() / ComplexExt::scale(&root, &p0.re.int(2));
    Ok(pref * ComplexExt::powi(&inv_p0, s as i64) * sum)
}

/// What an [`Expansion`] approximates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionKind {
    /// `A₁(N, σ)`, the sum of the residues with `N/2 < k ≤ N`, `h ∈ {1, k−1}`.
    A1 {
        sigma: i64,
    },
    /// `C_{01ℓ}(N)`.
    C01 {
        l: usize,
    },
    FamilyC,
    FamilyD,
    FamilyE,
}

impl ExpansionKind {
    pub fn label(&self) -> String {
        match self {
            ExpansionKind::A1 { sigma } => format!("A1-b(sigma={sigma})"),
            ExpansionKind::C01 { l } => format!("C01-c(l={l})"),
            ExpansionKind::FamilyC => "familyC".into(),
            ExpansionKind::FamilyD => "familyD".into(),
            ExpansionKind::FamilyE => "familyE".into(),
        }
    }
}

/// `Re[w^{−N}/N^power · Σ_t coeffs_t/N^t]`, with `w^{−N/2}` for family D.
#[derive(Clone, Debug)]
pub struct Expansion<R: Real> {
    pub kind: ExpansionKind,
    pub base: DilogZero<R>,
    pub power: i64,
    pub coeffs: Vec<Complex<R>>,
    /// `N mod 2` for the parity-dependent family D coefficient.
    pub parity: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexRecord {
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseRecord {
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "B")]
    pub b: i64,
    pub w: ComplexRecord,
}

/// Serialisable form of an [`Expansion`].
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionRecord {
    pub kind: String,
    pub base: BaseRecord,
    pub power: i64,
    pub coeffs: Vec<ComplexRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<i64>,
}

fn complex_record<R: Real>(c: &Complex<R>, digits: usize) -> ComplexRecord {
    ComplexRecord { re: c.re.to_sci(digits), im: c.im.to_sci(digits) }
}

impl<R: Real> Expansion<R> {
    pub fn record(&self, digits: usize) -> ExpansionRecord {
        ExpansionRecord {
            kind: self.kind.label(),
            base: BaseRecord {
                a: self.base.label.a,
                b: self.base.label.b,
                w: complex_record(&self.base.w, digits),
            },
            power: self.power,
            coeffs: self.coeffs.iter().map(|c| complex_record(c, digits)).collect(),
            parity: self.parity,
        }
    }
}

fn principal_saddle<R: Real>(prec: u32) -> Result<SaddlePoint<R>> {
    find_saddle::<R>(1, 0, prec)
}

/// `m ≥ 1` terms need `a_{2s}` for `s < m`; this depth leaves headroom.
fn expansion_depth(m: usize) -> usize {
    2 * m + 4
}

/// `b_t(σ) = −4i Σ_{s≤t} Γ(s+½) a_{2s}(q·u_{σ,t−s})` for `t < m`.
pub fn b_coeffs<R: Real>(sigma: i64, m: usize, prec: u32) -> Result<Expansion<R>> {
    if m == 0 {
        return Err(Error::Domain("need m >= 1".into()));
    }
    let saddle = principal_saddle::<R>(prec)?;
    let depth = expansion_depth(m);
    let pair = local_series(&saddle, Weight::Q, depth)?;
    let u = u_series(sigma, m - 1, &saddle.z, depth)?;
    let coeffs = weighted_sums(&pair, &u, prec)?
        .into_iter()
        .map(|c| -c.mul_i().scale(R::from_i64_prec(4, prec)))
        .collect();
    Ok(Expansion { kind: ExpansionKind::A1 { sigma }, base: saddle.zero, power: 2, coeffs, parity: None })
}

/// `c_{ℓ,t} = 4i Σ_{s≤t} Γ(s+½) a_{2s}(q·v*_{ℓ,t−s})` for `t < m`.
pub fn c_coeffs<R: Real>(l: usize, m: usize, prec: u32) -> Result<Expansion<R>> {
    if m == 0 || l == 0 {
        return Err(Error::Domain("need l >= 1 and m >= 1".into()));
    }
    let saddle = principal_saddle::<R>(prec)?;
    let depth = expansion_depth(m);
    let pair = local_series(&saddle, Weight::Q, depth)?;
    let v = vstar_series(l, m - 1, &saddle.z, depth)?;
    let coeffs = weighted_sums(&pair, &v, prec)?
        .into_iter()
        .map(|c| c.mul_i().scale(R::from_i64_prec(4, prec)))
        .collect();
    Ok(Expansion {
        kind: ExpansionKind::C01 { l },
        base: saddle.zero,
        power: l as i64 + 1,
        coeffs,
        parity: None,
    })
}

/// `Σ_{s≤t} Γ(s+½) a_{2s}(q·w_{t−s})` for each `t < w.len()`.
fn weighted_sums<R: Real>(pair: &LocalSeriesPair<R>, w: &[Series<R>], prec: u32) -> Result<Vec<Complex<R>>> {
    let weighted: Vec<LocalSeriesPair<R>> = w.iter().map(|wj| pair.with_weight(wj)).collect();
    let mut out = Vec::with_capacity(w.len());
    for t in 0..w.len() {
        let mut acc = pair.omega.zero_like();
        for s in 0..=t {
            let a = wojdylo_a2s(&weighted[t - s], s)?;
            acc = acc + ComplexExt::scale(&a, &gamma_half::<R>(s as u64, prec));
        }
        out.push(acc);
    }
    Ok(out)
}

/// Leading term of the family C, D or E residue sums, all with `N^{−2}` decay:
/// `c₀* = −z₃e^{−πiz₃}/4` at base `w(1,−3)`,
/// `d₀ = z₀(2e^{−πiz₀}(e^{−πiz₀} + (−1)^N))^{1/2}` at base `w₀` to the power `N/2`,
/// `e₀ = −3z₁e^{−πiz₁}/2` at base `w(0,−2)`.
pub fn family_leading<R: Real>(family: Family, n: i64, prec: u32) -> Result<Expansion<R>> {
    let (saddle, kind) = match family {
        Family::A => return Err(Error::Domain("family A is expanded by b_coeffs".into())),
        Family::C => (find_saddle::<R>(3, 1, prec)?, ExpansionKind::FamilyC),
        Family::D => (principal_saddle::<R>(prec)?, ExpansionKind::FamilyD),
        Family::E => (find_saddle::<R>(2, 0, prec)?, ExpansionKind::FamilyE),
    };
    let z = saddle.z.clone();
    let pi = z.re.pi();
    let e = (-z.mul_i().scale(pi)).exp();
    let (coef, parity) = match family {
        Family::C => (-(z.clone() * e).scale(z.re.ratio(1, 4)), None),
        Family::E => (-(z.clone() * e).scale(z.re.ratio(3, 2)), None),
        _ => {
            let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
            let inner = (e.clone() * (e + Complex::from_re(z.re.int(sign)))).scale(z.re.int(2));
            (z.clone() * inner.sqrt(), Some(n.rem_euclid(2)))
        }
    };
    Ok(Expansion { kind, base: saddle.zero, power: 2, coeffs: vec![coef], parity })
}

/// `Re[w^{−N}/N^power · Σ_{t<m} coeffs_t/N^t]` (`w^{−N/2}` for family D).
pub fn evaluate_expansion<R: Real>(e: &Expansion<R>, n: i64, m: usize) -> Result<R> {
    if m == 0 || m > e.coeffs.len() {
        return Err(Error::Domain(format!("m = {m} but {} coefficients are available", e.coeffs.len())));
    }
    if n < 1 {
        return Err(Error::Domain(format!("N = {n} must be positive")));
    }
    if let Some(par) = e.parity {
        if n.rem_euclid(2) != par {
            return Err(Error::Domain(format!("expansion is for N = {par} mod 2, got N = {n}")));
        }
    }
    let w = &e.base.w;
    let nn = w.re.int(n);
    let exponent = if e.kind == ExpansionKind::FamilyD { -nn.clone() / w.re.int(2) } else { -nn.clone() };
    let scale = ComplexExt::scale(&w.ln(), &exponent).exp();
    let inv_n = Complex::from_re(w.re.one_like() / nn.clone());
    let mut sum = w.zero_like();
    for c in e.coeffs[..m].iter().rev() {
        sum = sum * inv_n.clone() + c.clone();
    }
    Ok((scale * sum).re / nn.powi(e.power as i32))
}

/// Vertices of the contour: `1.01 → 1.01c → z₀ → 1.49c → 1.49`, `c = 1 + i·Im z₀/Re z₀`.
fn path_vertices<R: Real>(z0: &Complex<R>) -> Vec<Complex<R>> {
    let v = z0.im.clone() / z0.re.clone();
    let c = Complex::new(z0.re.one_like(), v);
    let a = z0.re.ratio(101, 100);
    let b = z0.re.ratio(149, 100);
    vec![
        Complex::from_re(a.clone()),
        ComplexExt::scale(&c, &a),
        z0.clone(),
        ComplexExt::scale(&c, &b),
        Complex::from_re(b),
    ]
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre<R: Real>(n: usize, prec: u32) -> Vec<(R, R)> {
    let one = R::from_i64_prec(1, prec);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = one.lit(guess);
        for _ in 0..100 {
            let (p, d) = legendre(n, &x);
            let dx = p / d;
            x = x - dx.clone();
            if dx.abs() <= x.tol() {
                break;
            }
        }
        let (_, d) = legendre(n, &x);
        let w = one.int(2) / ((one.clone() - x.sq()) * d.sq());
        out.push((x, w));
    }
    out
}

/// `(P_n(x), P_n'(x))`.
fn legendre<R: Real>(n: usize, x: &R) -> (R, R) {
    let one = x.one_like();
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    for k in 2..=n {
        let kk = x.int(k as i64);
        let p2 = (x.int(2 * k as i64 - 1) * x.clone() * p1.clone() - x.int(k as i64 - 1) * p0) / kk;
        p0 = p1;
        p1 = p2;
    }
    let d = x.int(n as i64) * (x.clone() * p1.clone() - p0) / (x.sq() - one);
    (p1, d)
}

/// Quadrature of `𝒜₃(N,σ) = (2/N^{3/2}) Im ∫ e^{−Np(z)} q(z) e^{v(z;N,σ)} dz` along the
/// polygon through `z₀`.
///
/// Each edge gets 40-node Gauss–Legendre panels; the panel count doubles until
/// the integral changes by less than `10^{−8}` relatively. The edges meet at
/// `z₀`, so panels are concentrated where the integrand peaks.
pub fn a3_quadrature<R: Real>(n: i64, sigma: i64, prec: u32) -> Result<R> {
    if n < 131 {
        return Err(Error::Domain(format!("N = {n} below 131")));
    }
    let saddle = principal_saddle::<R>(prec)?;
    let z0 = saddle.z.clone();
    let alpha = EmConfig::standard(n).alpha::<R>(prec);
    let l_cut = cutoff(&alpha, n);
    let nn = z0.re.int(n);
    let integrand = |z: &Complex<R>| -> Result<Complex<R>> {
        let p = p_d(z, 0)?;
        let v = strip_v(z, n, sigma, l_cut)?;
        Ok((v - ComplexExt::scale(&p, &nn)).exp() * strip_q(z))
    };
    let nodes = gauss_legendre::<R>(40, prec);
    let verts = path_vertices(&z0);
    let tol = z0.re.lit(1e-8);
    let mut prev: Option<Complex<R>> = None;
    for level in 0..10 {
        let panels = 1usize << level;
        let mut total = z0.zero_like();
        for e in verts.windows(2) {
            let (a, b) = (&e[0], &e[1]);
            let h = (b.clone() - a.clone()) / Complex::from_re(z0.re.int(panels as i64));
            for k in 0..panels {
                let lo = a.clone() + ComplexExt::scale(&h, &z0.re.int(k as i64));
                let mid = lo + ComplexExt::scale(&h, &z0.re.ratio(1, 2));
                let half = ComplexExt::scale(&h, &z0.re.ratio(1, 2));
                for (x, w) in &nodes {
                    let z = mid.clone() + ComplexExt::scale(&half, x);
                    total = total + ComplexExt::scale(&(integrand(&z)? * half.clone()), w);
                }
            }
        }
        if let Some(p) = &prev {
            if ComplexExt::abs(&(total.clone() - p.clone())) <= tol.clone() * ComplexExt::abs(&total) {
                return Ok(total.im * z0.re.int(2) / (nn.clone() * nn.sqrt()));
            }
        }
        prev = Some(total);
    }
    Err(Error::Convergence(format!("quadrature for N = {n} did not settle")))
}

/// Sampled sign conditions on the contour of [`a3_quadrature`].
#[derive(Clone, Debug)]
pub struct PathCheck<R: Real> {
    /// Smallest `Re(p(z) − p(z₀))` over the samples.
    pub min_excess: R,
    /// Largest `Re[−p(z)]` over the samples on the two vertical edges.
    pub max_outer: R,
    pub samples: usize,
}

/// Samples `count` points spread evenly by arclength along the contour.
pub fn path_check<R: Real>(count: usize, prec: u32) -> Result<PathCheck<R>> {
    let saddle = principal_saddle::<R>(prec)?;
    let z0 = saddle.z.clone();
    let p0 = saddle.p_value.clone();
    let verts = path_vertices(&z0);
    let lens: Vec<R> = verts.windows(2).map(|e| ComplexExt::abs(&(e[1].clone() - e[0].clone()))).collect();
    let total = lens.iter().fold(z0.re.zero_like(), |a, b| a + b.clone());
    let mut min_excess: Option<R> = None;
    let mut max_outer: Option<R> = None;
    for i in 0..count {
        let mut s = total.clone() * z0.re.int(2 * i as i64 + 1) / z0.re.int(2 * count as i64);
        let mut edge = 0;
        while edge + 1 < lens.len() && s > lens[edge] {
            s = s - lens[edge].clone();
            edge += 1;
        }
        let dir = (verts[edge + 1].clone() - verts[edge].clone()) / Complex::from_re(lens[edge].clone());
        let z = verts[edge].clone() + ComplexExt::scale(&dir, &s);
        let p = p_d(&z, 0)?;
        let excess = (p.clone() - p0.clone()).re;
        min_excess = Some(match min_excess {
            Some(m) => m.min_of(excess),
            None => excess,
        });
        if edge == 0 || edge == 3 {
            let neg = -p.re;
            max_outer = Some(match max_outer {
                Some(m) => m.max_of(neg),
                None => neg,
            });
        }
    }
    let zero = z0.re.zero_like();
    Ok(PathCheck {
        min_excess: min_excess.unwrap_or(zero.clone()),
        max_outer: max_outer.unwrap_or(zero),
        samples: count,
    })
}
