//! Sine products `∏(θ)_m = ∏_{j≤m} 2 sin(πjθ)`, their Euler–Maclaurin
//! approximation, derivatives of the cotangent, and the statistics Ψ, D and S
//! that describe how large reciprocal sine products become.
//!
//! Products are accumulated as `log|·|` plus a sign: at `m ≈ k/6` the
//! reciprocal product for `h = 1` reaches `e^{0.149 k}`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::dilog::clausen;
use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Mp, Real};
use crate::sequences::{bernoulli_over_factorial, cached_reals, factorial, rational_to, stirling2};

/// The argument θ of a sine product.
#[derive(Clone, Debug)]
pub enum Theta<R: Real> {
    Rational { h: i64, k: i64 },
    Real(R),
}

/// `∏(θ)_m` stored as `sign · exp(log_abs)`.
#[derive(Clone, Debug)]
pub struct SineProductValue<R: Real> {
    pub log_abs: R,
    pub sign: i8,
    pub m: u64,
    pub theta: Theta<R>,
}

impl<R: Real> SineProductValue<R> {
    pub fn value(&self) -> R {
        let v = self.log_abs.exp();
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    /// The reciprocal product `∏⁻¹(θ)_m`.
    pub fn recip_value(&self) -> R {
        let v = (-self.log_abs.clone()).exp();
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

fn check_coprime(h: i64, k: i64) -> Result<()> {
    if k < 1 || h.gcd(&k) != 1 {
        return Err(Error::Domain(format!("{h}/{k} is not a reduced fraction")));
    }
    Ok(())
}

/// `log|2 sin(π a/k)|` and its sign for `0 < a < 2k`, `a ≠ k`.
fn log_factor<R: Real>(a: i64, k: i64, prec: u32) -> (R, i8) {
    let one = R::from_i64_prec(1, prec);
    let (a, sign) = if a > k { (a - k, -1) } else { (a, 1) };
    // sin(πa/k) = sin(π(k−a)/k); use the smaller argument
    let a = a.min(k - a);
    let s = (one.pi() * one.int(a) / one.int(k)).sin() * one.int(2);
    (s.ln(), sign)
}

/// Prefix products `∏(h/k)_m` for `m = 0, …, k − 1`.
pub fn sine_product_prefixes<R: Real>(h: i64, k: i64, prec: u32) -> Result<Vec<(R, i8)>> {
    check_coprime(h, k)?;
    let mut out = Vec::with_capacity(k as usize);
    let mut acc = R::from_i64_prec(0, prec);
    let mut sign = 1i8;
    out.push((acc.clone(), sign));
    let two_k = 2 * k;
    for j in 1..k {
        let a = (j * h).rem_euclid(two_k);
        let (l, s) = log_factor::<R>(a, k, prec);
        acc = acc + l;
        sign *= s;
        out.push((acc.clone(), sign));
    }
    Ok(out)
}

/// `∏(h/k)_m = ∏_{j=1}^m 2 sin(πjh/k)` for reduced `h/k` and `0 ≤ m < k`.
pub fn sine_product<R: Real>(h: i64, k: i64, m: u64, prec: u32) -> Result<SineProductValue<R>> {
    check_coprime(h, k)?;
    if m >= k as u64 {
        return Err(Error::Domain(format!(
            "m = {m} >= k = {k}: the product contains the zero factor sin(pi k h/k)"
        )));
    }
    let two_k = 2 * k;
    let mut acc = R::from_i64_prec(0, prec);
    let mut sign = 1i8;
    for j in 1..=m as i64 {
        let (l, s) = log_factor::<R>((j * h).rem_euclid(two_k), k, prec);
        acc = acc + l;
        sign *= s;
    }
    Ok(SineProductValue { log_abs: acc, sign, m, theta: Theta::Rational { h, k } })
}

/// `∏(θ)_m` for real θ; a vanishing factor is a domain error.
pub fn sine_product_real<R: Real>(theta: &R, m: u64) -> Result<SineProductValue<R>> {
    let pi = theta.pi();
    let mut acc = theta.zero_like();
    let mut sign = 1i8;
    for j in 1..=m as i64 {
        let s = (pi.clone() * theta.int(j) * theta.clone()).sin() * theta.int(2);
        if s.is_zero() {
            return Err(Error::Domain(format!("factor {j} of the sine product vanishes")));
        }
        if s < s.zero_like() {
            sign = -sign;
        }
        acc = acc + s.abs().ln();
    }
    Ok(SineProductValue { log_abs: acc, sign, m, theta: Theta::Real(theta.clone()) })
}

/// `Ψ(h/k) = max_{0≤m<k} log|∏⁻¹(h/k)_m| / k` with the smallest maximising m.
///
/// The reciprocal is what bounds the simple-pole residues, so Ψ ≥ 0 with
/// equality when no prefix product drops below 1.
pub fn psi_with_argmax<R: Real>(h: i64, k: i64, prec: u32) -> Result<(R, usize)> {
    let prefixes = sine_product_prefixes::<R>(h, k, prec)?;
    let mut best = R::from_i64_prec(0, prec);
    let mut arg = 0;
    for (m, (l, _)) in prefixes.iter().enumerate() {
        let a = -l.clone();
        if a > best {
            best = a;
            arg = m;
        }
    }
    Ok((best / R::from_i64_prec(k, prec), arg))
}

pub fn psi<R: Real>(h: i64, k: i64, prec: u32) -> Result<R> {
    Ok(psi_with_argmax(h, k, prec)?.0)
}

/// A pair of `Z(h,k)` with `|βγ|` minimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalPair {
    pub beta0: i64,
    pub gamma0: i64,
    /// `D(h,k) = |β₀γ₀|`.
    pub d: i64,
}

/// Elements of `Z(h,k) = {(β,γ) : 1 ≤ |β| < k, 1 ≤ γ < k, βh ≡ γ mod k}`.
pub fn z_pairs(h: i64, k: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(2 * k as usize);
    for b in 1..k {
        for beta in [b, -b] {
            let gamma = (beta * h).rem_euclid(k);
            if gamma >= 1 {
                out.push((beta, gamma));
            }
        }
    }
    out
}

/// Brute-force minimiser of `|βγ|`; ties go to the smaller |β|, then β > 0.
pub fn minimal_pair(h: i64, k: i64) -> Result<MinimalPair> {
    check_coprime(h, k)?;
    if !(1 <= h && h < k) {
        return Err(Error::Domain(format!("need 1 <= h < k, got {h}/{k}")));
    }
    let mut best: Option<MinimalPair> = None;
    for (beta, gamma) in z_pairs(h, k) {
        let d = beta.abs() * gamma;
        if best.is_none_or(|b| d < b.d) {
            best = Some(MinimalPair { beta0: beta, gamma0: gamma, d });
        }
    }
    best.ok_or_else(|| Error::Domain(format!("Z({h},{k}) is empty")))
}

/// `S(m;h,k) = Σ_{(β,γ)∈Z(h,k)} sin(2πmγ/k)/|βγ|`.
pub fn s_wave_sum<R: Real>(m: i64, h: i64, k: i64, prec: u32) -> Result<R> {
    check_coprime(h, k)?;
    let one = R::from_i64_prec(1, prec);
    let two_pi = one.pi() * one.int(2);
    let mut acc = one.zero_like();
    for (beta, gamma) in z_pairs(h, k) {
        let a = (m * gamma).rem_euclid(k);
        let s = (two_pi.clone() * one.int(a) / one.int(k)).sin();
        acc = acc + s / one.int(beta.abs() * gamma);
    }
    Ok(acc)
}

/// `(r−1)!·S(k+1, r)` for `k ≥ 1`, rows flattened; row k starts at `(k−1)(k+2)/2`.
fn stirling_weights<R: Real>(prec: u32, kmax: usize) -> std::sync::Arc<Vec<R>> {
    let need = kmax * (kmax + 3) / 2;
    cached_reals::<R>("cot-stirling", prec, need, |p, len| {
        let mut out = Vec::with_capacity(len);
        let mut k = 1;
        while out.len() < len {
            for r in 1..=k + 1 {
                let w = factorial(r - 1) * stirling2(k + 1, r);
                out.push(R::from_bigint_prec(&w, p));
            }
            k += 1;
        }
        out
    })
}

fn stirling_row_offset(k: usize) -> usize {
    (k - 1) * (k + 2) / 2
}

fn is_pole<R: Real>(z: &Complex<R>) -> bool {
    let s = z.sin();
    z.im.is_zero() && ComplexExt::abs(&s) <= z.re.tol()
}

/// `cot^{(j)}(z)` for `j = 0, …, kmax`, from the Stirling-number expansion in
/// powers of `1/(e^{±2iz} − 1)` (sign chosen by the half plane of `z`).
pub fn cot_derivatives<R: Real>(kmax: usize, z: &Complex<R>) -> Result<Vec<Complex<R>>> {
    if is_pole(z) {
        return Err(Error::Pole(format!("cot has a pole at z = {}", z.re.to_f64())));
    }
    let prec = z.prec();
    // the alternating Stirling sums lose about two bits per order near the real axis
    let wp = prec + 3 * (kmax as u32 + 1) + 16;
    let zw = z.round_prec(wp);
    let upper = zw.im >= zw.im.zero_like();
    let two_iz = zw.mul_i().scale(zw.re.int(2));
    let e = if upper { two_iz.exp() } else { (-two_iz).exp() };
    let one = Complex::from_re(zw.re.one_like());
    let u = (e - one.clone()).recip();
    let mut upow = Vec::with_capacity(kmax + 2);
    upow.push(one.clone());
    for r in 1..=kmax + 1 {
        let next = upow[r - 1].clone() * u.clone();
        upow.push(next);
    }
    // base = ±2i; cot z = ±i(1 + 2u)
    let base = if upper { zw.i_like().scale(zw.re.int(2)) } else { zw.i_like().scale(zw.re.int(-2)) };
    let iu = if upper { zw.i_like() } else { -zw.i_like() };
    let mut out = Vec::with_capacity(kmax + 1);
    out.push((iu * (one + u.scale(zw.re.int(2)))).round_prec(prec));
    if kmax == 0 {
        return Ok(out);
    }
    let weights = stirling_weights::<R>(wp, kmax);
    let mut bpow = base.clone();
    for k in 1..=kmax {
        bpow = bpow * base.clone();
        let row = &weights[stirling_row_offset(k)..stirling_row_offset(k) + k + 1];
        let mut acc = czero(&zw.re);
        for (i, w) in row.iter().enumerate() {
            acc = acc + upow[i + 1].scale(w.clone());
        }
        let mut v = bpow.clone() * acc;
        if k % 2 == 1 {
            v = -v;
        }
        out.push(v.round_prec(prec));
    }
    Ok(out)
}

fn czero<R: Real>(like: &R) -> Complex<R> {
    Complex::new(like.zero_like(), like.zero_like())
}

/// `cot^{(k)}(z)` for `k ≥ 0`.
pub fn cot_derivative<R: Real>(k: usize, z: &Complex<R>) -> Result<Complex<R>> {
    Ok(cot_derivatives(k, z)?.pop().expect("at least one order"))
}

/// Integer coefficients of `P_n` with `cot^{(n)}(x) = P_n(cot x)`;
/// `P_0 = c`, `P_{n+1} = −(1 + c²) P_n′`.
pub fn cot_polynomial(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(), BigInt::one()];
    for _ in 0..n {
        let deriv: Vec<BigInt> = (1..p.len()).map(|i| &p[i] * BigInt::from(i)).collect();
        let mut next = vec![BigInt::zero(); deriv.len() + 2];
        for (i, d) in deriv.iter().enumerate() {
            next[i] -= d;
            next[i + 2] -= d;
        }
        while next.len() > 1 && next.last().is_some_and(|c| c.is_zero()) {
            next.pop();
        }
        p = next;
    }
    p
}

/// Coefficients of `P_n` in R, rows flattened; row n starts at `n(n+3)/2`.
fn cot_polynomials<R: Real>(prec: u32, nmax: usize) -> std::sync::Arc<Vec<R>> {
    let need = (nmax + 1) * (nmax + 4) / 2;
    cached_reals::<R>("cot-poly", prec, need, |p, len| {
        let mut out = Vec::with_capacity(len);
        let mut n = 0;
        while out.len() < len {
            let mut row = cot_polynomial(n);
            row.resize(n + 2, BigInt::zero());
            out.extend(row.iter().map(|c| R::from_bigint_prec(c, p)));
            n += 1;
        }
        out
    })
}

/// `cot^{(n)}(x)` for real x via `P_n(cot x)`. The coefficients of `P_n` share
/// one sign and `P_n` has parity `(−1)^{n+1}`, so evaluating at `|cot x|` never
/// cancels.
pub fn cot_derivative_real<R: Real>(n: usize, x: &R) -> Result<R> {
    let s = x.sin();
    if s.abs() <= x.tol() {
        return Err(Error::Pole(format!("cot has a pole at x = {}", x.to_f64())));
    }
    let c = x.cos() / s;
    let neg = c < c.zero_like();
    let a = c.abs();
    let polys = cot_polynomials::<R>(x.prec(), n);
    let start = n * (n + 3) / 2;
    let row = &polys[start..start + n + 2];
    let mut acc = x.zero_like();
    for coef in row.iter().rev() {
        acc = acc * a.clone() + coef.clone();
    }
    // P_n(−a) = (−1)^{n+1} P_n(a)
    if neg && n % 2 == 0 {
        acc = -acc;
    }
    Ok(acc)
}

/// `B_{2ℓ}/(2ℓ)!` for ℓ = 1, 2, … as reals (index 0 holds ℓ = 1).
fn bernoulli_ratios<R: Real>(prec: u32, count: usize) -> std::sync::Arc<Vec<R>> {
    cached_reals::<R>("b2l-over-fact", prec, count, |p, len| {
        (1..=len).map(|l| rational_to::<R>(&bernoulli_over_factorial(2 * l), p)).collect()
    })
}

/// `g_ℓ(z) = −(B_{2ℓ}/(2ℓ)!) (πz)^{2ℓ−1} cot^{(2ℓ−2)}(πz)` for ℓ = 1..=count.
pub fn g_ell_all<R: Real>(count: usize, z: &Complex<R>) -> Result<Vec<Complex<R>>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if z.im.is_zero() && z.re == z.re.floor() {
        return Err(Error::Pole(format!("g_l has a pole at the integer {}", z.re.to_f64())));
    }
    let prec = z.prec();
    let piz = z.scale(z.re.pi());
    let cots = cot_derivatives(2 * count - 2, &piz)?;
    let ratios = bernoulli_ratios::<R>(prec, count);
    let piz2 = piz.clone() * piz.clone();
    let mut pw = piz;
    let mut out = Vec::with_capacity(count);
    for l in 1..=count {
        let v = -(pw.clone() * cots[2 * l - 2].clone()).scale(ratios[l - 1].clone());
        out.push(v);
        pw = pw * piz2.clone();
    }
    Ok(out)
}

pub fn g_ell<R: Real>(l: usize, z: &Complex<R>) -> Result<Complex<R>> {
    if l == 0 {
        return Err(Error::Domain("g_l needs l >= 1".into()));
    }
    Ok(g_ell_all(l, z)?.pop().expect("l >= 1"))
}

/// Parameters of the Euler–Maclaurin approximation of `∏⁻¹(h/k)_m`.
#[derive(Clone, Debug)]
pub struct EmConfig {
    /// Δ, in [0.0048, 0.0079].
    pub delta: Rational64,
    /// W with Δ log(1/Δ) ≤ W.
    pub w: Rational64,
    /// The scale s bounding k.
    pub s: i64,
    /// δ and δ′ for the strip 1 + δ < N/k < 3/2 − δ′.
    pub delta_left: Rational64,
    pub delta_right: Rational64,
}

impl EmConfig {
    pub fn new(delta: Rational64, w: Rational64, s: i64) -> Self {
        let d = Rational64::new(61, 10_000);
        EmConfig { delta, w, s, delta_left: d, delta_right: d }
    }

    /// W = 0.05, Δ = 0.006, δ = δ′ = 0.0061 at scale s.
    pub fn standard(s: i64) -> Self {
        EmConfig::new(Rational64::new(6, 1000), Rational64::new(5, 100), s)
    }

    /// α = πeΔ.
    pub fn alpha<R: Real>(&self, prec: u32) -> R {
        let one = R::from_i64_prec(1, prec);
        let delta = one.int(*self.delta.numer()) / one.int(*self.delta.denom());
        one.pi() * one.exp() * delta
    }

    /// `L = floor(πeΔ·s/h)`.
    pub fn cutoff(&self, h: i64) -> usize {
        let a: Mp = self.alpha(128);
        (a * Mp::from_i64_prec(self.s, 128) / Mp::from_i64_prec(h, 128)).floor().to_f64() as usize
    }

    fn delta_f64(&self) -> f64 {
        self.delta.to_f64().unwrap_or(f64::NAN)
    }

    /// Checks the hypotheses on (h, k, m); the error names the first violated one.
    pub fn validate(&self, h: i64, k: i64, m: i64) -> Result<()> {
        let fail = |what: &str| Err(Error::Domain(format!("constraint violated: {what}")));
        let lo = Rational64::new(48, 10_000);
        let hi = Rational64::new(79, 10_000);
        if self.delta < lo || self.delta > hi {
            return fail("0.0048 <= Delta <= 0.0079");
        }
        let d = self.delta_f64();
        if d * (1.0 / d).ln() > self.w.to_f64().unwrap_or(f64::NAN) {
            return fail("Delta log(1/Delta) <= W");
        }
        if !(0 < h && h < k) {
            return fail("0 < h < k");
        }
        if k > self.s {
            return fail("k <= s");
        }
        if h.gcd(&k) != 1 {
            return fail("gcd(h, k) = 1");
        }
        let rd = r_delta::<f64>(&d)?;
        if rd.r_delta > self.s as f64 / h as f64 {
            return fail("R_Delta <= s/h");
        }
        if self.delta * Rational64::from_integer(self.s) > Rational64::from_integer(m * h) {
            return fail("Delta s/h <= m");
        }
        if 2 * h * m > k {
            return fail("m <= k/(2h)");
        }
        Ok(())
    }
}

/// The roots r₁ < r₂ of Table-1 type and `R_Δ = 3/(r₂e^{−r₂−1} − r₁e^{−r₁−1})`.
#[derive(Clone, Debug)]
pub struct RDelta<R: Real> {
    pub r1: R,
    pub r2: R,
    pub r_delta: R,
}

fn bisect<R: Real>(lo: R, hi: R, f: impl Fn(&R) -> R) -> R {
    let mut lo = lo;
    let mut hi = hi;
    let flo_neg = f(&lo) < lo.zero_like();
    for _ in 0..96 {
        let mid = (lo.clone() + hi.clone()) * lo.ratio(1, 2);
        if (f(&mid) < mid.zero_like()) == flo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo.clone() + hi) * lo.ratio(1, 2)
}

/// Solves `e^{−r−1}(1 + r log(r/2π)) = Δ log(1/Δ)` and `r e^{−r−1} = 2πeΔ` on [0, 1].
pub fn r_delta<R: Real>(delta: &R) -> Result<RDelta<R>> {
    let one = delta.one_like();
    let two_pi = one.pi() * one.int(2);
    let g = |r: &R| r.clone() * (-(r.clone() + one.clone())).exp();
    let target1 = delta.clone() * (one.clone() / delta.clone()).ln();
    let target2 = two_pi.clone() * one.exp() * delta.clone();
    if target2 > g(&one) {
        return Err(Error::Domain("2 pi e Delta exceeds 1/e^2; r_2 does not exist".into()));
    }
    let f1 = |r: &R| {
        let core = if r.is_zero() {
            one.clone()
        } else {
            one.clone() + r.clone() * (r.clone() / two_pi.clone()).ln()
        };
        (-(r.clone() + one.clone())).exp() * core - target1.clone()
    };
    let r1 = bisect(one.zero_like(), one.clone(), f1);
    let r2 = bisect(one.zero_like(), one.clone(), |r| g(r) - target2.clone());
    if r1 >= r2 {
        return Err(Error::Domain("r_1 >= r_2: R_Delta is infinite".into()));
    }
    let r_delta = one.int(3) / (g(&r2) - g(&r1));
    Ok(RDelta { r1, r2, r_delta })
}

/// `c(h) = (√h/2) exp(π²h/18 + 1/6)`.
pub fn c_h<R: Real>(h: i64, prec: u32) -> R {
    let one = R::from_i64_prec(1, prec);
    let hh = one.int(h);
    hh.sqrt() / one.int(2) * (one.pi().sq() * hh / one.int(18) + one.ratio(1, 6)).exp()
}

/// `(π³/2)((2L−1)/(2πem))^{2L−1}`, the bound on |T_L(m, θ)|.
pub fn t_l_bound<R: Real>(l: i64, m: i64, prec: u32) -> R {
    let one = R::from_i64_prec(1, prec);
    let pi = one.pi();
    let e = 2 * l - 1;
    let base = one.int(e) / (one.int(2) * pi.clone() * one.exp() * one.int(m));
    pi.clone() * pi.sq() / one.int(2) * base.powi(e as i32)
}

/// Euler–Maclaurin main term for `∏⁻¹(h/k)_m`, kept in log form.
#[derive(Clone, Debug)]
pub struct EmEstimate<R: Real> {
    pub log_value: R,
    pub l: usize,
}

impl<R: Real> EmEstimate<R> {
    pub fn value(&self) -> R {
        self.log_value.exp()
    }
}

/// `log` of `(h/(2k sin(πmh/k)))^{1/2} exp((k/2πh)Cl₂(2πmh/k)) exp(−Σ_{ℓ<L} …)`
/// without the hypothesis check; valid for `1 ≤ m < k/h`.
fn em_log_main<R: Real>(h: i64, k: i64, m: i64, l: usize, prec: u32) -> Result<R> {
    let one = R::from_i64_prec(1, prec);
    let pi = one.pi();
    let theta = one.int(h) / one.int(k);
    let x = pi.clone() * one.int(m) * theta.clone();
    let s = x.sin();
    let mut acc = (theta.clone() / (one.int(2) * s)).ln() * one.ratio(1, 2);
    acc = acc + clausen(&(x.clone() * one.int(2))) / (one.int(2) * pi.clone() * theta.clone());
    if l >= 2 {
        let ratios = bernoulli_ratios::<R>(prec, l - 1);
        let pt = pi * theta;
        let pt2 = pt.sq();
        let mut pw = pt;
        let mut sum = one.zero_like();
        for ell in 1..l {
            let c = cot_derivative_real(2 * ell - 2, &x)?;
            sum = sum + ratios[ell - 1].clone() * pw.clone() * c;
            pw = pw * pt2.clone();
        }
        acc = acc - sum;
    }
    Ok(acc)
}

/// Main term of the Euler–Maclaurin formula for `∏⁻¹(h/k)_m` with `L = floor(πeΔ·s/h)`.
pub fn em_product_estimate<R: Real>(
    h: i64,
    k: i64,
    m: i64,
    cfg: &EmConfig,
    prec: u32,
) -> Result<EmEstimate<R>> {
    cfg.validate(h, k, m)?;
    let l = cfg.cutoff(h);
    Ok(EmEstimate { log_value: em_log_main(h, k, m, l, prec)?, l })
}

/// `T_L(m, h/k) = log(main term) − log ∏⁻¹(h/k)_m` for `1 ≤ m < k/h`.
pub fn t_l_value<R: Real>(h: i64, k: i64, m: i64, l: usize, prec: u32) -> Result<R> {
    check_coprime(h, k)?;
    if !(m >= 1 && m * h < k) {
        return Err(Error::Domain(format!("need 1 <= m < k/h, got m = {m}, {h}/{k}")));
    }
    let sp = sine_product::<R>(h, k, m as u64, prec)?;
    Ok(em_log_main::<R>(h, k, m, l, prec)? + sp.log_abs)
}

/// Extremes of `T_L` over the admissible (k, m) for fixed h.
#[derive(Clone, Debug, Serialize)]
pub struct EmCheck {
    pub h: i64,
    pub l: usize,
    /// max |∏⁻¹(h/k)_m · T_L(m, h/k)| and where it occurs.
    pub max_scaled: f64,
    pub argmax_scaled: (i64, i64),
    /// max |T_L(m, h/k)| and where it occurs.
    pub max_t: f64,
    pub argmax_t: (i64, i64),
    pub pairs: usize,
}

/// Scans `h < k ≤ s`, `Δs/h ≤ m ≤ k/(2h)` and reports the largest `|∏⁻¹·T_L|`, `|T_L|`.
pub fn em_check<R: Real>(h: i64, cfg: &EmConfig, prec: u32) -> Result<EmCheck> {
    let l = cfg.cutoff(h);
    let mut out =
        EmCheck { h, l, max_scaled: 0.0, argmax_scaled: (0, 0), max_t: 0.0, argmax_t: (0, 0), pairs: 0 };
    for k in (h + 1)..=cfg.s {
        if h.gcd(&k) != 1 {
            continue;
        }
        let m_hi = k / (2 * h);
        let prefixes = sine_product_prefixes::<R>(h, k, prec)?;
        for m in 1..=m_hi {
            if cfg.validate(h, k, m).is_err() {
                continue;
            }
            let log_spn = prefixes[m as usize].0.clone();
            let t = em_log_main::<R>(h, k, m, l, prec)? + log_spn.clone();
            let scaled = (t.clone() * (-log_spn).exp()).abs().to_f64();
            let ta = t.abs().to_f64();
            out.pairs += 1;
            if scaled > out.max_scaled {
                out.max_scaled = scaled;
                out.argmax_scaled = (k, m);
            }
            if ta > out.max_t {
                out.max_t = ta;
                out.argmax_t = (k, m);
            }
        }
    }
    Ok(out)
}

/// Upper bound `c(h) exp((k/2πh) Cl₂(2πmh/k))` for `∏⁻¹(h/k)_m`, `1 ≤ m < k/h`.
pub fn clausen_bound<R: Real>(h: i64, k: i64, m: i64, prec: u32) -> R {
    let one = R::from_i64_prec(1, prec);
    let two_pi = one.pi() * one.int(2);
    let arg = two_pi.clone() * one.int(m * h) / one.int(k);
    c_h::<R>(h, prec) * (one.int(k) / (two_pi * one.int(h)) * clausen(&arg)).exp()
}

/// `B_{2ℓ}/(2ℓ)!` as an exact rational; re-exported for callers building series.
pub fn bernoulli_ratio(l: usize) -> BigRational {
    bernoulli_over_factorial(2 * l)
}
