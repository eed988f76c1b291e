//! Residues of `Q(z;N,σ) = e^{2πiσz} / ∏_{j≤N} (1 − e^{2πijz})` at the Farey
//! points, the partial-fraction coefficients `C_{hkℓ}(N)` and the sums built
//! from them.
//!
//! Two independent local expansions are provided. [`q_general`] expands in
//! `ε = z − h/k` and reads off the `ε^{-1}` coefficient; [`principal_part`]
//! expands `∏ (1 − q^j)^{-1}` directly in `t = q − e^{2πih/k}`. The conversions
//! [`c_from_q_values`] and [`q_from_c_values`] connect the two.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Real};
use crate::series::TruncatedSeries;
use crate::sine_products::sine_product;

/// A reduced fraction `h/k` with `0 ≤ h < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FareyFraction {
    pub h: i64,
    pub k: i64,
}

impl FareyFraction {
    pub fn new(h: i64, k: i64) -> Result<Self> {
        if k < 1 || h < 0 || h >= k || h.gcd(&k) != 1 {
            return Err(Error::Domain(format!("{h}/{k} is not a reduced fraction in [0, 1)")));
        }
        Ok(Self { h, k })
    }

    /// Order of the pole of `∏_{j≤N} (1 − q^j)^{-1}` at `e^{2πih/k}`.
    pub fn pole_order(&self, n: i64) -> i64 {
        n / self.k
    }
}

/// Reduced fractions in `[0, 1)` with denominator at most `n`, in increasing order.
pub fn farey(n: i64) -> Vec<FareyFraction> {
    if n < 1 {
        return Vec::new();
    }
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    let mut out = vec![FareyFraction { h: 0, k: 1 }];
    while c < d {
        out.push(FareyFraction { h: c, k: d });
        let m = (n + b) / d;
        (a, b, c, d) = (c, d, m * c - a, m * d - b);
    }
    out
}

/// `p_N(0..=n_max)`: partitions into parts of size at most `N`.
pub fn partition_table(n_parts: i64, n_max: i64) -> Vec<BigInt> {
    let len = n_max.max(0) as usize + 1;
    let mut p = vec![BigInt::zero(); len];
    p[0] = BigInt::one();
    for part in 1..=n_parts.max(0) as usize {
        for i in part..len {
            let prev = p[i - part].clone();
            p[i] += prev;
        }
    }
    p
}

/// `p_N(n)`, zero for negative `n`.
pub fn p_restricted(n_parts: i64, n: i64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    partition_table(n_parts, n).pop().unwrap()
}

/// The value [`residue_sum`] must equal.
pub fn residue_sum_expected(n: i64, sigma: i64) -> BigInt {
    let top = n * (n + 1) / 2;
    if sigma <= 0 {
        -p_restricted(n, -sigma)
    } else if sigma < top {
        BigInt::zero()
    } else if n % 2 == 0 {
        p_restricted(n, sigma - top)
    } else {
        -p_restricted(n, sigma - top)
    }
}

fn unit_roots<R: Real>(k: i64, prec: u32) -> Vec<Complex<R>> {
    let two_pi = R::pi_prec(prec) * R::from_i64_prec(2, prec);
    (0..k)
        .map(|r| {
            let a = two_pi.clone() * R::from_i64_prec(r, prec) / R::from_i64_prec(k, prec);
            Complex::new(a.cos(), a.sin())
        })
        .collect()
}

fn validate(h: i64, k: i64, n: i64) -> Result<FareyFraction> {
    let f = FareyFraction::new(h, k)?;
    if k > n {
        return Err(Error::Domain(format!("k = {k} > N = {n}: h/k is not a pole")));
    }
    Ok(f)
}

/// Working precision for a pole of order `s` at scale `n`.
pub fn working_precision(prec: u32, order: i64, n: i64) -> u32 {
    let log_n = 64 - (n.max(1) as u64).leading_zeros();
    prec + 64 + 8 * order as u32 + 2 * log_n
}

/// Runs `f` at two nearby precisions and accepts when they agree to half the
/// working bits; otherwise doubles the precision, at most three times.
///
/// `f` also returns the magnitude of the terms that were combined, so values
/// that vanish exactly are judged against that scale instead of themselves.
fn with_loss_check<R: Real, T>(
    prec: u32,
    start: u32,
    what: &str,
    f: impl Fn(u32) -> Result<(Vec<Complex<R>>, R)>,
    finish: impl Fn(Vec<Complex<R>>) -> T,
) -> Result<T> {
    let mut wp = start;
    for _ in 0..4 {
        let (a, _) = f(wp)?;
        let (b, scale) = f(wp + 32)?;
        let ok = a.iter().zip(&b).all(|(x, y)| {
            let diff = ComplexExt::abs(&(x.clone() - y.clone()));
            let size = ComplexExt::abs(y).max_of(scale.clone());
            diff <= size.one_like().ldexp(-(wp as i32) / 2) * size
        });
        if ok {
            return Ok(finish(b.into_iter().map(|z| z.round_prec(prec)).collect()));
        }
        wp *= 2;
    }
    Err(Error::Precision(format!("{what}: cancellation persists at {wp} bits")))
}

/// `(2πi)^{-1}`-free residue `Q_{hkσ}(N)` by Laurent expansion in `z − h/k`.
pub fn q_general<R: Real>(h: i64, k: i64, sigma: i64, n: i64, prec: u32) -> Result<Complex<R>> {
    validate(h, k, n)?;
    let s = n / k;
    let start = working_precision(prec, s, n);
    with_loss_check(
        prec,
        start,
        &format!("Q at {h}/{k}, N = {n}"),
        |wp| q_laurent::<R>(h, k, sigma, n, wp).map(|(z, scale)| (vec![z], scale)),
        |mut v| v.pop().unwrap(),
    )
}

fn q_laurent<R: Real>(h: i64, k: i64, sigma: i64, n: i64, wp: u32) -> Result<(Complex<R>, R)> {
    let s = (n / k) as usize;
    let one = R::from_i64_prec(1, wp);
    let zero = R::from_i64_prec(0, wp);
    let c = |re: R| Complex::new(re, zero.clone());
    let roots = unit_roots::<R>(k, wp);

    // With x = 2πiε, e^{2πijz} = ζ_j e^{jx}; the residue times 2πi is the
    // x^{s-1} coefficient of the regular part.
    let exp_series = |a: i64, shifted: bool| {
        let mut coeffs = Vec::with_capacity(s);
        let mut term = one.clone();
        let a = R::from_i64_prec(a, wp);
        for i in 0..s {
            if shifted {
                coeffs.push(c(term.clone() / R::from_i64_prec(i as i64 + 1, wp)));
            } else {
                coeffs.push(c(term.clone()));
            }
            term = term * a.clone() / R::from_i64_prec(i as i64 + 1, wp);
        }
        TruncatedSeries::new(0, coeffs)
    };

    let mut den = TruncatedSeries::constant(c(one.clone()), s as i64);
    let mut pref = one.clone();
    for j in 1..=n {
        let factor = if j % k == 0 {
            pref *= &R::from_i64_prec(-j, wp);
            // (e^{jx} − 1)/(jx)
            exp_series(j, true)
        } else {
            let zeta = roots[(j * h).rem_euclid(k) as usize].clone();
            let e = exp_series(j, false);
            let mut coeffs: Vec<Complex<R>> =
                e.coeffs().iter().map(|a| -(zeta.clone() * a.clone())).collect();
            coeffs[0] = coeffs[0].clone() + c(one.clone());
            TruncatedSeries::new(0, coeffs)
        };
        den = den.mul(&factor);
    }
    let num = exp_series(sigma, false);
    let rden = den.recip()?;
    let mut top = c(zero.clone());
    let mut size = zero.clone();
    for i in 0..s {
        let t = num.coeffs()[i].clone() * rden.coeffs()[s - 1 - i].clone();
        size += &ComplexExt::abs(&t);
        top = top + t;
    }
    let phase = roots[(sigma * h).rem_euclid(k) as usize].clone();
    let inv = one / pref;
    Ok(((phase * top).scale(inv.clone()), size * inv.abs()))
}

/// `C_{hkℓ}(N)` for `ℓ = 1..=⌊N/k⌋`: the principal part of `∏_{j≤N}(1 − q^j)^{-1}`
/// at `q = e^{2πih/k}`, expanded directly in `q`.
pub fn principal_part<R: Real>(h: i64, k: i64, n: i64, prec: u32) -> Result<Vec<Complex<R>>> {
    validate(h, k, n)?;
    let s = n / k;
    let start = working_precision(prec, s, n);
    with_loss_check(
        prec,
        start,
        &format!("principal part at {h}/{k}, N = {n}"),
        |wp| principal_laurent::<R>(h, k, n, wp),
        |v| v,
    )
}

fn principal_laurent<R: Real>(h: i64, k: i64, n: i64, wp: u32) -> Result<(Vec<Complex<R>>, R)> {
    let s = (n / k) as usize;
    let one = R::from_i64_prec(1, wp);
    let zero = R::from_i64_prec(0, wp);
    let c = |re: R| Complex::new(re, zero.clone());
    let roots = unit_roots::<R>(k, wp);

    // q = ζ(1 + u); 1 − ζ^j(1+u)^j, with the factor u pulled out when k | j.
    let binomials = |j: i64, from: usize| {
        let mut out = Vec::with_capacity(s);
        let mut b = one.clone();
        for i in 0..from + s {
            if i >= from {
                out.push(b.clone());
            }
            b = b * R::from_i64_prec(j - i as i64, wp) / R::from_i64_prec(i as i64 + 1, wp);
        }
        out
    };
    let mut den = TruncatedSeries::constant(c(one.clone()), s as i64);
    for j in 1..=n {
        let factor = if j % k == 0 {
            let coeffs = binomials(j, 1).into_iter().map(|b| c(-b)).collect();
            TruncatedSeries::new(0, coeffs)
        } else {
            let zeta = roots[(j * h).rem_euclid(k) as usize].clone();
            let mut coeffs: Vec<Complex<R>> = binomials(j, 0).into_iter().map(|b| -zeta.scale(b)).collect();
            coeffs[0] = coeffs[0].clone() + c(one.clone());
            TruncatedSeries::new(0, coeffs)
        };
        den = den.mul(&factor);
    }
    let r = den.recip()?;
    let base = roots[h as usize].clone();
    let mut zeta_l = base.clone();
    let mut out = Vec::with_capacity(s);
    let mut largest = zero.clone();
    for l in 1..=s {
        let v = zeta_l.clone() * r.coeff((s - l) as i64).unwrap();
        largest = largest.max_of(ComplexExt::abs(&v));
        out.push(v);
        zeta_l = zeta_l * base.clone();
    }
    Ok((out, largest))
}

fn binomial_real<R: Real>(n: i64, k: i64, prec: u32) -> R {
    R::from_bigint_prec(&crate::sequences::binomial(n as u64, k as u64), prec)
}

/// `C_{hkℓ}` for `ℓ = 1..=len` from `Q_{hkσ}` for `σ = 1..=len`.
pub fn c_from_q_values<R: Real>(h: i64, k: i64, q: &[Complex<R>]) -> Vec<Complex<R>> {
    let Some(first) = q.first() else { return Vec::new() };
    let prec = first.prec();
    let neg_root = -unit_roots::<R>(k, prec)[h.rem_euclid(k) as usize].clone();
    let mut powers = vec![Complex::from_re(R::from_i64_prec(1, prec))];
    for i in 1..q.len() {
        powers.push(powers[i - 1].clone() * neg_root.clone());
    }
    (1..=q.len() as i64)
        .map(|l| {
            let mut acc = Complex::from_re(R::from_i64_prec(0, prec));
            for sigma in 1..=l {
                let b = binomial_real::<R>(l - 1, sigma - 1, prec);
                acc = acc + (powers[(l - sigma) as usize].clone() * q[sigma as usize - 1].clone()).scale(b);
            }
            acc
        })
        .collect()
}

/// `Q_{hkσ}` for `σ = 1..=len` from `C_{hkℓ}`; entries past the pole order are zero.
pub fn q_from_c_values<R: Real>(h: i64, k: i64, cs: &[Complex<R>], len: usize) -> Vec<Complex<R>> {
    let Some(first) = cs.first() else { return Vec::new() };
    let prec = first.prec();
    let root = unit_roots::<R>(k, prec)[h.rem_euclid(k) as usize].clone();
    let mut powers = vec![Complex::from_re(R::from_i64_prec(1, prec))];
    for i in 1..len {
        powers.push(powers[i - 1].clone() * root.clone());
    }
    (1..=len as i64)
        .map(|sigma| {
            let mut acc = Complex::from_re(R::from_i64_prec(0, prec));
            for l in 1..=sigma.min(cs.len() as i64) {
                let b = binomial_real::<R>(sigma - 1, l - 1, prec);
                acc = acc + (powers[(sigma - l) as usize].clone() * cs[l as usize - 1].clone()).scale(b);
            }
            acc
        })
        .collect()
}

/// `C_{hkℓ}(N)` through the residues `Q_{hk1}, …, Q_{hkℓ}`.
pub fn c_from_q<R: Real>(h: i64, k: i64, l: i64, n: i64, prec: u32) -> Result<Complex<R>> {
    if l < 1 {
        return Err(Error::Domain(format!("l = {l} must be positive")));
    }
    let q = (1..=l).map(|sigma| q_general::<R>(h, k, sigma, n, prec)).collect::<Result<Vec<_>>>()?;
    Ok(c_from_q_values(h, k, &q).pop().unwrap())
}

/// `Q_{hkσ}(N)` through the principal-part coefficients; needs `σ ≥ 1`.
pub fn q_from_c<R: Real>(h: i64, k: i64, sigma: i64, n: i64, prec: u32) -> Result<Complex<R>> {
    if sigma < 1 {
        return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
    }
    let cs = principal_part::<R>(h, k, n, prec)?;
    Ok(q_from_c_values(h, k, &cs, sigma as usize).pop().unwrap())
}

fn check_simple(h: i64, k: i64, n: i64) -> Result<()> {
    FareyFraction::new(h, k)?;
    if 2 * k <= n || k > n {
        return Err(Error::Domain(format!("k = {k} is outside the simple-pole range ({n}/2, {n}]")));
    }
    Ok(())
}

/// `π M/(2k) mod 2π` as an angle, for the integer part of the simple-pole phase.
fn quarter_phase<R: Real>(m: i128, k: i64, prec: u32) -> R {
    let r = m.rem_euclid(4 * k as i128) as i64;
    R::pi_prec(prec) * R::from_i64_prec(r, prec) / R::from_i64_prec(2 * k, prec)
}

fn simple_pole<R: Real>(h: i64, k: i64, n: i64, phase_int: i128, extra: R, prec: u32) -> Result<Complex<R>> {
    let sp = sine_product::<R>(h, k, (n - k) as u64, prec)?;
    let mut modulus = (-sp.log_abs).exp() / R::from_i64_prec(k * k, prec);
    if (sp.sign < 0) != (k % 2 == 0) {
        modulus = -modulus;
    }
    let angle = quarter_phase::<R>(phase_int, k, prec) + extra;
    Ok(Complex::new(modulus.clone() * angle.cos(), modulus * angle.sin()))
}

fn simple_phase(h: i64, k: i64, n: i64, sigma: i64) -> i128 {
    let (h, k, n, sigma) = (h as i128, k as i128, n as i128, sigma as i128);
    -h * (n * n + n - 4 * sigma) + k * (2 * n * h + n + h + k - h * k)
}

/// Closed form of the simple-pole residue, valid for `N/2 < k ≤ N`.
pub fn q_simple<R: Real>(h: i64, k: i64, sigma: i64, n: i64, prec: u32) -> Result<Complex<R>> {
    check_simple(h, k, n)?;
    simple_pole(h, k, n, simple_phase(h, k, n, sigma), R::from_i64_prec(0, prec), prec)
}

/// [`q_simple`] for real `σ`.
pub fn q_simple_real<R: Real>(h: i64, k: i64, sigma: &R, n: i64) -> Result<Complex<R>> {
    check_simple(h, k, n)?;
    let prec = sigma.prec();
    let two = R::from_i64_prec(2, prec);
    let extra =
        two * R::pi_prec(prec) * R::from_i64_prec(h, prec) * sigma.clone() / R::from_i64_prec(k, prec);
    simple_pole(h, k, n, simple_phase(h, k, n, 0), extra, prec)
}

/// Residue by closed form when the pole is simple, by Laurent expansion otherwise.
pub fn q_any<R: Real>(h: i64, k: i64, sigma: i64, n: i64, prec: u32) -> Result<Complex<R>> {
    if 2 * k > n && k <= n && k > 1 {
        q_simple(h, k, sigma, n, prec)
    } else {
        q_general(h, k, sigma, n, prec)
    }
}

fn ordered_sum<R: Real>(terms: Vec<Complex<R>>, prec: u32) -> Complex<R> {
    let mut acc = Complex::from_re(R::from_i64_prec(0, prec));
    for t in terms {
        acc = acc + t;
    }
    acc
}

/// `Σ_{h/k ∈ F_N} Q_{hkσ}(N)`, each residue by [`q_general`].
///
/// Terms are evaluated in parallel and added in Farey order.
pub fn residue_sum<R: Real>(n: i64, sigma: i64, prec: u32) -> Result<Complex<R>> {
    let terms = residue_terms::<R>(n, sigma, prec)?;
    Ok(ordered_sum(terms.into_iter().map(|(_, q)| q).collect(), prec))
}

/// Every `(h/k, Q_{hkσ}(N))`, in Farey order.
pub fn residue_terms<R: Real>(n: i64, sigma: i64, prec: u32) -> Result<Vec<(FareyFraction, Complex<R>)>> {
    farey(n).into_par_iter().map(|f| Ok((f, q_general::<R>(f.h, f.k, sigma, n, prec)?))).collect()
}

/// Sylvester wave `W_k(N, n) = −Σ_h Q_{hk(−n)}(N)` for `k = 1..=N`.
pub fn sylvester_waves<R: Real>(n_parts: i64, n: i64, prec: u32) -> Result<Vec<Complex<R>>> {
    let terms = residue_terms::<R>(n_parts, -n, prec)?;
    let mut waves = vec![Complex::from_re(R::from_i64_prec(0, prec)); n_parts.max(0) as usize];
    for (f, q) in terms {
        let w = &mut waves[f.k as usize - 1];
        *w = w.clone() - q;
    }
    Ok(waves)
}

/// One row of the residue listing.
#[derive(Clone, Debug, Serialize)]
pub struct ResidueRecord {
    pub h: i64,
    pub k: i64,
    pub order: i64,
    pub re: String,
    pub im: String,
}

pub fn residue_records<R: Real>(n: i64, sigma: i64, prec: u32, digits: usize) -> Result<Vec<ResidueRecord>> {
    Ok(residue_terms::<R>(n, sigma, prec)?
        .into_iter()
        .map(|(f, q)| ResidueRecord {
            h: f.h,
            k: f.k,
            order: f.pole_order(n),
            re: q.re.to_sci(digits),
            im: q.im.to_sci(digits),
        })
        .collect())
}

/// `Im Σ_{N/2<k≤N} 2(−1)^k/k² · exp((iπ/2)[(−N²−N+4σ)/k + 3N]) · ∏⁻¹(1/k)_{N−k}`.
///
/// The sine products are carried as logarithms; terms are added in increasing `k`.
/// The largest terms exceed the sum by roughly `0.13·N` bits, so the sum is formed
/// with that many guard bits and redone wider if the measured cancellation is larger.
pub fn a1_sum<R: Real>(n: i64, sigma: i64, prec: u32) -> Result<R> {
    if n < 2 {
        return Err(Error::Domain(format!("N = {n} must be at least 2")));
    }
    let mut wp = prec + 16 + (0.14 * n as f64) as u32;
    for _ in 0..4 {
        let (acc, lost) = a1_sum_at::<R>(n, sigma, wp)?;
        let carried = R::from_i64_prec(1, wp).prec();
        if carried < wp {
            // fixed-width type: accept while half the mantissa survives
            if lost <= carried as f64 / 2.0 {
                return Ok(acc);
            }
            return Err(Error::Precision(format!(
                "A1({n}, {sigma}) cancels {lost:.0} bits, more than a {carried}-bit type can carry"
            )));
        }
        if lost + prec as f64 + 8.0 <= wp as f64 {
            return Ok(acc.round_prec(prec));
        }
        wp = prec + 16 + lost.ceil() as u32;
    }
    Err(Error::Precision(format!("A1({n}, {sigma}) did not stabilise")))
}

/// The sum at working precision `wp`, with the bits lost to cancellation.
fn a1_sum_at<R: Real>(n: i64, sigma: i64, wp: u32) -> Result<(R, f64)> {
    let terms: Vec<R> = (n / 2 + 1..=n)
        .into_par_iter()
        .map(|k| {
            let sp = sine_product::<R>(1, k, (n - k) as u64, wp)?;
            let m =
                (-(n as i128) * (n as i128) - n as i128 + 4 * sigma as i128) + 3 * (n as i128) * (k as i128);
            let angle = quarter_phase::<R>(m, k, wp);
            let mut t =
                (-sp.log_abs).exp() * angle.sin() * R::from_i64_prec(2, wp) / R::from_i64_prec(k * k, wp);
            if (sp.sign < 0) != (k % 2 == 1) {
                t = -t;
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    let mut acc = R::from_i64_prec(0, wp);
    let mut big = f64::NEG_INFINITY;
    for t in terms {
        big = big.max(t.abs().to_f64().abs().log2());
        acc += &t;
    }
    let size = acc.abs().to_f64().log2();
    let lost = if size.is_finite() { (big - size).max(0.0) } else { wp as f64 };
    Ok((acc, lost))
}

/// Subsets of the Farey points whose residues are summed together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `N/2 < k ≤ N`, `h ∈ {1, k−1}`.
    A,
    /// `N/2 < k ≤ N`, `k` odd, `h ∈ {2, k−2}`.
    C,
    /// `N/2 < k ≤ N`, `k` odd, `h ∈ {(k−1)/2, (k+1)/2}`.
    D,
    /// `N/3 < k ≤ N/2`, `h ∈ {1, k−1}`; double poles.
    E,
}

impl Family {
    /// Members for the given `N`, ordered by `k` then `h`.
    pub fn members(&self, n: i64) -> Vec<FareyFraction> {
        let mut out = Vec::new();
        let (lo, hi) = match self {
            Family::E => (n / 3 + 1, n / 2),
            _ => (n / 2 + 1, n),
        };
        for k in lo.max(2)..=hi {
            let hs: Vec<i64> = match self {
                Family::A | Family::E => vec![1, k - 1],
                Family::C if k % 2 == 1 => vec![2, k - 2],
                Family::D if k % 2 == 1 => vec![(k - 1) / 2, (k + 1) / 2],
                _ => vec![],
            };
            let mut hs: Vec<i64> = hs.into_iter().filter(|&h| h > 0 && h < k && h.gcd(&k) == 1).collect();
            hs.sort();
            hs.dedup();
            out.extend(hs.into_iter().map(|h| FareyFraction { h, k }));
        }
        out
    }
}

/// `Σ Q_{hkσ}(N)` over a family. The members come in conjugate pairs, so the
/// sum is real; the imaginary part is dropped.
pub fn family_sum<R: Real>(family: Family, n: i64, sigma: i64, prec: u32) -> Result<R> {
    let members = family.members(n);
    if members.is_empty() {
        return Err(Error::Domain(format!("family {family:?} is empty for N = {n}")));
    }
    let terms =
        members.into_par_iter().map(|f| q_any::<R>(f.h, f.k, sigma, n, prec)).collect::<Result<Vec<_>>>()?;
    Ok(ordered_sum(terms, prec).re)
}

/// Default precision for [`c01l_exact`].
pub const C01_PRECISION: u32 = 512;

type Table = Arc<dyn Any + Send + Sync>;

fn c01_cache() -> &'static RwLock<HashMap<(TypeId, i64, u32), Table>> {
    static CACHE: OnceLock<RwLock<HashMap<(TypeId, i64, u32), Table>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn check_c01(n: i64, l: i64) -> Result<()> {
    if n < 1 || l < 1 || l > n {
        return Err(Error::Domain(format!("need 1 <= l <= N, got l = {l}, N = {n}")));
    }
    Ok(())
}

/// `C_{01ℓ}(N)`: the coefficient of `t^{-ℓ}` in `∏_{j≤N} (1 − (1+t)^j)^{-1}`.
///
/// Writing `1 − (1+t)^j = −t g_j(t)` with `g_j = Σ_{m<j} (1+t)^m`, which has
/// positive coefficients, gives `C_{01ℓ}(N) = (−1)^N [t^{N−ℓ}] 1/∏ g_j`. The
/// product is formed without cancellation, but the reciprocal loses about
/// `1.8 N` bits, so the work starts at `prec + 2N` bits. The result is
/// accepted once at least `prec/2` bits survive the measured loss; otherwise
/// the precision is doubled, at most three times.
pub fn c01l_exact<R: Real>(n: i64, l: i64, prec: u32) -> Result<R> {
    check_c01(n, l)?;
    Ok(c01_all::<R>(&[n], prec)?.pop().unwrap().swap_remove(l as usize - 1))
}

/// `[C_{011}(N), …, C_{01N}(N)]` for each requested `N`, sharing one product run.
pub fn c01_all<R: Real>(ns: &[i64], prec: u32) -> Result<Vec<Vec<R>>> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 1) {
        return Err(Error::Domain(format!("N = {bad} must be positive")));
    }
    let tables = c01_coefficients::<R>(ns, prec)?;
    Ok(ns
        .iter()
        .zip(tables)
        .map(|(&n, t)| {
            (1..=n)
                .map(|l| {
                    let r = t[(n - l) as usize].round_prec(prec);
                    if n % 2 == 0 {
                        r
                    } else {
                        -r
                    }
                })
                .collect()
        })
        .collect())
}

/// Reciprocal coefficients `[t^0 .. t^{N−1}] 1/∏_{j≤N} g_j` for each `N`.
fn c01_coefficients<R: Real>(ns: &[i64], prec: u32) -> Result<Vec<Arc<Vec<R>>>> {
    let key = |n: i64| (TypeId::of::<R>(), n, prec);
    let cached = |n: i64| {
        c01_cache()
            .read()
            .unwrap()
            .get(&key(n))
            .map(|t| t.clone().downcast::<Vec<R>>().expect("keyed by TypeId"))
    };
    let mut missing: Vec<i64> = ns.iter().copied().filter(|&n| cached(n).is_none()).collect();
    missing.sort();
    missing.dedup();
    if let Some(&top) = missing.last() {
        let mut wp = prec + 2 * top as u32;
        let mut accepted = false;
        for _ in 0..4 {
            let recips: Vec<(Vec<R>, u32)> =
                g_products::<R>(&missing, wp).iter().map(|p| reciprocal_tracked(p)).collect();
            if recips.iter().all(|(_, lost)| wp.saturating_sub(*lost) >= prec / 2) {
                let mut cache = c01_cache().write().unwrap();
                for (&n, (r, _)) in missing.iter().zip(recips) {
                    cache.insert(key(n), Arc::new(r) as Table);
                }
                accepted = true;
                break;
            }
            wp *= 2;
        }
        if !accepted {
            return Err(Error::Precision(format!(
                "C_01l reciprocal keeps fewer than {} bits at {wp} working bits",
                prec / 2
            )));
        }
    }
    Ok(ns.iter().map(|&n| cached(n).unwrap()).collect())
}

/// `∏_{j≤N} g_j` truncated to degree `N−1`, for each `N` in `ns`, from one pass.
fn g_products<R: Real>(ns: &[i64], prec: u32) -> Vec<Vec<R>> {
    let top = *ns.iter().max().unwrap() as usize;
    let mut p = vec![R::from_i64_prec(0, prec); top];
    p[0] = R::from_i64_prec(1, prec);
    let mut s = p.clone();
    let mut snaps: HashMap<usize, Vec<R>> = HashMap::new();
    for j in 1..=top {
        // s = Σ_{m<j} p (1+t)^m by Horner: s ← s(1+t) + p.
        s.clone_from(&p);
        for _ in 1..j {
            for i in (1..top).rev() {
                let (lo, hi) = s.split_at_mut(i);
                hi[0] += &lo[i - 1];
                hi[0] += &p[i];
            }
            s[0] += &p[0];
        }
        std::mem::swap(&mut p, &mut s);
        if ns.contains(&(j as i64)) {
            snaps.insert(j, p[..j].to_vec());
        }
    }
    ns.iter().map(|&n| snaps.remove(&(n as usize)).unwrap()).collect()
}

/// Power-series reciprocal by forward substitution, with the largest number of
/// bits cancelled in any coefficient.
fn reciprocal_tracked<R: Real>(p: &[R]) -> (Vec<R>, u32) {
    let inv0 = p[0].one_like() / p[0].clone();
    let mut r = Vec::with_capacity(p.len());
    r.push(inv0.clone());
    let mut lost = 0u32;
    for n in 1..p.len() {
        let mut acc = p[0].zero_like();
        let mut biggest = p[0].zero_like();
        for i in 1..=n {
            let t = p[i].clone() * r[n - i].clone();
            let a = t.abs();
            if a > biggest {
                biggest = a;
            }
            acc += &t;
        }
        lost = lost.max(cancelled_bits(&biggest, &acc));
        r.push(-(acc * inv0.clone()));
    }
    (r, lost)
}

fn cancelled_bits<R: Real>(biggest: &R, sum: &R) -> u32 {
    if biggest.is_zero() {
        return 0;
    }
    let size = sum.abs();
    if size.is_zero() {
        return sum.prec();
    }
    let ratio = (biggest.clone() / size.clone()).to_f64();
    let bits = if ratio.is_finite() {
        ratio.log2()
    } else {
        ((biggest.ln() - size.ln()) / size.int(2).ln()).to_f64()
    };
    bits.max(0.0).ceil() as u32
}

/// `C_{01ℓ}(N)` for `ℓ = 1..=l_max` by expanding in `u = log(1+t)` instead.
///
/// `∏ (1 − e^{ju})^{-1} = (−1)^N / (N! u^N) · exp(−Σ_j log((e^{ju} − 1)/(ju)))`,
/// and `log((e^y − 1)/y) = y/2 + Σ_k B_{2k} y^{2k} / (2k (2k)!)`, so the
/// exponent has power-sum times Bernoulli coefficients. The `u`-principal part
/// is carried to `t` by `C_ℓ = Res_u (e^u − 1)^{ℓ−1} e^u F du`. Returns the
/// values and the number of bits cancelled on the way.
pub fn c01l_log_series<R: Real>(n: i64, l_max: i64, prec: u32) -> Result<(Vec<R>, u32)> {
    check_c01(n, l_max)?;
    let len = n as usize;
    let int = |v: i64| R::from_i64_prec(v, prec);
    let zero = int(0);

    // Exponent coefficients a_i of Σ_j log((e^{ju} − 1)/(ju)), i < N.
    let mut a = vec![zero.clone(); len];
    if len > 1 {
        a[1] = int(n * (n + 1)) / int(4);
    }
    let mut powers: Vec<R> = (1..=n).map(|j| int(j * j)).collect();
    let squares = powers.clone();
    for two_k in (2..len).step_by(2) {
        let mut power_sum = zero.clone();
        for p in &powers {
            power_sum += p;
        }
        let b = crate::sequences::bernoulli_over_factorial(two_k);
        a[two_k] = power_sum * zero.rational(&b) / int(two_k as i64);
        for (p, sq) in powers.iter_mut().zip(&squares) {
            *p *= sq;
        }
    }

    // g = exp(−Σ a_i u^i) by m g_m = −Σ i a_i g_{m−i}.
    let mut lost = 0;
    let mut g = vec![zero.clone(); len];
    g[0] = int(1);
    for m in 1..len {
        let mut acc = zero.clone();
        let mut biggest = zero.clone();
        for i in 1..=m {
            let t = int(i as i64) * a[i].clone() * g[m - i].clone();
            let mag = t.abs();
            if mag > biggest {
                biggest = mag;
            }
            acc += &t;
        }
        lost = lost.max(cancelled_bits(&biggest, &acc));
        g[m] = -acc / int(m as i64);
    }

    // D_m = (−1)^N g_{N−m} / N!, the coefficient of u^{−m}.
    let n_fact = zero.big(&crate::sequences::factorial(len));
    let d: Vec<R> = (1..=len)
        .map(|m| {
            let v = g[len - m].clone() / n_fact.clone();
            if n % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();

    // (e^u − 1)^{ℓ−1} e^u has positive coefficients; build it by repeated products.
    let mut exp_u = vec![int(1); len];
    for i in 1..len {
        exp_u[i] = exp_u[i - 1].clone() / int(i as i64);
    }
    let mut expm1 = exp_u.clone();
    expm1[0] = zero.clone();
    let mul = |x: &[R], y: &[R]| {
        let mut out = vec![zero.clone(); len];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().take(len - i).enumerate() {
                out[i + j] += &(xi.clone() * yj.clone());
            }
        }
        out
    };
    let mut kernel = exp_u.clone();
    let mut out = Vec::with_capacity(l_max as usize);
    for _ in 1..=l_max {
        let mut acc = zero.clone();
        let mut biggest = zero.clone();
        for m in 1..=len {
            let t = d[m - 1].clone() * kernel[m - 1].clone();
            let mag = t.abs();
            if mag > biggest {
                biggest = mag;
            }
            acc += &t;
        }
        lost = lost.max(cancelled_bits(&biggest, &acc));
        out.push(acc);
        kernel = mul(&kernel, &expm1);
    }
    Ok((out, lost))
}
