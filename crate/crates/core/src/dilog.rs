//! Dilogarithm and the functions built from it.
//!
//! `li2` is the principal branch, single valued on `C \ [1, ∞)`. Values on the
//! cut are the limits from the upper half plane. The continued branches are
//! `Li₂(z) + 4π²A + 2πiB log z`; their zeros `w(A, B)` feed the saddle points
//! of `p_d(z) = (π²/6 − Li₂(e^{2πiz}) + 4π²d) / (2πiz)`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Real};
use crate::sequences::{bernoulli, cached_reals, factorial, rational_to};
use crate::sine_products::g_ell_all;

const GUARD_BITS: u32 = 24;

fn czero<R: Real>(like: &R) -> Complex<R> {
    Complex::new(like.zero_like(), like.zero_like())
}

fn zeta2<R: Real>(like: &R) -> R {
    like.pi().sq() / like.int(6)
}

/// Principal dilogarithm.
pub fn li2<R: Real>(z: &Complex<R>) -> Complex<R> {
    let prec = z.prec();
    li2_raw(&z.round_prec(prec + GUARD_BITS)).round_prec(prec)
}

fn li2_raw<R: Real>(z: &Complex<R>) -> Complex<R> {
    let x = &z.re;
    let y = &z.im;
    if x.is_zero() && y.is_zero() {
        return czero(x);
    }
    let one = x.one_like();
    let half = x.ratio(1, 2);
    let r2 = z.norm2();
    if r2 > one {
        if y.is_zero() && *x > one {
            // Li₂(x + i0) = π²/3 − ½ ln²x − Li₂(1/x) + iπ ln x
            let lx = x.ln();
            let inv = li2_raw(&Complex::from_re(one / x.clone())).re;
            let re = zeta2(x) * x.int(2) - lx.sq() * half - inv;
            return Complex::new(re, x.pi() * lx);
        }
        let l = (-z.clone()).ln();
        return -li2_raw(&ComplexExt::recip(z)) - Complex::from_re(zeta2(x)) - l.clone() * l * half;
    }
    if *x > half {
        if y.is_zero() && *x == one {
            return Complex::from_re(zeta2(x));
        }
        let w = Complex::from_re(one) - z.clone();
        return -li2_raw(&w) + Complex::from_re(zeta2(x)) - z.ln() * w.ln();
    }
    if r2 <= x.ratio(1, 4) {
        li2_power_series(z)
    } else {
        li2_bernoulli_series(z)
    }
}

fn li2_power_series<R: Real>(z: &Complex<R>) -> Complex<R> {
    let eps2 = z.re.one_like().ldexp(-2 * z.prec() as i32);
    let mut pw = z.clone();
    let mut sum = z.clone();
    let mut n: i64 = 1;
    loop {
        n += 1;
        pw = pw * z.clone();
        let term = pw.clone() / z.re.int(n * n);
        sum = sum + term.clone();
        if term.norm2() <= eps2.clone() * sum.norm2() {
            return sum;
        }
    }
}

/// B_n/(n+1)! for n = 0, 1, 2, ...
fn li2_bernoulli_coeffs<R: Real>(prec: u32, len: usize) -> std::sync::Arc<Vec<R>> {
    cached_reals::<R>("li2-bernoulli", prec, len, |p, n| {
        (0..n)
            .map(|i| {
                let b = bernoulli(i as i64).expect("nonnegative index");
                let f = num_rational::BigRational::from_integer(factorial(i + 1));
                rational_to::<R>(&(b / f), p)
            })
            .collect()
    })
}

/// Σ B_n u^{n+1}/(n+1)! with u = −log(1 − z); converges for |u| < 2π.
fn li2_bernoulli_series<R: Real>(z: &Complex<R>) -> Complex<R> {
    let prec = z.prec();
    let eps2 = z.re.one_like().ldexp(-2 * prec as i32);
    let u = -(Complex::from_re(z.re.one_like()) - z.clone()).ln();
    let coeffs = li2_bernoulli_coeffs::<R>(prec, prec as usize + 16);
    let u2 = u.clone() * u.clone();
    let mut sum = u.clone() + u2.clone() * coeffs[1].clone();
    let mut pw = u2.clone() * u.clone();
    let mut n = 2;
    while n < coeffs.len() {
        let term = pw.clone() * coeffs[n].clone();
        sum = sum + term.clone();
        if term.norm2() <= eps2.clone() * sum.norm2() {
            break;
        }
        pw = pw * u2.clone();
        n += 2;
    }
    sum
}

/// Clausen's integral Cl₂(θ) = Im Li₂(e^{iθ}).
pub fn clausen<R: Real>(theta: &R) -> R {
    let pi = theta.pi();
    let two_pi = pi.clone() * theta.int(2);
    let turns = ((theta.clone() + pi.clone()) / two_pi.clone()).floor();
    let t = theta.clone() - turns * two_pi;
    if t.is_zero() || t == -pi {
        return theta.zero_like();
    }
    li2(&Complex::new(t.cos(), t.sin())).im
}

/// Branch of the continued dilogarithm, `Li₂(z) + 4π²A + 2πiB log z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BranchLabel {
    pub a: i64,
    pub b: i64,
}

impl BranchLabel {
    pub fn new(a: i64, b: i64) -> Self {
        BranchLabel { a, b }
    }

    /// Whether the branch has a zero off the real line: `B ≠ 0`, `−|B|/2 < A ≤ |B|/2`.
    pub fn has_zero(&self) -> bool {
        self.b != 0 && 2 * self.a > -self.b.abs() && 2 * self.a <= self.b.abs()
    }

    /// All labels with a zero and `1 ≤ |B| ≤ max_b`, ordered by |B|, then B, then A.
    pub fn with_zeros(max_b: i64) -> Vec<BranchLabel> {
        let mut out = Vec::new();
        for mag in 1..=max_b {
            for b in [-mag, mag] {
                for a in -mag..=mag {
                    let label = BranchLabel::new(a, b);
                    if label.has_zero() {
                        out.push(label);
                    }
                }
            }
        }
        out
    }
}

/// `Li₂(z) + 4π²A + 2πiB log z`.
pub fn li2_continued<R: Real>(z: &Complex<R>, label: BranchLabel) -> Complex<R> {
    let pi = z.re.pi();
    let shift = Complex::from_re(pi.sq() * z.re.int(4 * label.a));
    let log_term = z.ln().mul_i().scale(pi * z.re.int(2 * label.b));
    li2(z) + shift + log_term
}

fn continued_derivative<R: Real>(z: &Complex<R>, b: i64) -> Complex<R> {
    let one = Complex::from_re(z.re.one_like());
    let two_pi_b = z.re.pi() * z.re.int(2 * b);
    let num = -(one - z.clone()).ln() + z.i_like().scale(two_pi_b);
    num / z.clone()
}

/// A certified zero of a continued dilogarithm branch.
#[derive(Clone, Debug)]
pub struct DilogZero<R: Real> {
    pub label: BranchLabel,
    pub w: Complex<R>,
    /// |Li₂(w) + 4π²A + 2πiB log w| at the precision of `w`.
    pub residual: R,
    pub iterations: usize,
}

fn off_zero_cuts<R: Real>(w: &Complex<R>) -> bool {
    let finite = w.re.is_finite() && w.im.is_finite();
    let on_real_cut = w.im.is_zero() && (w.re <= w.re.zero_like() || w.re >= w.re.one_like());
    finite && !on_real_cut
}

/// Damped Newton iteration; returns the converged point and the step count.
fn newton_zero<R: Real>(
    label: BranchLabel,
    start: Complex<R>,
    max_iter: usize,
) -> Option<(Complex<R>, usize)> {
    let prec = start.prec();
    let thr2 = start.re.one_like().ldexp(2 * (24 - prec as i32));
    let mut w = start;
    let mut fw = li2_continued(&w, label);
    for it in 0..max_iter {
        let d = continued_derivative(&w, label.b);
        if d.norm2().is_zero() {
            return None;
        }
        let step = fw.clone() / d;
        let mut lam = w.re.one_like();
        let mut accepted = false;
        for _ in 0..60 {
            let trial = step.scale(lam.clone());
            let cand = w.clone() - trial.clone();
            let small = trial.norm2() < thr2;
            if off_zero_cuts(&cand) {
                let fc = li2_continued(&cand, label);
                if fc.norm2() < fw.norm2() || small {
                    let done = small;
                    w = cand;
                    fw = fc;
                    accepted = true;
                    if done {
                        return Some((w, it + 1));
                    }
                    break;
                }
            }
            lam = lam.ldexp(-1);
        }
        if !accepted {
            return None;
        }
    }
    None
}

fn initial_guess<R: Real>(label: BranchLabel, prec: u32) -> Complex<R> {
    let one = R::from_i64_prec(1, prec);
    let pi = one.pi();
    if label.a == 0 {
        let sign = label.b.signum();
        let theta = one.ratio(sign, 5 * label.b.abs());
        let r = one.ratio(95, 100);
        return Complex::new(r.clone() * theta.cos(), r * theta.sin());
    }
    let theta = if 2 * label.a.abs() == label.b.abs() {
        // e^{±iπ} is on the cut of log; start just inside the half plane of the zero
        let s = (label.a * label.b).signum();
        (pi - one.ratio(1, 50)) * one.int(s)
    } else {
        pi * one.int(2 * label.a) / one.int(label.b)
    };
    Complex::new(theta.cos(), theta.sin())
}

/// Best starting point on a polar grid over |w| ≤ 1.2, refined in double precision.
fn grid_start(label: BranchLabel) -> Option<Complex<f64>> {
    let mut best: Option<(f64, Complex<f64>)> = None;
    for ir in 1..=48 {
        let r = 0.025 * ir as f64;
        for it in 0..240 {
            let t = std::f64::consts::TAU * (it as f64 + 0.5) / 240.0;
            let w = Complex::new(r * t.cos(), r * t.sin());
            let f = li2_continued(&w, label).norm();
            if f.is_finite() && best.is_none_or(|(bf, _)| f < bf) {
                best = Some((f, w));
            }
        }
    }
    let (_, w) = best?;
    newton_zero(label, w, 200).map(|(w, _)| w)
}

/// Zero of the continued dilogarithm branch `label`, certified at `prec` bits.
pub fn find_zero<R: Real>(label: BranchLabel, prec: u32) -> Result<DilogZero<R>> {
    if !label.has_zero() {
        return Err(Error::Domain(format!(
            "branch ({}, {}) has no zero: need B != 0 and -|B|/2 < A <= |B|/2",
            label.a, label.b
        )));
    }
    let wp = prec + 16;
    let start = initial_guess::<R>(label, wp);
    let found = newton_zero(label, start, 200).or_else(|| {
        let coarse = grid_start(label)?;
        let lifted = Complex::new(R::from_f64_prec(coarse.re, wp), R::from_f64_prec(coarse.im, wp));
        newton_zero(label, lifted, 200)
    });
    let (w, iterations) =
        found.ok_or_else(|| Error::Convergence(format!("Newton failed for w({}, {})", label.a, label.b)))?;
    let w = w.round_prec(prec);
    let residual = ComplexExt::abs(&li2_continued(&w, label));
    if !(residual < w.re.tol()) {
        return Err(Error::Convergence(format!(
            "w({}, {}) residual {} above tolerance",
            label.a,
            label.b,
            residual.to_f64()
        )));
    }
    Ok(DilogZero { label, w, residual, iterations })
}

fn check_off_p_cuts<R: Real>(z: &Complex<R>) -> Result<()> {
    if z.im <= z.im.zero_like() && z.re == z.re.floor() {
        return Err(Error::Domain(format!(
            "z = {} + {}i lies on a branch cut (-i inf, n]",
            z.re.to_f64(),
            z.im.to_f64()
        )));
    }
    Ok(())
}

/// `p_d(z)` together with its first two derivatives.
pub fn p_d_with_derivatives<R: Real>(z: &Complex<R>, d: i64) -> Result<[Complex<R>; 3]> {
    check_off_p_cuts(z)?;
    let pi = z.re.pi();
    let two_pi_iz = z.mul_i().scale(pi.clone() * z.re.int(2));
    let x = two_pi_iz.exp();
    let constant = zeta2(&z.re) + pi.sq() * z.re.int(4 * d);
    let p = (Complex::from_re(constant) - li2(&x)) / two_pi_iz;
    let one_minus_x = Complex::from_re(z.re.one_like()) - x.clone();
    let p1 = -(p.clone() - one_minus_x.ln()) / z.clone();
    let two_pi_i = z.i_like().scale(pi * z.re.int(2));
    let p2 = -(p1.scale(z.re.int(2)) + two_pi_i * x / one_minus_x) / z.clone();
    Ok([p, p1, p2])
}

/// `p_d(z) = (π²/6 − Li₂(e^{2πiz}) + 4π²d) / (2πiz)`.
pub fn p_d<R: Real>(z: &Complex<R>, d: i64) -> Result<Complex<R>> {
    Ok(p_d_with_derivatives(z, d)?[0].clone())
}

pub fn p_d_prime<R: Real>(z: &Complex<R>, d: i64) -> Result<Complex<R>> {
    Ok(p_d_with_derivatives(z, d)?[1].clone())
}

pub fn p_d_second<R: Real>(z: &Complex<R>, d: i64) -> Result<Complex<R>> {
    Ok(p_d_with_derivatives(z, d)?[2].clone())
}

/// Critical point of `p_d` in the strip `m − 1/2 < Re z < m + 1/2`.
#[derive(Clone, Debug)]
pub struct SaddlePoint<R: Real> {
    pub m: i64,
    pub d: i64,
    pub z: Complex<R>,
    /// `p_d(z) = log w(d, −m)`.
    pub p_value: Complex<R>,
    pub zero: DilogZero<R>,
    /// `|p_d′(z)|` and `|p_d(z) − log w|` measured before rounding to the
    /// requested precision; both are below `10^(−0.3·prec)`.
    pub derivative_residual: R,
    pub value_residual: R,
}

/// `2^-ceil(0.3·prec·log₂10)`, never larger than `10^(−0.3·prec)`.
fn saddle_bound<R: Real>(like: &R, prec: u32) -> R {
    let e = (0.3 * prec as f64 * std::f64::consts::LOG2_10).ceil() as i32;
    like.one_like().ldexp(-e)
}

/// Saddle point `z* = m + log(1 − w(d, −m))/(2πi)`, certified at `prec + 64` bits.
pub fn find_saddle<R: Real>(m: i64, d: i64, prec: u32) -> Result<SaddlePoint<R>> {
    if m == 0 || 2 * d <= -m.abs() || 2 * d > m.abs() {
        return Err(Error::Domain(format!("(m, d) = ({m}, {d}) inadmissible: need -|m|/2 < d <= |m|/2")));
    }
    let ip = prec + 64;
    let zero = find_zero::<R>(BranchLabel::new(d, -m), ip)?;
    let w = zero.w.clone();
    let one = w.re.one_like();
    let two_pi = w.re.pi() * w.re.int(2);
    // log(1 − w)/(2πi) = −i log(1 − w)/(2π)
    let shift = -(Complex::from_re(one.clone()) - w.clone()).ln().mul_i() / Complex::from_re(two_pi);
    let z = Complex::from_re(w.re.int(m)) + shift;
    let half = one.ratio(1, 2);
    let centre = w.re.int(m);
    if !(z.re > centre.clone() - half.clone() && z.re < centre + half) {
        return Err(Error::Convergence(format!("saddle for (m, d) = ({m}, {d}) left its strip")));
    }
    let [p, p1, _] = p_d_with_derivatives(&z, d)?;
    let logw = w.ln();
    let bound = saddle_bound(&one, prec).max_of(z.re.tol());
    let dp = ComplexExt::abs(&p1);
    let dv = ComplexExt::abs(&(p.clone() - logw));
    if !(dp < bound && dv < bound) {
        return Err(Error::Precision(format!(
            "saddle ({m}, {d}) failed certification: |p'| = {:e}, |p - log w| = {:e}",
            dp.to_f64(),
            dv.to_f64()
        )));
    }
    let zero = DilogZero {
        label: zero.label,
        w: zero.w.round_prec(prec),
        residual: zero.residual.round_prec(prec),
        iterations: zero.iterations,
    };
    Ok(SaddlePoint {
        m,
        d,
        z: z.round_prec(prec),
        p_value: p.round_prec(prec),
        zero,
        derivative_residual: dp.round_prec(prec),
        value_residual: dv.round_prec(prec),
    })
}

fn check_strip<R: Real>(z: &Complex<R>) -> Result<()> {
    let one = z.re.one_like();
    if !(z.re > one && z.re < z.re.ratio(3, 2)) {
        return Err(Error::Domain(format!("Re z = {} outside the strip (1, 3/2)", z.re.to_f64())));
    }
    Ok(())
}

/// `r(z) = Li₂(e^{2πiz})/(2πiz) + 13πi/(12z)`, holomorphic for 1 < Re z < 2.
pub fn strip_r<R: Real>(z: &Complex<R>) -> Complex<R> {
    let pi = z.re.pi();
    let two_pi_iz = z.mul_i().scale(pi.clone() * z.re.int(2));
    let l = li2(&two_pi_iz.exp());
    let tail = z.i_like().scale(pi * z.re.ratio(13, 12)) / z.clone();
    l / two_pi_iz + tail
}

/// `q(z) = (z / (2 sin(π(z − 1))))^{1/2} e^{−iπz/2}`, principal root.
pub fn strip_q<R: Real>(z: &Complex<R>) -> Complex<R> {
    let pi = z.re.pi();
    let one = Complex::from_re(z.re.one_like());
    let s = (z.clone() - one).scale(pi.clone()).sin().scale(z.re.int(2));
    let root = (z.clone() / s).sqrt();
    let phase = (-z.mul_i().scale(pi * z.re.ratio(1, 2))).exp();
    root * phase
}

/// `v(z; N, σ) = 2πiσz/N + Σ_{ℓ=1}^{L−1} g_ℓ(z)/N^{2ℓ−1}`.
pub fn strip_v<R: Real>(z: &Complex<R>, n: i64, sigma: i64, l_cut: usize) -> Result<Complex<R>> {
    let pi = z.re.pi();
    let nn = z.re.int(n);
    let mut acc = z.mul_i().scale(pi * z.re.int(2 * sigma) / nn.clone());
    if l_cut < 2 {
        return Ok(acc);
    }
    let g = g_ell_all(l_cut - 1, z)?;
    let n2 = nn.sq();
    let mut npow = nn.clone();
    for gl in g {
        acc = acc + gl / Complex::from_re(npow.clone());
        npow = npow * n2.clone();
    }
    Ok(acc)
}

/// `L = floor(α·N)`.
pub fn cutoff<R: Real>(alpha: &R, n: i64) -> usize {
    let l = (alpha.clone() * alpha.int(n)).floor().to_f64();
    if l < 0.0 {
        0
    } else {
        l as usize
    }
}

/// Values of r, q and v at one point of the strip.
#[derive(Clone, Debug)]
pub struct StripValues<R: Real> {
    pub r: Complex<R>,
    pub q: Complex<R>,
    pub v: Complex<R>,
}

pub fn r_q_v_eval<R: Real>(z: &Complex<R>, n: i64, sigma: i64, alpha: &R) -> Result<StripValues<R>> {
    check_strip(z)?;
    let l_cut = cutoff(alpha, n);
    if l_cut < 2 {
        return Err(Error::Domain(format!("L = floor(alpha N) = {l_cut} is below 2")));
    }
    Ok(StripValues { r: strip_r(z), q: strip_q(z), v: strip_v(z, n, sigma, l_cut)? })
}
