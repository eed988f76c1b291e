//! Truncated Taylor/Laurent series `Σ_{i=lead}^{trunc-1} c_i t^i + O(t^trunc)`.
//!
//! Coefficients may be real or complex floats of any [`Real`] type, or exact
//! `BigRational`s.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Mp, Real};

/// Coefficient field for [`TruncatedSeries`].
pub trait Coeff:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, n: i64) -> Self;
    fn is_zero_exact(&self) -> bool;
    /// `exp` of a scalar, when the field supports it.
    fn exp_scalar(&self) -> Option<Self>;
    /// Principal `ln` of a scalar, when the field supports it.
    fn ln_scalar(&self) -> Option<Self>;
    /// Rough absolute value, used only by cancellation heuristics.
    fn magnitude(&self) -> f64;
}

macro_rules! impl_coeff_real {
    ($t:ty) => {
        impl Coeff for $t {
            fn zero_like(&self) -> Self {
                Real::zero_like(self)
            }
            fn one_like(&self) -> Self {
                Real::one_like(self)
            }
            fn int_like(&self, n: i64) -> Self {
                self.int(n)
            }
            fn is_zero_exact(&self) -> bool {
                self.is_zero()
            }
            fn exp_scalar(&self) -> Option<Self> {
                Some(Real::exp(self))
            }
            fn ln_scalar(&self) -> Option<Self> {
                (*self > Real::zero_like(self)).then(|| Real::ln(self))
            }
            fn magnitude(&self) -> f64 {
                Real::abs(self).to_f64()
            }
        }
    };
}

impl_coeff_real!(f64);
impl_coeff_real!(f32);
impl_coeff_real!(Mp);

impl<R: Real> Coeff for Complex<R> {
    fn zero_like(&self) -> Self {
        Complex::new(self.re.zero_like(), self.re.zero_like())
    }
    fn one_like(&self) -> Self {
        Complex::new(self.re.one_like(), self.re.zero_like())
    }
    fn int_like(&self, n: i64) -> Self {
        Complex::new(self.re.int(n), self.re.zero_like())
    }
    fn is_zero_exact(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn exp_scalar(&self) -> Option<Self> {
        Some(ComplexExt::exp(self))
    }
    fn ln_scalar(&self) -> Option<Self> {
        (!self.is_zero_exact()).then(|| ComplexExt::ln(self))
    }
    fn magnitude(&self) -> f64 {
        ComplexExt::abs(self).to_f64()
    }
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn int_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero_exact(&self) -> bool {
        self.is_zero()
    }
    fn exp_scalar(&self) -> Option<Self> {
        self.is_zero().then(BigRational::one)
    }
    fn ln_scalar(&self) -> Option<Self> {
        self.is_one().then(BigRational::zero)
    }
    fn magnitude(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Truncated Laurent series. `zero` fixes the coefficient field (precision)
/// even when no terms are known.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<C> {
    lead: i64,
    coeffs: Vec<C>,
    zero: C,
}

impl<C: Coeff> TruncatedSeries<C> {
    /// `Σ coeffs[i] t^(lead+i) + O(t^(lead+len))`.
    pub fn new(lead: i64, coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "use `unknown` for a series with no known terms");
        let zero = coeffs[0].zero_like();
        TruncatedSeries { lead, coeffs, zero }
    }

    /// `O(t^trunc)` with no known terms.
    pub fn unknown(trunc: i64, sample: &C) -> Self {
        TruncatedSeries { lead: trunc, coeffs: Vec::new(), zero: sample.zero_like() }
    }

    fn from_parts(lead: i64, coeffs: Vec<C>, zero: &C) -> Self {
        TruncatedSeries { lead, coeffs, zero: zero.clone() }
    }

    /// Constant `c + O(t^trunc)`, `trunc ≥ 1`.
    pub fn constant(c: C, trunc: i64) -> Self {
        assert!(trunc >= 1);
        let z = c.zero_like();
        let mut coeffs = vec![z; trunc as usize];
        coeffs[0] = c;
        Self::new(0, coeffs)
    }

    /// `a + b t + O(t^trunc)`.
    pub fn linear(a: C, b: C, trunc: i64) -> Self {
        assert!(trunc >= 2);
        let mut s = Self::constant(a, trunc);
        s.coeffs[1] = b;
        s
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }
    /// Exclusive upper exponent.
    pub fn trunc(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }
    fn sample(&self) -> &C {
        &self.zero
    }
    /// Coefficient of `t^i`; zero below `lead`, `None` at or beyond `trunc`.
    pub fn coeff(&self, i: i64) -> Option<C> {
        if i >= self.trunc() {
            None
        } else if i < self.lead {
            Some(self.sample().zero_like())
        } else {
            Some(self.coeffs[(i - self.lead) as usize].clone())
        }
    }

    /// Drops terms at and beyond `t^trunc`.
    pub fn truncate(&self, trunc: i64) -> Self {
        if trunc >= self.trunc() {
            return self.clone();
        }
        if trunc <= self.lead {
            return Self::unknown(trunc, &self.zero);
        }
        Self::from_parts(self.lead, self.coeffs[..(trunc - self.lead) as usize].to_vec(), &self.zero)
    }

    /// Rewrites with `lead` lowered to `new_lead` by padding zeros.
    pub fn with_lead(&self, new_lead: i64) -> Self {
        assert!(new_lead <= self.lead);
        let z = self.sample().zero_like();
        let mut coeffs = vec![z; (self.lead - new_lead) as usize];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_parts(new_lead, coeffs, &self.zero)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_parts(self.lead + k, self.coeffs.clone(), &self.zero)
    }

    /// Index of the first coefficient that is not exactly zero.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero_exact()).map(|i| self.lead + i as i64)
    }

    /// Strips exactly-zero leading coefficients.
    pub fn normalized(&self) -> Self {
        match self.coeffs.iter().position(|c| !c.is_zero_exact()) {
            Some(0) | None => self.clone(),
            Some(i) => Self::from_parts(self.lead + i as i64, self.coeffs[i..].to_vec(), &self.zero),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_parts(self.lead, self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(), &self.zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let lead = self.lead.min(other.lead);
        let trunc = self.trunc().min(other.trunc());
        let z = self.sample().zero_like();
        if trunc <= lead {
            return Self::unknown(trunc, &z);
        }
        let coeffs = (lead..trunc)
            .map(|i| {
                let a = self.coeff(i).unwrap_or_else(|| z.clone());
                let b = other.coeff(i).unwrap_or_else(|| z.clone());
                a + b
            })
            .collect();
        Self::new(lead, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(self.lead, self.coeffs.iter().map(|c| -c.clone()).collect(), &self.zero)
    }

    /// Adds a scalar to the `t^0` coefficient.
    pub fn add_scalar(&self, c: &C) -> Self {
        if self.trunc() <= 0 {
            return self.clone();
        }
        let mut s = if self.lead > 0 { self.with_lead(0) } else { self.clone() };
        let idx = (-s.lead) as usize;
        s.coeffs[idx] = s.coeffs[idx].clone() + c.clone();
        s
    }

    /// Product; the relative length is the shorter of the two.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let z = self.sample().zero_like();
        if n == 0 {
            return Self::unknown(self.lead + other.lead, &z);
        }
        let mut out = vec![z; n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero_exact() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(self.lead + other.lead, out)
    }

    /// Reciprocal by Newton iteration `y ← y (2 − a y)`.
    pub fn recip(&self) -> Result<Self> {
        let a = self.normalized();
        if a.coeffs.is_empty() || a.coeffs[0].is_zero_exact() {
            return Err(Error::Domain("reciprocal of a series with no unit term".into()));
        }
        let c0 = a.coeffs[0].clone();
        let n = a.coeffs.len();
        let unit = Self::new(0, a.coeffs.clone());
        let one = c0.one_like();
        let mut y = Self::new(0, vec![one.clone() / c0]);
        let mut len = 1;
        while len < n {
            len = (2 * len).min(n);
            let ut = unit.truncate(len as i64);
            let ay = ut.mul(&y.pad(len));
            let two_minus = ay.neg().add_scalar(&one.int_like(2));
            y = y.pad(len).mul(&two_minus);
        }
        Ok(Self::from_parts(-a.lead, y.coeffs, &a.zero))
    }

    /// Extends with zeros up to `len` stored terms (only for exact tails).
    fn pad(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < len {
            coeffs.push(self.zero.clone());
        }
        Self::from_parts(self.lead, coeffs, &self.zero)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<C> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.clone() * c.int_like(self.lead + i as i64))
            .collect();
        if self.lead == 0 && !coeffs.is_empty() {
            return Self::from_parts(0, coeffs[1..].to_vec(), &self.zero);
        }
        Self::from_parts(self.lead - 1, coeffs, &self.zero)
    }

    /// Antiderivative with zero constant; fails on a `t^-1` term.
    pub fn integral(&self) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        let mut lead = self.lead + 1;
        if lead > 0 {
            for _ in 0..lead {
                coeffs.push(self.sample().zero_like());
            }
            lead = 0;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.lead + i as i64 + 1;
            if e == 0 {
                if !c.is_zero_exact() {
                    return Err(Error::Domain("integral of a series with a t^-1 term".into()));
                }
                coeffs.push(c.zero_like());
            } else {
                coeffs.push(c.clone() / c.int_like(e));
            }
        }
        Ok(Self::from_parts(lead, coeffs, &self.zero))
    }

    /// Principal log of a series with nonzero constant term.
    pub fn log(&self) -> Result<Self> {
        let a = self.normalized();
        if a.lead != 0 || a.coeffs.is_empty() {
            return Err(Error::Domain("log of a series whose leading exponent is not 0".into()));
        }
        let c0 = a.coeffs[0].clone();
        let l0 = c0
            .ln_scalar()
            .ok_or_else(|| Error::Domain("log of a series with unsupported constant term".into()))?;
        let n = a.coeffs.len();
        if n == 1 {
            return Ok(Self::new(0, vec![l0]));
        }
        let quot = a.derivative().mul(&a.recip()?.truncate(n as i64 - 1));
        let mut out = quot.integral()?;
        out = out.pad(n).truncate(n as i64);
        out.coeffs[0] = l0;
        Ok(out)
    }

    /// Exponential by Newton iteration `y ← y (1 + a − log y)`.
    pub fn exp(&self) -> Result<Self> {
        if self.lead < 0 {
            let v = self.valuation();
            if v.map_or(false, |v| v < 0) {
                return Err(Error::Domain("exp of a series with a pole".into()));
            }
        }
        let trunc = self.trunc();
        if trunc <= 0 {
            return Err(Error::Domain("exp of a series with no known terms".into()));
        }
        let a = if self.lead < 0 {
            Self::new(0, self.coeffs[(-self.lead) as usize..].to_vec())
        } else {
            self.with_lead(0)
        };
        let c0 = a.coeffs[0].clone();
        let e0 = c0
            .exp_scalar()
            .ok_or_else(|| Error::Domain("exp of a series with unsupported constant term".into()))?;
        let mut rest = a.clone();
        rest.coeffs[0] = c0.zero_like();
        let n = rest.coeffs.len();
        let one = c0.one_like();
        let mut y = Self::new(0, vec![one.clone()]);
        let mut len = 1;
        while len < n {
            len = (2 * len).min(n);
            let yl = y.pad(len);
            let corr = rest.truncate(len as i64).sub(&yl.log()?).add_scalar(&one);
            y = yl.mul(&corr);
        }
        Ok(y.scale(&e0))
    }

    /// Integer power; negative exponents use the reciprocal.
    pub fn powi(&self, n: i64) -> Result<Self> {
        let mut base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let one = self.sample().one_like();
        let mut acc = Self::constant(one, base.coeffs.len().max(1) as i64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// `self(inner(t))` by Horner's rule; `inner` must vanish at `t = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let v = inner.valuation().ok_or_else(|| Error::Domain("composition with a zero series".into()))?;
        if v < 1
            || inner.lead < 0 && inner.coeffs[..(-inner.lead) as usize].iter().any(|c| !c.is_zero_exact())
        {
            return Err(Error::Domain("composition requires an inner series vanishing at 0".into()));
        }
        let inner = inner.normalized();
        let outer_trunc = self.trunc();
        let result_trunc = if outer_trunc > 0 { (outer_trunc * v).min(inner.trunc()) } else { inner.trunc() };
        let len = (result_trunc.max(1)) as usize;
        let inner_t = inner.with_lead(0).pad(len).truncate(result_trunc);
        let zero = self.sample().zero_like();
        let top = outer_trunc - 1;
        let lo = self.lead.max(0);
        let mut acc = Self::constant(zero.clone(), result_trunc.max(1));
        let mut k = top;
        while k >= lo {
            let ck = self.coeff(k).unwrap_or_else(|| zero.clone());
            acc = acc.mul(&inner_t).add_scalar(&ck);
            k -= 1;
        }
        if lo > 0 {
            acc = acc.mul(&inner_t.powi(lo)?);
        }
        if self.lead < 0 {
            let tail = Self::new(self.lead, self.coeffs[..(-self.lead) as usize].to_vec());
            let mut neg = Self::constant(zero, result_trunc.max(1));
            let inv = inner.recip()?;
            for k in (self.lead..0).rev() {
                let ck = tail.coeff(k).unwrap();
                neg = neg.add_scalar(&ck).mul(&inv);
            }
            acc = acc.add(&neg);
        }
        Ok(acc.truncate(result_trunc))
    }

    /// Evaluates the stored terms at a scalar point.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = self.sample().zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        if self.lead >= 0 {
            for _ in 0..self.lead {
                acc = acc * x.clone();
            }
        } else {
            let inv = x.one_like() / x.clone();
            for _ in 0..(-self.lead) {
                acc = acc * inv.clone();
            }
        }
        acc
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries::from_parts(self.lead, self.coeffs.iter().map(&f).collect(), &f(&self.zero))
    }
}

/// `exp(c t)` as a series to `O(t^trunc)`.
pub fn exp_linear<C: Coeff>(c: &C, trunc: i64) -> TruncatedSeries<C> {
    let mut coeffs = Vec::with_capacity(trunc as usize);
    let mut term = c.one_like();
    for i in 0..trunc.max(1) {
        coeffs.push(term.clone());
        term = term * c.clone() / c.int_like(i + 1);
    }
    TruncatedSeries::new(0, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn geometric_reciprocal() {
        let s = TruncatedSeries::new(0, vec![rat(1, 1), rat(1, 1), rat(0, 1)]);
        let r = s.recip().unwrap();
        assert_eq!(r.coeffs(), &[rat(1, 1), rat(-1, 1), rat(1, 1)]);
    }

    #[test]
    fn exp_of_log_round_trip() {
        let s = TruncatedSeries::new(0, vec![rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        let back = s.log().unwrap().exp().unwrap();
        assert_eq!(back.coeffs(), s.coeffs());
    }

    #[test]
    fn laurent_reciprocal_moves_lead() {
        let s = TruncatedSeries::new(2, vec![2.0f64, 1.0, 0.0, 0.0]);
        let r = s.recip().unwrap();
        assert_eq!(r.lead(), -2);
        assert_eq!(r.trunc(), 2);
        assert!((r.coeffs()[0] - 0.5).abs() < 1e-15);
        assert!((r.coeffs()[1] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn compose_exp_with_sin_like() {
        // exp(t) ∘ (t + t^2) = 1 + t + 3/2 t^2 + 7/6 t^3
        let e = exp_linear(&rat(1, 1), 4);
        let inner = TruncatedSeries::new(0, vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(0, 1)]);
        let c = e.compose(&inner).unwrap();
        assert_eq!(c.coeffs(), &[rat(1, 1), rat(1, 1), rat(3, 2), rat(7, 6)]);
    }

    #[test]
    fn compose_with_laurent_outer() {
        // (1/t) ∘ (2t + t^2) = 1/(2t) − 1/4 + t/8 ...
        let outer = TruncatedSeries::new(-1, vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        let inner = TruncatedSeries::new(0, vec![rat(0, 1), rat(2, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c.coeff(-1).unwrap(), rat(1, 2));
        assert_eq!(c.coeff(0).unwrap(), rat(-1, 4));
        assert_eq!(c.coeff(1).unwrap(), rat(1, 8));
    }

    #[test]
    fn derivative_and_integral_invert() {
        let s = TruncatedSeries::new(0, vec![rat(0, 1), rat(3, 1), rat(5, 2), rat(7, 3)]);
        let back = s.derivative().integral().unwrap();
        assert_eq!(back.coeffs(), s.coeffs());
    }

    #[test]
    fn non_unit_inputs_are_domain_errors() {
        let s = TruncatedSeries::new(0, vec![rat(0, 1), rat(0, 1)]);
        assert!(s.recip().is_err());
        assert!(s.log().is_err());
        let two = TruncatedSeries::new(0, vec![rat(2, 1), rat(1, 1)]);
        assert!(two.log().is_err());
    }
}
