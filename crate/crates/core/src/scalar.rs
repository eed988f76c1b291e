//! Scalar abstraction shared by every numerical routine.
//!
//! [`Real`] is implemented for `f32`, `f64` and the MPFR-backed [`Mp`]. Complex
//! values are `num_complex::Complex<R>`; the transcendental functions the
//! generic `Complex` type only offers for `num_traits::Float` live on
//! [`ComplexExt`].
//!
//! Every `Mp` carries its precision. A binary operation returns the smaller of
//! the two operand precisions. Values built by `Zero::zero`, `One::one` and
//! [`Real::exact`] are flagged exact and adopt the precision of whatever they
//! meet, so generic code that writes `R::one()` does not silently truncate.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Assign, Float, Integer};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

thread_local! {
    static THREAD_PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION) };
}

/// Precision used when an operation has only exact operands.
pub fn thread_precision() -> u32 {
    THREAD_PRECISION.with(|p| p.get())
}

/// Runs `f` with the thread fallback precision set to `bits`.
pub fn with_thread_precision<T>(bits: u32, f: impl FnOnce() -> T) -> T {
    let old = THREAD_PRECISION.with(|p| p.replace(bits));
    let out = f();
    THREAD_PRECISION.with(|p| p.set(old));
    out
}

/// Real scalar with the elementary functions needed by this crate.
pub trait Real:
    Num
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Mantissa bits carried by this value.
    fn prec(&self) -> u32;
    fn from_f64_prec(x: f64, prec: u32) -> Self;
    fn from_i64_prec(n: i64, prec: u32) -> Self;
    fn from_bigint_prec(n: &BigInt, prec: u32) -> Self;
    fn pi_prec(prec: u32) -> Self;
    /// Small integer that adopts the precision of the values it is combined with.
    fn exact(n: i64) -> Self;

    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    /// `self * 2^e`.
    fn ldexp(&self, e: i32) -> Self;
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;
    /// Rounds to `prec` bits (f64 ignores this).
    fn round_prec(&self, prec: u32) -> Self;
    /// True for values that adopt the precision of their partners.
    fn is_exact(&self) -> bool {
        false
    }
    /// Decimal scientific notation with `digits` significant digits.
    fn to_sci(&self, digits: usize) -> String;

    fn lit(&self, x: f64) -> Self {
        Self::from_f64_prec(x, self.prec())
    }
    fn int(&self, n: i64) -> Self {
        Self::from_i64_prec(n, self.prec())
    }
    fn ratio(&self, num: i64, den: i64) -> Self {
        self.int(num) / self.int(den)
    }
    fn big(&self, n: &BigInt) -> Self {
        Self::from_bigint_prec(n, self.prec())
    }
    fn rational(&self, r: &BigRational) -> Self {
        self.big(r.numer()) / self.big(r.denom())
    }
    fn pi(&self) -> Self {
        Self::pi_prec(self.prec())
    }
    fn zero_like(&self) -> Self {
        self.int(0)
    }
    fn one_like(&self) -> Self {
        self.int(1)
    }
    /// Comparison tolerance `2^(16 - prec)`.
    fn tol(&self) -> Self {
        self.one_like().ldexp(16 - self.prec() as i32)
    }
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }
}

macro_rules! impl_real_prim {
    ($t:ty, $bits:expr) => {
        impl Real for $t {
            fn prec(&self) -> u32 {
                $bits
            }
            fn from_f64_prec(x: f64, _: u32) -> Self {
                x as $t
            }
            fn from_i64_prec(n: i64, _: u32) -> Self {
                n as $t
            }
            fn from_bigint_prec(n: &BigInt, _: u32) -> Self {
                n.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn pi_prec(_: u32) -> Self {
                std::f64::consts::PI as $t
            }
            fn exact(n: i64) -> Self {
                n as $t
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn atan2(&self, x: &Self) -> Self {
                <$t>::atan2(*self, *x)
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn powi(&self, n: i32) -> Self {
                <$t>::powi(*self, n)
            }
            fn ldexp(&self, e: i32) -> Self {
                *self * (2.0 as $t).powi(e)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
            fn round_prec(&self, _: u32) -> Self {
                *self
            }
            fn to_sci(&self, digits: usize) -> String {
                format!("{:.*e}", digits.saturating_sub(1), self)
            }
        }
    };
}

impl_real_prim!(f64, 53);
impl_real_prim!(f32, 24);

/// MPFR float with its precision and an exactness flag.
#[derive(Clone)]
pub struct Mp {
    v: Float,
    exact: bool,
}

fn bigint_to_integer(n: &BigInt) -> Integer {
    let (sign, digits) = n.to_u32_digits();
    let mut out = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        out = -out;
    }
    out
}

impl Mp {
    pub fn new(prec: u32) -> Self {
        Mp { v: Float::new(prec), exact: false }
    }
    pub fn from_float(v: Float) -> Self {
        Mp { v, exact: false }
    }
    pub fn as_float(&self) -> &Float {
        &self.v
    }
    pub fn into_float(self) -> Float {
        self.v
    }
    /// Parses a decimal string at the given precision.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        let parsed = Float::parse(s).ok()?;
        Some(Mp::from_float(Float::with_val(prec, parsed)))
    }
    /// Full decimal expansion justified by the precision.
    pub fn to_decimal(&self) -> String {
        let digits = (self.v.prec() as f64 * std::f64::consts::LOG10_2).floor() as usize;
        self.v.to_string_radix(10, Some(digits.max(1)))
    }

    fn binary_prec(a: &Mp, b: &Mp) -> (u32, bool) {
        match (a.exact, b.exact) {
            (true, true) => (thread_precision().max(a.v.prec()).max(b.v.prec()), true),
            (true, false) => (b.v.prec(), false),
            (false, true) => (a.v.prec(), false),
            (false, false) => (a.v.prec().min(b.v.prec()), false),
        }
    }

    fn unary_prec(&self) -> u32 {
        if self.exact {
            thread_precision().max(self.v.prec())
        } else {
            self.v.prec()
        }
    }
}

macro_rules! mp_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl<'a> $tr<&'a Mp> for &'a Mp {
            type Output = Mp;
            fn $m(self, rhs: &'a Mp) -> Mp {
                let (prec, both_exact) = Mp::binary_prec(self, rhs);
                let (v, ord) = Float::with_val_round(prec, &self.v $op &rhs.v, Round::Nearest);
                Mp { v, exact: both_exact && ord == Ordering::Equal }
            }
        }
        impl $tr<Mp> for Mp {
            type Output = Mp;
            fn $m(self, rhs: Mp) -> Mp {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Mp> for Mp {
            type Output = Mp;
            fn $m(self, rhs: &'a Mp) -> Mp {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Mp> for &'a Mp {
            type Output = Mp;
            fn $m(self, rhs: Mp) -> Mp {
                self.$m(&rhs)
            }
        }
        impl<'a> $atr<&'a Mp> for Mp {
            fn $am(&mut self, rhs: &'a Mp) {
                if !self.exact && !rhs.exact && self.v.prec() <= rhs.v.prec() {
                    $atr::$am(&mut self.v, &rhs.v);
                } else {
                    *self = (&*self).$m(rhs);
                }
            }
        }
        impl $atr<Mp> for Mp {
            fn $am(&mut self, rhs: Mp) {
                self.$am(&rhs);
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign, +);
mp_binop!(Sub, sub, SubAssign, sub_assign, -);
mp_binop!(Mul, mul, MulAssign, mul_assign, *);
mp_binop!(Div, div, DivAssign, div_assign, /);

impl Rem for Mp {
    type Output = Mp;
    fn rem(self, rhs: Mp) -> Mp {
        let (prec, both_exact) = Mp::binary_prec(&self, &rhs);
        let (v, ord) = Float::with_val_round(prec, &self.v % &rhs.v, Round::Nearest);
        Mp { v, exact: both_exact && ord == Ordering::Equal }
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp { v: -self.v, exact: self.exact }
    }
}

impl<'a> Neg for &'a Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp { v: Float::with_val(self.v.prec(), -&self.v), exact: self.exact }
    }
}

impl PartialEq for Mp {
    fn eq(&self, other: &Mp) -> bool {
        self.v == other.v
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Mp) -> Option<Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

impl Zero for Mp {
    fn zero() -> Mp {
        Mp { v: Float::new(64), exact: true }
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

impl One for Mp {
    fn one() -> Mp {
        Mp { v: Float::with_val(64, 1), exact: true }
    }
}

impl Num for Mp {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> Result<Mp, ()> {
        let parsed = Float::parse_radix(s, radix as i32).map_err(|_| ())?;
        Ok(Mp::from_float(Float::with_val(thread_precision(), parsed)))
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.to_sci(20), self.v.prec())
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => f.write_str(&self.to_sci(d + 1)),
            None => f.write_str(&self.to_sci(20)),
        }
    }
}

impl Real for Mp {
    fn prec(&self) -> u32 {
        self.v.prec()
    }
    fn from_f64_prec(x: f64, prec: u32) -> Mp {
        Mp::from_float(Float::with_val(prec, x))
    }
    fn from_i64_prec(n: i64, prec: u32) -> Mp {
        Mp::from_float(Float::with_val(prec, n))
    }
    fn from_bigint_prec(n: &BigInt, prec: u32) -> Mp {
        Mp::from_float(Float::with_val(prec, bigint_to_integer(n)))
    }
    fn pi_prec(prec: u32) -> Mp {
        Mp::from_float(Float::with_val(prec, Constant::Pi))
    }
    fn exact(n: i64) -> Mp {
        Mp { v: Float::with_val(64, n), exact: true }
    }
    fn sqrt(&self) -> Mp {
        Mp::from_float(Float::with_val(self.unary_prec(), self.v.sqrt_ref()))
    }
    fn exp(&self) -> Mp {
        Mp::from_float(Float::with_val(self.unary_prec(), self.v.exp_ref()))
    }
    fn ln(&self) -> Mp {
        Mp::from_float(Float::with_val(self.unary_prec(), self.v.ln_ref()))
    }
    fn sin(&self) -> Mp {
        Mp::from_float(Float::with_val(self.unary_prec(), self.v.sin_ref()))
    }
    fn cos(&self) -> Mp {
        Mp::from_float(Float::with_val(self.unary_prec(), self.v.cos_ref()))
    }
    fn atan2(&self, x: &Mp) -> Mp {
        let (prec, _) = Mp::binary_prec(self, x);
        Mp::from_float(Float::with_val(prec, self.v.atan2_ref(&x.v)))
    }
    fn abs(&self) -> Mp {
        Mp { v: self.v.clone().abs(), exact: self.exact }
    }
    fn floor(&self) -> Mp {
        Mp { v: self.v.clone().floor(), exact: self.exact }
    }
    fn powi(&self, n: i32) -> Mp {
        Mp::from_float(Float::with_val(self.unary_prec(), (&self.v).pow(n)))
    }
    fn ldexp(&self, e: i32) -> Mp {
        let mut v = self.v.clone();
        v <<= e;
        Mp { v, exact: self.exact }
    }
    fn to_f64(&self) -> f64 {
        self.v.to_f64()
    }
    fn is_finite(&self) -> bool {
        self.v.is_finite()
    }
    fn is_exact(&self) -> bool {
        self.exact
    }
    fn round_prec(&self, prec: u32) -> Mp {
        let mut v = Float::new(prec);
        v.assign(&self.v);
        Mp::from_float(v)
    }
    fn to_sci(&self, digits: usize) -> String {
        if !self.v.is_finite() || self.v.is_zero() {
            return format!("{:.*e}", digits.saturating_sub(1), self.v.to_f64());
        }
        // MPFR renders as d.ddd...e<exp>; normalise to Rust's `1.23e4` style.
        let s = self.v.to_string_radix(10, Some(digits.max(1)));
        let (mant, exp) = match s.find('e') {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().unwrap_or(0)),
            None => (s.as_str(), 0),
        };
        let neg = mant.starts_with('-');
        let mant = mant.trim_start_matches('-');
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        let all: String = format!("{int_part}{frac_part}");
        let lead = all.trim_start_matches('0');
        let shift = int_part.len() as i64 - 1 - (all.len() - lead.len()) as i64;
        let mut digits_str: String = lead.chars().take(digits.max(1)).collect();
        while digits_str.len() < digits.max(1) {
            digits_str.push('0');
        }
        let body = if digits_str.len() > 1 {
            format!("{}.{}", &digits_str[..1], &digits_str[1..])
        } else {
            digits_str
        };
        format!("{}{}e{}", if neg { "-" } else { "" }, body, exp + shift)
    }
}

/// Complex operations beyond the field arithmetic of `num_complex::Complex`.
pub trait ComplexExt<R: Real>: Sized {
    fn from_re(re: R) -> Self;
    fn lit(&self, re: f64, im: f64) -> Self;
    fn prec(&self) -> u32;
    fn abs(&self) -> R;
    fn arg(&self) -> R;
    /// Principal logarithm, `-π < Im ≤ π`.
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    /// Principal square root, `Re ≥ 0`.
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn cot(&self) -> Self;
    fn powi(&self, n: i64) -> Self;
    fn recip(&self) -> Self;
    fn scale(&self, r: &R) -> Self;
    fn mul_i(&self) -> Self;
    fn i_like(&self) -> Self;
    fn to_c64(&self) -> Complex<f64>;
    /// Both parts rounded to `prec` bits.
    fn round_prec(&self, prec: u32) -> Self;
    /// `re² + im²`.
    fn norm2(&self) -> R;
}

impl<R: Real> ComplexExt<R> for Complex<R> {
    fn from_re(re: R) -> Self {
        let im = re.zero_like();
        Complex::new(re, im)
    }
    fn lit(&self, re: f64, im: f64) -> Self {
        Complex::new(self.re.lit(re), self.re.lit(im))
    }
    fn prec(&self) -> u32 {
        match (self.re.is_exact(), self.im.is_exact()) {
            (true, false) => self.im.prec(),
            (false, true) => self.re.prec(),
            _ => self.re.prec().min(self.im.prec()),
        }
    }
    fn abs(&self) -> R {
        let a = self.re.abs();
        let b = self.im.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return big;
        }
        let t = small / big.clone();
        big * (t.sq() + t.one_like()).sqrt()
    }
    fn arg(&self) -> R {
        self.im.atan2(&self.re)
    }
    fn ln(&self) -> Self {
        Complex::new(ComplexExt::abs(self).ln(), self.arg())
    }
    fn exp(&self) -> Self {
        let m = self.re.exp();
        Complex::new(m.clone() * self.im.cos(), m * self.im.sin())
    }
    fn sqrt(&self) -> Self {
        let zero = self.re.zero_like();
        if self.re.is_zero() && self.im.is_zero() {
            return Complex::new(zero.clone(), zero);
        }
        let r = ComplexExt::abs(self);
        let half = self.re.ratio(1, 2);
        let a = ((r.clone() + self.re.abs()) * half).sqrt();
        let b = self.im.abs() / (a.clone() + a.clone());
        if self.re >= zero {
            let im = if self.im < zero { -b } else { b };
            Complex::new(a, im)
        } else {
            let im = if self.im < zero { -a } else { a };
            Complex::new(b, im)
        }
    }
    fn sin(&self) -> Self {
        // sin(x+iy) = sin x cosh y + i cos x sinh y
        let ey = self.im.exp();
        let emy = ey.one_like() / ey.clone();
        let half = ey.ratio(1, 2);
        let ch = (ey.clone() + emy.clone()) * half.clone();
        let sh = (ey - emy) * half;
        Complex::new(self.re.sin() * ch, self.re.cos() * sh)
    }
    fn cos(&self) -> Self {
        let ey = self.im.exp();
        let emy = ey.one_like() / ey.clone();
        let half = ey.ratio(1, 2);
        let ch = (ey.clone() + emy.clone()) * half.clone();
        let sh = (ey - emy) * half;
        Complex::new(self.re.cos() * ch, -(self.re.sin() * sh))
    }
    fn cot(&self) -> Self {
        // i (e^{2iz} + 1)/(e^{2iz} - 1), stable on either half plane
        let one = Complex::from_re(self.re.one_like());
        let two_iz = ComplexExt::scale(&self.mul_i(), &self.re.int(2));
        if self.im >= self.im.zero_like() {
            let e = two_iz.exp();
            ((e.clone() + one.clone()) / (e - one)).mul_i()
        } else {
            let e = (-two_iz).exp();
            (-((one.clone() + e.clone()) / (one - e))).mul_i()
        }
    }
    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { ComplexExt::recip(self) } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Complex::from_re(self.re.one_like());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    fn recip(&self) -> Self {
        let d = self.re.sq() + self.im.sq();
        Complex::new(self.re.clone() / d.clone(), -(self.im.clone() / d))
    }
    fn scale(&self, r: &R) -> Self {
        Complex::new(self.re.clone() * r.clone(), self.im.clone() * r.clone())
    }
    fn mul_i(&self) -> Self {
        Complex::new(-self.im.clone(), self.re.clone())
    }
    fn i_like(&self) -> Self {
        Complex::new(self.re.zero_like(), self.re.one_like())
    }
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
    fn round_prec(&self, prec: u32) -> Self {
        Complex::new(self.re.round_prec(prec), self.im.round_prec(prec))
    }
    fn norm2(&self) -> R {
        self.re.sq() + self.im.sq()
    }
}

/// Builds a complex number at the given precision from f64 parts.
pub fn cx<R: Real>(re: f64, im: f64, prec: u32) -> Complex<R> {
    Complex::new(R::from_f64_prec(re, prec), R::from_f64_prec(im, prec))
}

/// Parses decimal real and imaginary parts at the given precision.
pub fn cx_parse(re: &str, im: &str, prec: u32) -> Option<Complex<Mp>> {
    Some(Complex::new(Mp::parse(re, prec)?, Mp::parse(im, prec)?))
}

/// `2^(16 - prec)` as an f64, for quick comparisons.
pub fn tol_f64(prec: u32) -> f64 {
    2f64.powi(16 - prec as i32)
}
