//! Cached exact integer sequences: Bernoulli numbers, Stirling numbers of the
//! second kind, factorials and binomials.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Append-only caches guarded for read-mostly sharing between threads.
#[derive(Default)]
pub struct SequenceCache {
    bernoulli: RwLock<Vec<BigRational>>,
    stirling2: RwLock<Vec<Vec<BigInt>>>,
    factorials: RwLock<Vec<BigInt>>,
}

impl SequenceCache {
    pub fn global() -> &'static SequenceCache {
        static CACHE: OnceLock<SequenceCache> = OnceLock::new();
        CACHE.get_or_init(SequenceCache::default)
    }

    /// B_0 .. B_n (B_1 = −1/2); even indices come from integer tangent numbers.
    fn extend_bernoulli(&self, n: usize) {
        let mut cache = self.bernoulli.write().unwrap();
        if cache.len() > n {
            return;
        }
        let n = n.max(2 * cache.len());
        let half = n / 2;
        let mut t: Vec<BigInt> = Vec::with_capacity(half + 1);
        t.push(BigInt::zero());
        let mut f = BigInt::one();
        for k in 1..=half {
            t.push(f.clone());
            f *= BigInt::from(k);
        }
        for k in 2..=half {
            for j in k..=half {
                t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
            }
        }
        let mut out = vec![BigRational::zero(); n + 1];
        out[0] = BigRational::one();
        if n >= 1 {
            out[1] = BigRational::new(BigInt::from(-1), BigInt::from(2));
        }
        for k in 1..=half {
            let p4 = BigInt::one() << (2 * k);
            let num = &t[k] * BigInt::from(2 * k);
            let den = &p4 * (&p4 - BigInt::one());
            let b = BigRational::new(num, den);
            out[2 * k] = if k % 2 == 1 { b } else { -b };
        }
        *cache = out;
    }

    pub fn bernoulli(&self, n: usize) -> BigRational {
        if n > 1 && n % 2 == 1 {
            return BigRational::zero();
        }
        if let Some(b) = self.bernoulli.read().unwrap().get(n) {
            return b.clone();
        }
        self.extend_bernoulli((n + 16).next_multiple_of(32));
        self.bernoulli.read().unwrap()[n].clone()
    }

    pub fn stirling2(&self, n: usize, r: usize) -> BigInt {
        if r > n {
            return BigInt::zero();
        }
        if let Some(row) = self.stirling2.read().unwrap().get(n) {
            return row[r].clone();
        }
        let mut tri = self.stirling2.write().unwrap();
        if tri.is_empty() {
            tri.push(vec![BigInt::one()]);
        }
        while tri.len() <= n {
            let k = tri.len() - 1;
            let prev = &tri[k];
            let mut next = vec![BigInt::zero(); k + 2];
            for r in 1..=k + 1 {
                let keep = if r <= k { &prev[r] * BigInt::from(r) } else { BigInt::zero() };
                next[r] = &prev[r - 1] + keep;
            }
            tri.push(next);
        }
        tri[n][r].clone()
    }

    pub fn factorial(&self, n: usize) -> BigInt {
        if let Some(f) = self.factorials.read().unwrap().get(n) {
            return f.clone();
        }
        let mut f = self.factorials.write().unwrap();
        if f.is_empty() {
            f.push(BigInt::one());
        }
        while f.len() <= n {
            let k = f.len();
            let next = &f[k - 1] * BigInt::from(k);
            f.push(next);
        }
        f[n].clone()
    }
}

/// Exact Bernoulli number with B_1 = −1/2; odd n > 1 give 0.
pub fn bernoulli(n: i64) -> Result<BigRational> {
    if n < 0 {
        return Err(Error::Domain(format!("Bernoulli index {n} is negative")));
    }
    Ok(SequenceCache::global().bernoulli(n as usize))
}

/// Stirling number of the second kind; zero when r > n.
pub fn stirling2(n: usize, r: usize) -> BigInt {
    SequenceCache::global().stirling2(n, r)
}

pub fn factorial(n: usize) -> BigInt {
    SequenceCache::global().factorial(n)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact generalized binomial C(−s−1/2, j).
pub fn binom_half_exact(s: u64, j: u64) -> BigRational {
    let top = BigRational::new(-BigInt::from(2 * s + 1), BigInt::from(2));
    let mut acc = BigRational::one();
    for i in 0..j {
        acc = acc * (&top - BigRational::from_integer(BigInt::from(i)));
        acc = acc / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

/// C(−s−1/2, j) at the given precision.
pub fn binom_half<R: Real>(s: u64, j: u64, prec: u32) -> R {
    rational_to::<R>(&binom_half_exact(s, j), prec)
}

/// Γ(s + 1/2) = (2s)! √π / (4^s s!).
pub fn gamma_half<R: Real>(s: u64, prec: u32) -> R {
    let num = factorial(2 * s as usize);
    let den = BigInt::from(4).pow(s as u32) * factorial(s as usize);
    let pi = R::pi_prec(prec);
    rational_to::<R>(&BigRational::new(num, den), prec) * pi.sqrt()
}

pub fn rational_to<R: Real>(r: &BigRational, prec: u32) -> R {
    R::from_bigint_prec(r.numer(), prec) / R::from_bigint_prec(r.denom(), prec)
}

/// B_{2ℓ}/(2ℓ)! exactly.
pub fn bernoulli_over_factorial(two_l: usize) -> BigRational {
    SequenceCache::global().bernoulli(two_l) / BigRational::from_integer(factorial(two_l))
}

/// Reduced fraction check used by callers that build `BigRational`s by hand.
pub fn is_reduced(r: &BigRational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

type RealTable = Arc<dyn Any + Send + Sync>;

/// Per-(type, precision) memo of a table of reals derived from exact data.
///
/// `build` receives the precision and must be deterministic for a given `tag`.
pub fn cached_reals<R: Real>(
    tag: &'static str,
    prec: u32,
    min_len: usize,
    build: impl Fn(u32, usize) -> Vec<R>,
) -> Arc<Vec<R>> {
    static TABLES: OnceLock<RwLock<HashMap<(&'static str, TypeId, u32), RealTable>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    let key = (tag, TypeId::of::<R>(), prec);
    if let Some(t) = tables.read().unwrap().get(&key) {
        let t = t.clone().downcast::<Vec<R>>().expect("table type is keyed by TypeId");
        if t.len() >= min_len {
            return t;
        }
    }
    let len = min_len.next_power_of_two().max(16);
    let table = Arc::new(build(prec, len));
    tables.write().unwrap().insert(key, table.clone());
    table
}
