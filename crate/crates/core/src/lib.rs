//! Partial-fraction coefficients of `∏_{j≤N} (1 − q^j)^{-1}`: exact residues at
//! small scale, and their asymptotic expansions through dilogarithm zeros and
//! the saddle-point method.
//!
//! Numerical routines are generic over [`Real`]; the aliases below fix the two
//! scalar types used in practice.

pub mod asymptotics;
pub mod dilog;
pub mod error;
pub mod residues;
pub mod scalar;
pub mod sequences;
pub mod series;
pub mod sine_products;

pub use error::{Error, Result};
pub use scalar::{ComplexExt, Mp, Real};
pub use series::{Coeff, TruncatedSeries};

/// Arbitrary-precision real.
pub type HpReal = Mp;
/// Arbitrary-precision complex.
pub type HpComplex = num_complex::Complex<Mp>;
/// Double-precision complex.
pub type C64 = num_complex::Complex<f64>;
