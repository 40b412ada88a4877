//! Exact scalar and matrix arithmetic.
//!
//! Everything here is exact: rationals are arbitrary precision, irrational
//! entries live in a single quadratic field `Q(sqrt D)`, and square roots that
//! appear through normalisation are carried symbolically (see [`ScaledMatrix`]
//! and [`Surd`]). No floating point is used except in the explicit `to_f64`
//! mirrors consumed by the enumeration and density code.

mod matrix;
mod quad;
mod scaled;
mod surd;

pub use matrix::QMatrix;
pub use quad::{scalar_arith, QuadScalar, ScalarOp};
pub use scaled::{congruence_check, ScaledEntry, ScaledMatrix};
pub use surd::{Surd, SurdMatrix};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary precision rational; always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched quadratic extensions: sqrt({0}) vs sqrt({1})")]
    MismatchedRoot(u64, u64),
    #[error("{0} is not a squarefree integer >= 2")]
    BadRoot(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("radicand must be a positive real number")]
    NonPositiveRadicand,
    #[error("result is not representable with factored square-root scales")]
    NotRepresentable,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"` or `"p/q"` (optional leading `-`, surrounding whitespace
/// ignored). A zero denominator is an error.
pub fn parse_rational(text: &str) -> Result<Rational, ArithError> {
    let err = || ArithError::Parse(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // huge numerators or denominators: fall back to a scaled division
        let n = x.numer().to_string();
        let d = x.denom().to_string();
        n.parse::<f64>().unwrap_or(f64::NAN) / d.parse::<f64>().unwrap_or(f64::NAN)
    })
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Non-negative rational square root, if `x` is the square of a rational.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    let n = int_sqrt_exact(x.numer())?;
    let d = int_sqrt_exact(x.denom())?;
    Some(Rational::new(n, d))
}

pub fn is_squarefree(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= n {
        if n % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

pub(crate) fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}
