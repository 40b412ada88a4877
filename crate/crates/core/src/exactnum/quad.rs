use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_rational, is_squarefree, parse_rational, rational_sqrt, rational_to_f64, ArithError, Rational};

/// An element `a + b*sqrt(D)` of a real quadratic field.
///
/// `root` is `D` when `b != 0` and `0` when the value is rational, so purely
/// rational values combine with any field. Two values with nonzero `b` and
/// different `D` cannot be combined.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: Rational,
    b: Rational,
    root: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Field arithmetic with explicit errors for division by zero and
/// mismatched extensions.
pub fn scalar_arith(x: &QuadScalar, y: &QuadScalar, op: ScalarOp) -> Result<QuadScalar, ArithError> {
    match op {
        ScalarOp::Add => x.checked_add(y),
        ScalarOp::Sub => x.checked_sub(y),
        ScalarOp::Mul => x.checked_mul(y),
        ScalarOp::Div => x.checked_div(y),
    }
}

impl QuadScalar {
    pub fn new(a: Rational, b: Rational, root: u64) -> Result<Self, ArithError> {
        if b.is_zero() {
            return Ok(Self::rational(a));
        }
        if !is_squarefree(root) {
            return Err(ArithError::BadRoot(root));
        }
        Ok(Self { a, b, root })
    }

    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), root: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(super::int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(super::rat(n, d))
    }

    /// `sqrt(D)` itself.
    pub fn sqrt_of(root: u64) -> Result<Self, ArithError> {
        Self::new(Rational::zero(), Rational::one(), root)
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// `D`, or 0 when the value is rational.
    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn join_root(&self, other: &Self) -> Result<u64, ArithError> {
        match (self.root, other.root) {
            (0, r) | (r, 0) => Ok(r),
            (r, s) if r == s => Ok(r),
            (r, s) => Err(ArithError::MismatchedRoot(r, s)),
        }
    }

    fn build(a: Rational, b: Rational, root: u64) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            Self { a, b, root }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        let root = self.join_root(other)?;
        Ok(Self::build(&self.a + &other.a, &self.b + &other.b, root))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        let root = self.join_root(other)?;
        Ok(Self::build(&self.a - &other.a, &self.b - &other.b, root))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        if self.b.is_zero() && other.b.is_zero() {
            return Ok(Self::rational(&self.a * &other.a));
        }
        let root = self.join_root(other)?;
        let d = Rational::from_integer(root.into());
        let a = &self.a * &other.a + &self.b * &other.b * d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::build(a, b, root))
    }

    /// Field norm `a^2 - D b^2`.
    pub fn norm(&self) -> Rational {
        let d = Rational::from_integer(self.root.into());
        &self.a * &self.a - &self.b * &self.b * d
    }

    pub fn conjugate(&self) -> Self {
        Self::build(self.a.clone(), -self.b.clone(), self.root)
    }

    pub fn inverse(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(Self::rational(self.a.recip()));
        }
        let n = self.norm();
        Ok(Self::build(&self.a / &n, -(&self.b / &n), self.root))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ArithError> {
        if self.b.is_zero() && other.b.is_zero() {
            if other.a.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            return Ok(Self::rational(&self.a / &other.a));
        }
        self.join_root(other)?;
        self.checked_mul(&other.inverse()?)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::build(&self.a * k, &self.b * k, self.root)
    }

    /// Exact sign of the real number `a + b sqrt(D)`.
    pub fn sign(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with D b^2
        let d = Rational::from_integer(self.root.into());
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * d;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = rational_to_f64(&self.a);
        if self.b.is_zero() {
            a
        } else {
            a + rational_to_f64(&self.b) * (self.root as f64).sqrt()
        }
    }

    /// Positive square root inside `Q(sqrt(field_root))`, when it exists.
    ///
    /// `field_root` may be 0 (search only in `Q`); a nonzero `self.root` must
    /// agree with it.
    pub fn sqrt_in_field(&self, field_root: u64) -> Option<Self> {
        let root = if self.root != 0 { self.root } else { field_root };
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(Self::rational(r));
            }
            if root == 0 {
                return None;
            }
            // a = D v^2
            let v = rational_sqrt(&(&self.a / Rational::from_integer(root.into())))?;
            return Some(Self::build(Rational::zero(), v, root));
        }
        // (u + v sqrt D)^2 = u^2 + D v^2 + 2uv sqrt D
        let n = rational_sqrt(&self.norm())?;
        let two = Rational::from_integer(2.into());
        for cand in [(&self.a + &n) / &two, (&self.a - &n) / &two] {
            if let Some(u) = rational_sqrt(&cand) {
                if u.is_zero() {
                    continue;
                }
                let v = &self.b / (&two * &u);
                let r = Self::build(u, v, root);
                return Some(if r.is_negative() { -r } else { r });
            }
        }
        None
    }

    /// Rational part of the representation relative to `sqrt(D)`; for a
    /// rational value this is the value itself.
    pub fn parts(&self) -> (Rational, Rational) {
        (self.a.clone(), self.b.clone())
    }
}

impl Default for QuadScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for QuadScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for QuadScalar {
    fn from(r: Rational) -> Self {
        Self::rational(r)
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", format_rational(&self.a))
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", format_rational(&self.b), self.root)
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {} {}*sqrt({})", format_rational(&self.a), sign, format_rational(&self.b.abs()), self.root)
        }
    }
}

// Operator sugar. Mixing two distinct extensions inside matrix code is an
// invariant breach, so these panic; use the `checked_*` methods at API edges.
macro_rules! forward_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QuadScalar> for &QuadScalar {
            type Output = QuadScalar;
            fn $m(self, rhs: &QuadScalar) -> QuadScalar {
                self.$checked(rhs).expect(concat!("QuadScalar ", stringify!($m)))
            }
        }
        impl $tr<QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $m(self, rhs: QuadScalar) -> QuadScalar {
                (&self).$checked(&rhs).expect(concat!("QuadScalar ", stringify!($m)))
            }
        }
        impl $tr<&QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $m(self, rhs: &QuadScalar) -> QuadScalar {
                (&self).$checked(rhs).expect(concat!("QuadScalar ", stringify!($m)))
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar::build(-self.a.clone(), -self.b.clone(), self.root)
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Text(String),
    Int(i64),
    Quad { a: RatRepr, b: RatRepr, sqrt: u64 },
}

/// A rational part: `"p/q"` text or a JSON integer.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Text(String),
    Int(i64),
}

impl RatRepr {
    fn parse(&self) -> Result<Rational, ArithError> {
        match self {
            RatRepr::Text(t) => parse_rational(t),
            RatRepr::Int(n) => Ok(Rational::from_integer((*n).into())),
        }
    }
}

impl Serialize for QuadScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.b.is_zero() {
            ScalarRepr::Text(format_rational(&self.a)).serialize(s)
        } else {
            ScalarRepr::Quad {
                a: RatRepr::Text(format_rational(&self.a)),
                b: RatRepr::Text(format_rational(&self.b)),
                sqrt: self.root,
            }.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for QuadScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match ScalarRepr::deserialize(d)? {
            ScalarRepr::Text(t) => parse_rational(&t).map(QuadScalar::rational).map_err(D::Error::custom),
            ScalarRepr::Int(n) => Ok(QuadScalar::from_int(n)),
            ScalarRepr::Quad { a, b, sqrt } => {
                let a = a.parse().map_err(D::Error::custom)?;
                let b = b.parse().map_err(D::Error::custom)?;
                QuadScalar::new(a, b, sqrt).map_err(D::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn q(a: Rational, b: Rational) -> QuadScalar {
        QuadScalar::new(a, b, 2).unwrap()
    }

    #[test]
    fn norm_identity() {
        let x = q(int(1), int(1));
        let y = q(int(1), int(-1));
        assert_eq!(scalar_arith(&x, &y, ScalarOp::Mul).unwrap(), QuadScalar::from_int(-1));
    }

    #[test]
    fn zero_plus_rational() {
        let x = q(int(0), int(0));
        let y = q(rat(3, 2), int(0));
        assert_eq!(scalar_arith(&x, &y, ScalarOp::Add).unwrap(), QuadScalar::frac(3, 2));
    }

    #[test]
    fn inverse_of_one_plus_sqrt2() {
        // (1 + sqrt2)(a + b sqrt2) = (a + 2b) + (a + b) sqrt2 = 1  =>  b = 1, a = -1
        let x = q(int(1), int(1));
        assert_eq!(x.inverse().unwrap(), q(int(-1), int(1)));
        assert_eq!(scalar_arith(&QuadScalar::one(), &x, ScalarOp::Div).unwrap(), q(int(-1), int(1)));
    }

    #[test]
    fn errors() {
        let x = q(int(1), int(1));
        assert_eq!(scalar_arith(&x, &QuadScalar::zero(), ScalarOp::Div), Err(ArithError::DivisionByZero));
        let y = QuadScalar::new(int(0), int(1), 3).unwrap();
        assert_eq!(scalar_arith(&x, &y, ScalarOp::Add), Err(ArithError::MismatchedRoot(2, 3)));
        assert!(QuadScalar::new(int(0), int(1), 4).is_err());
    }

    #[test]
    fn signs() {
        assert!(q(int(-1), int(1)).is_positive());
        assert!(q(int(2), int(-2)).is_negative());
        assert!(q(int(3), int(-2)).is_positive());
        assert_eq!(QuadScalar::zero().sign(), Ordering::Equal);
    }

    #[test]
    fn field_square_roots() {
        // (1 + sqrt2)^2 = 3 + 2 sqrt2
        let s = q(int(3), int(2)).sqrt_in_field(2).unwrap();
        assert_eq!(s, q(int(1), int(1)));
        assert_eq!(QuadScalar::from_int(8).sqrt_in_field(2).unwrap(), q(int(0), int(2)));
        assert_eq!(QuadScalar::from_int(8).sqrt_in_field(0), None);
        assert_eq!(q(int(4), int(2)).sqrt_in_field(2), None);
        assert_eq!(QuadScalar::from_int(-1).sqrt_in_field(2), None);
    }

    #[test]
    fn json_round_trip() {
        let x = q(rat(1, 2), int(-3));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"a":"1/2","b":"-3","sqrt":2}"#);
        assert_eq!(serde_json::from_str::<QuadScalar>(&s).unwrap(), x);
        assert_eq!(serde_json::to_string(&QuadScalar::frac(-7, 3)).unwrap(), r#""-7/3""#);
        assert!(serde_json::from_str::<QuadScalar>(r#""1/0""#).is_err());
    }
}
