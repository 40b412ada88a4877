use std::fmt;

use super::{ArithError, QMatrix, QuadScalar};

/// A finite sum `sum_k c_k * sqrt(rho_k)` with `c_k`, `rho_k` in `Q(sqrt D)`
/// and every `rho_k > 0`.
///
/// Radicands are kept in pairwise distinct square classes of the base field
/// and a radicand that is itself a square is folded into the coefficient of
/// the class of 1. Square roots of elements in distinct square classes are
/// linearly independent over the base field, so `is_zero` is exact.
#[derive(Clone, Debug, Default)]
pub struct Surd {
    root: u64,
    terms: Vec<(QuadScalar, QuadScalar)>,
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_scalar(c: QuadScalar) -> Self {
        let mut s = Self { root: c.root(), terms: Vec::new() };
        if !c.is_zero() {
            s.terms.push((QuadScalar::one(), c));
        }
        s
    }

    /// `coeff * sqrt(radicand)`.
    pub fn term(coeff: QuadScalar, radicand: QuadScalar) -> Result<Self, ArithError> {
        if !radicand.is_positive() {
            return Err(ArithError::NonPositiveRadicand);
        }
        let mut s = Self { root: join(coeff.root(), radicand.root())?, terms: Vec::new() };
        s.push(radicand, coeff)?;
        Ok(s)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(radicand, coefficient)` pairs in canonical form.
    pub fn terms(&self) -> &[(QuadScalar, QuadScalar)] {
        &self.terms
    }

    /// The value as a field element, if no genuine surd remains.
    pub fn to_scalar(&self) -> Option<QuadScalar> {
        match self.terms.as_slice() {
            [] => Some(QuadScalar::zero()),
            [(r, c)] if r.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(r, c)| c.to_f64() * r.to_f64().sqrt()).sum()
    }

    fn push(&mut self, radicand: QuadScalar, coeff: QuadScalar) -> Result<(), ArithError> {
        if coeff.is_zero() {
            return Ok(());
        }
        let root = join(self.root, join(radicand.root(), coeff.root())?)?;
        if root != self.root {
            self.root = root;
            for (r, c) in std::mem::take(&mut self.terms) {
                self.push(r, c)?;
            }
        }
        if let Some(s) = radicand.sqrt_in_field(self.root) {
            return self.push_class(QuadScalar::one(), coeff.checked_mul(&s)?);
        }
        for k in 0..self.terms.len() {
            let ratio = radicand.checked_div(&self.terms[k].0)?;
            if let Some(t) = ratio.sqrt_in_field(self.root) {
                let add = coeff.checked_mul(&t)?;
                return self.push_class_at(k, add);
            }
        }
        self.terms.push((radicand, coeff));
        Ok(())
    }

    fn push_class(&mut self, radicand: QuadScalar, coeff: QuadScalar) -> Result<(), ArithError> {
        match self.terms.iter().position(|(r, _)| *r == radicand) {
            Some(k) => self.push_class_at(k, coeff),
            None => {
                self.terms.push((radicand, coeff));
                Ok(())
            }
        }
    }

    fn push_class_at(&mut self, k: usize, coeff: QuadScalar) -> Result<(), ArithError> {
        let c = self.terms[k].1.checked_add(&coeff)?;
        if c.is_zero() {
            self.terms.remove(k);
        } else {
            self.terms[k].1 = c;
        }
        Ok(())
    }

    /// Re-merges classes after the base field became known.
    fn canonicalise(self) -> Result<Self, ArithError> {
        let mut out = Self { root: self.root, terms: Vec::new() };
        for (r, c) in self.terms {
            out.push(r, c)?;
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        let root = join(self.root, other.root)?;
        let mut out = if root != self.root {
            Self { root, terms: self.terms.clone() }.canonicalise()?
        } else {
            self.clone()
        };
        for (r, c) in &other.terms {
            out.push(r.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_neg(&self) -> Self {
        Self { root: self.root, terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect() }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.checked_add(&other.checked_neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        let root = join(self.root, other.root)?;
        let mut out = Self { root, terms: Vec::new() };
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                out.push(r1.checked_mul(r2)?, c1.checked_mul(c2)?)?;
            }
        }
        Ok(out)
    }

    pub fn mul_scalar(&self, k: &QuadScalar) -> Result<Self, ArithError> {
        self.checked_mul(&Self::from_scalar(k.clone()))
    }

    pub fn equals_scalar(&self, x: &QuadScalar) -> Result<bool, ArithError> {
        Ok(self.checked_sub(&Self::from_scalar(x.clone()))?.is_zero())
    }
}

fn join(a: u64, b: u64) -> Result<u64, ArithError> {
    match (a, b) {
        (0, r) | (r, 0) => Ok(r),
        (r, s) if r == s => Ok(r),
        (r, s) => Err(ArithError::MismatchedRoot(r, s)),
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.checked_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, c)| if r.is_one() { format!("({c})") } else { format!("({c})*sqrt({r})") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Dense matrix of [`Surd`] entries; used to evaluate products of
/// [`super::ScaledMatrix`] values exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SurdMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Surd>,
}

impl SurdMatrix {
    pub fn from_qmatrix(m: &QMatrix) -> Self {
        let data = m.entries().map(|x| Surd::from_scalar(x.clone())).collect();
        Self { rows: m.rows(), cols: m.cols(), data }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<Surd, ArithError>,
    ) -> Result<Self, ArithError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j)?);
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Surd {
        &self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ArithError> {
        if self.cols != other.rows {
            return Err(ArithError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Surd::zero();
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.checked_add(&a.checked_mul(b)?)?;
            }
            Ok(acc)
        })
    }

    /// Exact comparison with a field matrix.
    pub fn equals(&self, m: &QMatrix) -> Result<bool, ArithError> {
        if self.rows != m.rows() || self.cols != m.cols() {
            return Ok(false);
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).equals_scalar(&m[(i, j)])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Converts back to a field matrix when every entry is in the field.
    pub fn to_qmatrix(&self) -> Option<QMatrix> {
        let rows = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_scalar()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        QMatrix::from_rows(rows).ok()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64()).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, Rational};

    fn q2(a: i64, b: i64) -> QuadScalar {
        QuadScalar::new(int(a), int(b), 2).unwrap()
    }

    #[test]
    fn squares_fold_into_field() {
        let half = QuadScalar::frac(1, 2);
        let s = Surd::term(QuadScalar::one(), half.clone()).unwrap();
        let sq = s.checked_mul(&s).unwrap();
        assert_eq!(sq.to_scalar(), Some(half));
        // sqrt(8) = 2 sqrt 2 in Q(sqrt 2)
        let t = Surd::term(QuadScalar::one(), QuadScalar::from_int(8)).unwrap();
        assert!(t.checked_sub(&Surd::from_scalar(q2(0, 2))).unwrap().is_zero());
    }

    #[test]
    fn independent_classes_do_not_cancel() {
        let a = Surd::term(QuadScalar::one(), QuadScalar::from_int(3)).unwrap();
        let b = Surd::term(QuadScalar::one(), QuadScalar::from_int(5)).unwrap();
        assert!(!a.checked_sub(&b).unwrap().is_zero());
        // sqrt(3) * sqrt(12) = 6
        let c = Surd::term(QuadScalar::one(), QuadScalar::from_int(12)).unwrap();
        assert_eq!(a.checked_mul(&c).unwrap().to_scalar(), Some(QuadScalar::from_int(6)));
    }

    #[test]
    fn quadratic_radicands() {
        // sqrt(3 + 2 sqrt2) = 1 + sqrt 2
        let s = Surd::term(QuadScalar::one(), q2(3, 2)).unwrap();
        assert_eq!(s.to_scalar(), Some(q2(1, 1)));
        // sqrt(4 + 2 sqrt2) is not in the field but squares back
        let t = Surd::term(QuadScalar::one(), q2(4, 2)).unwrap();
        assert!(t.to_scalar().is_none());
        assert_eq!(t.checked_mul(&t).unwrap().to_scalar(), Some(q2(4, 2)));
        let _ = Rational::from_integer(1.into());
    }

    #[test]
    fn late_field_detection_merges_classes() {
        // sqrt(2) written as a rational radicand, then sqrt(2) as a field element
        let a = Surd::term(QuadScalar::one(), QuadScalar::from_int(2)).unwrap();
        let b = Surd::from_scalar(q2(0, 1));
        assert!(a.checked_sub(&b).unwrap().is_zero());
    }
}
