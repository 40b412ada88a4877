use serde::{Deserialize, Serialize};

use super::{ArithError, QMatrix, QuadScalar, Surd, SurdMatrix};

/// `diag(sqrt(left)) * core * diag(sqrt(right))` with positive radicands.
///
/// Square roots introduced by normalising a form to `+-1` stay factored in
/// the radicand vectors, so every identity can still be decided exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledMatrix {
    left_roots: Vec<QuadScalar>,
    core: QMatrix,
    right_roots: Vec<QuadScalar>,
}

/// One coordinate of [`ScaledMatrix::apply`]: `value * sqrt(root)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledEntry {
    pub value: QuadScalar,
    pub root: QuadScalar,
}

impl ScaledEntry {
    /// `value^2 * root`, always a field element.
    pub fn squared(&self) -> QuadScalar {
        &(&self.value * &self.value) * &self.root
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64() * self.root.to_f64().sqrt()
    }
}

impl ScaledMatrix {
    pub fn new(left_roots: Vec<QuadScalar>, core: QMatrix, right_roots: Vec<QuadScalar>) -> Result<Self, ArithError> {
        if left_roots.len() != core.rows() || right_roots.len() != core.cols() {
            return Err(ArithError::Dimension("root vector length does not match core".into()));
        }
        if left_roots.iter().chain(&right_roots).any(|r| !r.is_positive()) {
            return Err(ArithError::NonPositiveRadicand);
        }
        Ok(Self { left_roots, core, right_roots })
    }

    pub fn from_core(core: QMatrix) -> Self {
        let (r, c) = (core.rows(), core.cols());
        Self { left_roots: vec![QuadScalar::one(); r], core, right_roots: vec![QuadScalar::one(); c] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_core(QMatrix::identity(n))
    }

    pub fn rows(&self) -> usize {
        self.core.rows()
    }

    pub fn cols(&self) -> usize {
        self.core.cols()
    }

    pub fn core(&self) -> &QMatrix {
        &self.core
    }

    pub fn left_roots(&self) -> &[QuadScalar] {
        &self.left_roots
    }

    pub fn right_roots(&self) -> &[QuadScalar] {
        &self.right_roots
    }

    /// True when no radicand differs from 1.
    pub fn is_unscaled(&self) -> bool {
        self.left_roots.iter().chain(&self.right_roots).all(QuadScalar::is_one)
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<Surd, ArithError> {
        let c = &self.core[(i, j)];
        if c.is_zero() {
            return Ok(Surd::zero());
        }
        Surd::term(c.clone(), self.left_roots[i].checked_mul(&self.right_roots[j])?)
    }

    pub fn to_surd_matrix(&self) -> Result<SurdMatrix, ArithError> {
        SurdMatrix::from_fn(self.rows(), self.cols(), |i, j| self.entry(i, j))
    }

    /// The matrix itself when every entry lies in the base field.
    pub fn to_qmatrix(&self) -> Option<QMatrix> {
        self.to_surd_matrix().ok()?.to_qmatrix()
    }

    pub fn transpose(&self) -> Self {
        Self {
            left_roots: self.right_roots.clone(),
            core: self.core.transpose(),
            right_roots: self.left_roots.clone(),
        }
    }

    /// Product, provided the inner radicands multiply to squares.
    pub fn mul(&self, other: &Self) -> Result<Self, ArithError> {
        if self.cols() != other.rows() {
            return Err(ArithError::Dimension("scaled matrix product".into()));
        }
        let field = self.core.root()?.max(other.core.root()?);
        let mut mid = Vec::with_capacity(self.cols());
        for (a, b) in self.right_roots.iter().zip(&other.left_roots) {
            let p = a.checked_mul(b)?;
            mid.push(p.sqrt_in_field(field).ok_or(ArithError::NotRepresentable)?);
        }
        let scaled = self.core.mul(&QMatrix::diag(&mid))?;
        Ok(Self {
            left_roots: self.left_roots.clone(),
            core: scaled.mul(&other.core)?,
            right_roots: other.right_roots.clone(),
        })
    }

    pub fn inverse(&self) -> Result<Self, ArithError> {
        let inv = |v: &[QuadScalar]| v.iter().map(QuadScalar::inverse).collect::<Result<Vec<_>, _>>();
        Ok(Self { left_roots: inv(&self.right_roots)?, core: self.core.inverse()?, right_roots: inv(&self.left_roots)? })
    }

    /// Applies the matrix to a field vector. Each output coordinate is a
    /// single scaled field element; mixing column radicands of different
    /// square classes in one row is reported as not representable.
    pub fn apply(&self, v: &[QuadScalar]) -> Result<Vec<ScaledEntry>, ArithError> {
        if v.len() != self.cols() {
            return Err(ArithError::Dimension(format!("{} columns, vector of length {}", self.cols(), v.len())));
        }
        let mut out = Vec::with_capacity(self.rows());
        for i in 0..self.rows() {
            let mut acc = Surd::zero();
            for (j, x) in v.iter().enumerate() {
                let c = self.core[(i, j)].checked_mul(x)?;
                if !c.is_zero() {
                    acc = acc.checked_add(&Surd::term(c, self.right_roots[j].clone())?)?;
                }
            }
            let acc = acc.checked_mul(&Surd::term(QuadScalar::one(), self.left_roots[i].clone())?)?;
            out.push(single_term(&acc)?);
        }
        Ok(out)
    }

    pub fn to_f64_rows(&self) -> Result<Vec<Vec<f64>>, ArithError> {
        Ok(self.to_surd_matrix()?.to_f64_rows())
    }
}

fn single_term(s: &Surd) -> Result<ScaledEntry, ArithError> {
    match s.terms() {
        [] => Ok(ScaledEntry { value: QuadScalar::zero(), root: QuadScalar::one() }),
        [(rho, c)] => Ok(ScaledEntry { value: c.clone(), root: rho.clone() }),
        _ => Err(ArithError::NotRepresentable),
    }
}

/// Decides `G^T * B * G == A` exactly, i.e. `A(x) = B(G x)` for all `x`.
pub fn congruence_check(a: &QMatrix, g: &ScaledMatrix, b: &QMatrix) -> Result<bool, ArithError> {
    if !a.is_square() || !b.is_square() || g.rows() != b.rows() || g.cols() != a.rows() {
        return Err(ArithError::Dimension(format!(
            "A {}x{}, G {}x{}, B {}x{}",
            a.rows(),
            a.cols(),
            g.rows(),
            g.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let gs = g.to_surd_matrix()?;
    let prod = gs.transpose().mul(&SurdMatrix::from_qmatrix(b))?.mul(&gs)?;
    prod.equals(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn s2(k: i64) -> QuadScalar {
        QuadScalar::from_int(k)
    }

    #[test]
    fn identity_apply() {
        let v = vec![s2(3), QuadScalar::frac(1, 2)];
        let out = ScaledMatrix::identity(2).apply(&v).unwrap();
        assert_eq!(out.iter().map(|e| e.value.clone()).collect::<Vec<_>>(), v);
        assert!(out.iter().all(|e| e.root.is_one()));
    }

    #[test]
    fn sqrt2_scaling_apply() {
        let g = ScaledMatrix::new(vec![s2(2), s2(2)], QMatrix::identity(2), vec![s2(1), s2(1)]).unwrap();
        let out = g.apply(&[s2(1), s2(1)]).unwrap();
        for e in &out {
            assert_eq!(e.value, s2(1));
            assert_eq!(e.root, s2(2));
            assert_eq!(e.squared(), s2(2));
        }
    }

    #[test]
    fn eta3_shaped_block() {
        // (1/sqrt2) [[1,-1],[1,1]] applied to (1,0) is (1/sqrt2, 1/sqrt2)
        let half = QuadScalar::frac(1, 2);
        let g = ScaledMatrix::new(
            vec![half.clone(), half.clone()],
            QMatrix::from_int_rows(&[vec![1, -1], vec![1, 1]]),
            vec![s2(1), s2(1)],
        )
        .unwrap();
        let out = g.apply(&[s2(1), s2(0)]).unwrap();
        for e in &out {
            assert_eq!(e.squared(), half);
            assert!((e.to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn congruence_examples() {
        let i2 = QMatrix::identity(2);
        assert!(congruence_check(&i2, &ScaledMatrix::identity(2), &i2).unwrap());

        let a = QMatrix::diag_int(&[2, -2]);
        let b = QMatrix::diag_int(&[1, -1]);
        let g = ScaledMatrix::new(vec![s2(2), s2(2)], QMatrix::identity(2), vec![s2(1), s2(1)]).unwrap();
        assert!(congruence_check(&a, &g, &b).unwrap());
        assert!(!congruence_check(&b, &g, &b).unwrap());

        // rotation by 45 degrees with 1/sqrt2 entries is orthogonal
        let half = QuadScalar::frac(1, 2);
        let rot = ScaledMatrix::new(
            vec![half.clone(), half],
            QMatrix::from_int_rows(&[vec![1, -1], vec![1, 1]]),
            vec![s2(1), s2(1)],
        )
        .unwrap();
        assert!(congruence_check(&i2, &rot, &i2).unwrap());
        let _ = (int(0), rat(1, 1));
    }

    #[test]
    fn inverse_round_trip() {
        let g = ScaledMatrix::new(
            vec![s2(3), s2(1)],
            QMatrix::from_int_rows(&[vec![1, 2], vec![0, 1]]),
            vec![s2(1), s2(5)],
        )
        .unwrap();
        let prod = g.mul(&g.inverse().unwrap()).unwrap();
        assert_eq!(prod.to_qmatrix().unwrap(), QMatrix::identity(2));
    }

    #[test]
    fn dimension_mismatch() {
        let a = QMatrix::identity(3);
        assert!(congruence_check(&a, &ScaledMatrix::identity(2), &QMatrix::identity(2)).is_err());
        assert!(ScaledMatrix::identity(2).apply(&[s2(1)]).is_err());
    }
}
