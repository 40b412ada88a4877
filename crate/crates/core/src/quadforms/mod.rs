//! Quadratic forms, linear maps and the three density hypotheses.
//!
//! Gram convention: `Q(x) = x^T A x`, so the coefficient of `x_i x_j`
//! (`i != j`) is `2 A_ij`. A hyperbolic term `2 x_1 x_d` enters as
//! `A_1d = A_d1 = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{ArithError, QMatrix, QuadScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("linear map has rank {rank}, expected {s}")]
    RankDeficient { rank: usize, s: usize },
    #[error("subspace basis has dependent columns")]
    DependentBasis,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QMatrix", into = "QMatrix")]
pub struct QuadraticForm {
    gram: QMatrix,
}

impl QuadraticForm {
    pub fn new(gram: QMatrix) -> Result<Self, FormError> {
        if !gram.is_square() || !gram.is_symmetric() {
            return Err(FormError::NotSymmetric);
        }
        gram.root()?;
        Ok(Self { gram })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self, FormError> {
        Self::new(QMatrix::from_int_rows(rows))
    }

    pub fn diag_int(entries: &[i64]) -> Self {
        Self { gram: QMatrix::diag_int(entries) }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn eval(&self, x: &[QuadScalar]) -> Result<QuadScalar, ArithError> {
        let ax = self.gram.mul_vec(x)?;
        x.iter().zip(&ax).try_fold(QuadScalar::zero(), |acc, (a, b)| acc.checked_add(&a.checked_mul(b)?))
    }

    pub fn is_rational(&self) -> bool {
        self.gram.is_rational()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.rank() == self.dim()
    }
}

impl TryFrom<QMatrix> for QuadraticForm {
    type Error = FormError;
    fn try_from(m: QMatrix) -> Result<Self, FormError> {
        Self::new(m)
    }
}

impl From<QuadraticForm> for QMatrix {
    fn from(q: QuadraticForm) -> QMatrix {
        q.gram
    }
}

/// `s x d` matrix of full row rank; row `i` holds the coefficients of `L_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QMatrix", into = "QMatrix")]
pub struct LinearMap {
    rows: QMatrix,
}

impl LinearMap {
    pub fn new(rows: QMatrix) -> Result<Self, FormError> {
        rows.root()?;
        let rank = rows.rank();
        if rank != rows.rows() {
            return Err(FormError::RankDeficient { rank, s: rows.rows() });
        }
        Ok(Self { rows })
    }

    /// `M_0(x) = (x_1, ..., x_s)`.
    pub fn leading(s: usize, d: usize) -> Self {
        let mut rows = QMatrix::zeros(s, d);
        for i in 0..s {
            rows[(i, i)] = QuadScalar::one();
        }
        Self { rows }
    }

    pub fn s(&self) -> usize {
        self.rows.rows()
    }

    pub fn dim(&self) -> usize {
        self.rows.cols()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.rows
    }

    pub fn is_rational(&self) -> bool {
        self.rows.is_rational()
    }
}

impl TryFrom<QMatrix> for LinearMap {
    type Error = FormError;
    fn try_from(m: QMatrix) -> Result<Self, FormError> {
        Self::new(m)
    }
}

impl From<LinearMap> for QMatrix {
    fn from(m: LinearMap) -> QMatrix {
        m.rows
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub rank: usize,
}

impl Signature {
    pub fn is_indefinite(&self) -> bool {
        self.p > 0 && self.q > 0
    }
}

/// Sylvester signature by symmetric Gaussian elimination.
pub fn signature(q: &QuadraticForm) -> Signature {
    signature_of(q.gram())
}

/// [`signature`] for a bare symmetric matrix.
pub fn signature_of(gram: &QMatrix) -> Signature {
    let mut a = gram.clone();
    let mut live: Vec<usize> = (0..a.rows()).collect();
    let (mut p, mut q) = (0, 0);
    while !live.is_empty() {
        if let Some(pos) = live.iter().position(|&k| !a[(k, k)].is_zero()) {
            let k = live.remove(pos);
            let piv = a[(k, k)].clone();
            if piv.is_positive() {
                p += 1;
            } else {
                q += 1;
            }
            let inv = piv.inverse().expect("nonzero pivot");
            for &i in &live {
                let f = &a[(i, k)] * &inv;
                if f.is_zero() {
                    continue;
                }
                for &j in &live {
                    let t = &f * &a[(k, j)];
                    a[(i, j)] = &a[(i, j)] - &t;
                }
            }
            continue;
        }
        // zero diagonal: any nonzero entry spans a hyperbolic plane
        let Some((i, j)) = live
            .iter()
            .flat_map(|&i| live.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && !a[(i, j)].is_zero())
        else {
            break;
        };
        p += 1;
        q += 1;
        live.retain(|&k| k != i && k != j);
        let inv = a[(i, j)].inverse().expect("nonzero entry");
        // Schur complement of [[0,b],[b,0]]
        let cols: Vec<(QuadScalar, QuadScalar)> =
            live.iter().map(|&r| (a[(r, i)].clone(), a[(r, j)].clone())).collect();
        for (x, &r) in live.iter().enumerate() {
            for (y, &c) in live.iter().enumerate() {
                let t = &(&(&cols[x].0 * &cols[y].1) + &(&cols[x].1 * &cols[y].0)) * &inv;
                a[(r, c)] = &a[(r, c)] - &t;
            }
        }
    }
    Signature { p, q, rank: p + q }
}

/// Basis of `ker M` as the columns of a `d x (d - s)` matrix.
pub fn kernel_basis(m: &LinearMap) -> QMatrix {
    m.matrix().nullspace_matrix()
}

/// Restriction `B^T A B` of `q` to the column span of `basis`.
pub fn restrict(q: &QuadraticForm, basis: &QMatrix) -> Result<QuadraticForm, FormError> {
    if basis.rows() != q.dim() {
        return Err(FormError::Dimension(format!("basis has {} rows, form has dimension {}", basis.rows(), q.dim())));
    }
    if basis.rank() != basis.cols() {
        return Err(FormError::DependentBasis);
    }
    QuadraticForm::new(q.gram().congruent(basis)?)
}

/// Evaluation of the three hypotheses on `(Q, M)`, plus evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub d: usize,
    pub s: usize,
    /// `d > 2s`.
    pub dim_ok: bool,
    pub restricted_signature: Signature,
    pub rank_restricted: usize,
    /// `rank(Q|ker M) > 2`.
    pub rank_ok: bool,
    pub indefinite_restricted: bool,
    /// No nonzero combination of the rows of `M` is rational.
    pub irrationality_ok: bool,
    pub q_rational: bool,
    pub q_nondegenerate: bool,
    pub q_signature: Signature,
    pub overall: bool,
}

impl ConditionReport {
    /// Names of the failed checks, in order.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.dim_ok {
            out.push("d > 2s");
        }
        if !self.rank_ok {
            out.push("rank(Q|ker M) > 2");
        }
        if !self.indefinite_restricted {
            out.push("Q|ker M indefinite");
        }
        if !self.irrationality_ok {
            out.push("no rational combination of M");
        }
        out
    }
}

/// True when the real row span of `m` contains a nonzero rational covector.
///
/// A rational `c` lies in the row span iff it annihilates `ker M`. With
/// `K = K_A + sqrt(D) K_B` that means `c^T K_A = c^T K_B = 0`.
pub fn has_rational_combination(m: &LinearMap) -> bool {
    let k = kernel_basis(m);
    let (ka, kb) = k.rational_parts();
    let stacked = ka.transpose().stack(&kb.transpose()).expect("same column count");
    stacked.rank() < m.dim()
}

pub fn check_conditions(q: &QuadraticForm, m: &LinearMap) -> Result<ConditionReport, FormError> {
    if q.dim() != m.dim() {
        return Err(FormError::Dimension(format!("Q has dimension {}, M has {} columns", q.dim(), m.dim())));
    }
    let (d, s) = (q.dim(), m.s());
    let restricted = restrict(q, &kernel_basis(m))?;
    let sig = signature(&restricted);
    let q_signature = signature(q);
    let dim_ok = d > 2 * s;
    let rank_ok = sig.rank > 2;
    let indefinite_restricted = sig.is_indefinite();
    let irrationality_ok = !has_rational_combination(m);
    Ok(ConditionReport {
        d,
        s,
        dim_ok,
        restricted_signature: sig,
        rank_restricted: sig.rank,
        rank_ok,
        indefinite_restricted,
        irrationality_ok,
        q_rational: q.is_rational(),
        q_nondegenerate: q_signature.rank == d,
        q_signature,
        overall: dim_ok && rank_ok && indefinite_restricted && irrationality_ok,
    })
}

#[cfg(test)]
mod tests;
