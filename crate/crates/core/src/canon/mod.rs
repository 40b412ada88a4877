//! Reduction of `(Q, M)` to the canonical pair `(Q_0, M_0)`.
//!
//! Coordinates of the canonical pair, 1-based, with `d = s + r + n + m`:
//!
//! ```text
//! x_1 .. x_m            paired with x_{s+r+n+i} by the term 2 x_i x_{s+r+n+i}
//! x_{m+1} .. x_s        middle form of signature (p', q')
//! x_{s+1} .. x_{s+r}    +x_i^2
//! x_{s+r+1} .. x_{s+r+n} -x_i^2
//! ```
//!
//! The change of variables is built directly from the geometry of `ker M`:
//! its radical `R` (dimension `m`), an orthogonal basis of a complement `W`
//! of `R` in `ker M`, hyperbolic partners of `R` inside `W^perp`, and what is
//! left of `W^perp`. With `P` the matrix whose columns are these vectors in
//! canonical order, `P^T A P = Q_0` and `M P = [g_s | 0]`, so `g_d = P^{-1}`.

pub mod corpus;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{congruence_check, ArithError, QMatrix, QuadScalar, ScaledMatrix, SurdMatrix};
use crate::quadforms::{signature, FormError, LinearMap, QuadraticForm, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("Q is degenerate (rank {rank} < {d})")]
    Degenerate { rank: usize, d: usize },
    #[error("Q|ker M is not indefinite: it has {r} positive and {n} negative squares")]
    NotIndefinite { r: usize, n: usize },
    #[error("the linear form is zero")]
    ZeroMap,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub d: usize,
    pub s: usize,
    pub m: usize,
    pub p_prime: usize,
    pub q_prime: usize,
    pub r: usize,
    pub n: usize,
    /// Gram of the form in `x_{m+1} .. x_s`, as produced.
    pub middle_form: QuadraticForm,
}

impl CanonicalParams {
    /// Gram matrix of `Q_0`.
    pub fn target_gram(&self) -> QMatrix {
        let (s, r, n, m) = (self.s, self.r, self.n, self.m);
        let mut g = QMatrix::zeros(self.d, self.d);
        g.set_block(m, m, self.middle_form.gram());
        for i in 0..m {
            g[(i, s + r + n + i)] = QuadScalar::one();
            g[(s + r + n + i, i)] = QuadScalar::one();
        }
        for i in s..s + r {
            g[(i, i)] = QuadScalar::one();
        }
        for i in s + r..s + r + n {
            g[(i, i)] = QuadScalar::from_int(-1);
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalCertificate {
    pub g_d: ScaledMatrix,
    pub g_s: ScaledMatrix,
    pub params: CanonicalParams,
}

type Vector = Vec<QuadScalar>;

fn bil(a: &QMatrix, u: &[QuadScalar], v: &[QuadScalar]) -> QuadScalar {
    let av = a.mul_vec(v).expect("dimension");
    u.iter().zip(&av).fold(QuadScalar::zero(), |acc, (x, y)| &acc + &(x * y))
}

fn axpy(y: &[QuadScalar], k: &QuadScalar, x: &[QuadScalar]) -> Vector {
    y.iter().zip(x).map(|(a, b)| a + &(k * b)).collect()
}

fn combine(basis: &[Vector], coeffs: &[QuadScalar], d: usize) -> Vector {
    let mut out = vec![QuadScalar::zero(); d];
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            out = axpy(&out, c, b);
        }
    }
    out
}

/// Orthogonal basis of the span of `vs` with respect to `a`; the span must
/// be nondegenerate. Returns `(vector, a(vector, vector))`.
pub(crate) fn orthogonalise(a: &QMatrix, mut vs: Vec<Vector>) -> Vec<(Vector, QuadScalar)> {
    let mut out = Vec::new();
    while !vs.is_empty() {
        let k = match vs.iter().position(|v| !bil(a, v, v).is_zero()) {
            Some(k) => k,
            None => {
                // all isotropic: u + v is anisotropic for any pair with a(u,v) != 0
                let (i, j) = (0..vs.len())
                    .flat_map(|i| (i + 1..vs.len()).map(move |j| (i, j)))
                    .find(|&(i, j)| !bil(a, &vs[i], &vs[j]).is_zero())
                    .expect("nondegenerate span");
                vs[i] = axpy(&vs[i], &QuadScalar::one(), &vs[j]);
                i
            }
        };
        let u = vs.remove(k);
        let lambda = bil(a, &u, &u);
        let inv = lambda.inverse().expect("anisotropic");
        for v in vs.iter_mut() {
            let c = &bil(a, v, &u) * &inv;
            if !c.is_zero() {
                *v = axpy(v, &-&c, &u);
            }
        }
        out.push((u, lambda));
    }
    out
}

/// The pieces of `R^d` from which the change of variables is assembled.
struct Decomposition {
    /// Hyperbolic partners: `a(f_i, e_j) = delta_ij`, `a(f_i, f_j) = 0`.
    f: Vec<Vector>,
    /// Orthogonal to `f`, `e` and `w`.
    mid: Vec<Vector>,
    positive: Vec<(Vector, QuadScalar)>,
    negative: Vec<(Vector, QuadScalar)>,
    /// Radical of `Q|ker M`.
    e: Vec<Vector>,
}

fn decompose(a: &QMatrix, m: &QMatrix) -> Decomposition {
    let d = a.rows();
    let kernel = m.nullspace();
    let k = QMatrix::from_columns(&kernel, d);
    let gk = a.congruent(&k).expect("dimension");
    let rad = gk.nullspace();
    let e: Vec<Vector> = rad.iter().map(|c| k.mul_vec(c).expect("dimension")).collect();

    // complement of the radical inside ker M, from kernel basis vectors
    let mut span = QMatrix::from_columns(&rad, kernel.len());
    let mut w = Vec::new();
    for (j, kj) in kernel.iter().enumerate() {
        let mut unit = vec![QuadScalar::zero(); kernel.len()];
        unit[j] = QuadScalar::one();
        let trial = QMatrix::from_columns(&[span.transpose().to_rows(), vec![unit]].concat(), kernel.len());
        if trial.rank() > span.cols() {
            span = trial;
            w.push(kj.clone());
        }
    }
    let (positive, negative): (Vec<_>, Vec<_>) =
        orthogonalise(a, w).into_iter().partition(|(_, l)| l.is_positive());

    let w_rows: Vec<Vector> = positive.iter().chain(&negative).map(|(v, _)| v.clone()).collect();
    let v_space = if w_rows.is_empty() {
        QMatrix::identity(d).to_rows()
    } else {
        QMatrix::from_rows(w_rows).and_then(|wt| wt.mul(a)).expect("dimension").nullspace()
    };

    // partners of the radical inside W^perp
    let ev = |vecs: &[Vector]| -> QMatrix {
        let rows: Vec<Vector> = vecs.iter().map(|x| v_space.iter().map(|v| bil(a, x, v)).collect()).collect();
        QMatrix::from_rows(rows).expect("rectangular")
    };
    let pairing = ev(&e);
    let mut f: Vec<Vector> = (0..e.len())
        .map(|i| {
            let mut rhs = vec![QuadScalar::zero(); e.len()];
            rhs[i] = QuadScalar::one();
            let c = pairing.solve(&rhs).expect("radical pairs nondegenerately with W^perp");
            combine(&v_space, &c, d)
        })
        .collect();
    let half = QuadScalar::frac(1, 2);
    let fixed: Vec<Vector> = f
        .iter()
        .map(|fi| {
            let mut out = fi.clone();
            for (fj, ej) in f.iter().zip(&e) {
                let c = &half * &bil(a, fi, fj);
                if !c.is_zero() {
                    out = axpy(&out, &-&c, ej);
                }
            }
            out
        })
        .collect();
    f = fixed;

    let mid = if e.is_empty() {
        v_space.clone()
    } else {
        let constraints = ev(&[e.clone(), f.clone()].concat());
        constraints.nullspace().iter().map(|c| combine(&v_space, c, d)).collect()
    };
    Decomposition { f, mid, positive, negative, e }
}

/// `g_d = P^{-1}` for `P = P_core * diag(1/sqrt(scale))`.
fn inverse_with_scales(columns: &[Vector], scales: Vec<QuadScalar>) -> Result<ScaledMatrix, CanonError> {
    let d = scales.len();
    let core = QMatrix::from_columns(columns, d).inverse()?;
    Ok(ScaledMatrix::new(scales, core, vec![QuadScalar::one(); d])?)
}

fn check_nondegenerate(q: &QuadraticForm) -> Result<(), CanonError> {
    let rank = q.gram().rank();
    if rank != q.dim() {
        return Err(CanonError::Degenerate { rank, d: q.dim() });
    }
    Ok(())
}

pub fn reduce_pair(q: &QuadraticForm, m: &LinearMap) -> Result<CanonicalCertificate, CanonError> {
    if q.dim() != m.dim() {
        return Err(CanonError::Dimension(format!("Q has dimension {}, M has {} columns", q.dim(), m.dim())));
    }
    check_nondegenerate(q)?;
    let a = q.gram();
    let (d, s) = (q.dim(), m.s());
    let dec = decompose(a, m.matrix());
    let (r, n) = (dec.positive.len(), dec.negative.len());
    if r == 0 || n == 0 {
        return Err(CanonError::NotIndefinite { r, n });
    }
    let mut columns: Vec<Vector> = dec.f.iter().chain(&dec.mid).cloned().collect();
    let mut scales = vec![QuadScalar::one(); s];
    for (v, l) in dec.positive.iter().chain(&dec.negative) {
        columns.push(v.clone());
        scales.push(l.abs());
    }
    columns.extend(dec.e.iter().cloned());
    scales.extend(std::iter::repeat(QuadScalar::one()).take(dec.e.len()));
    let g_d = inverse_with_scales(&columns, scales)?;
    let g_s = ScaledMatrix::from_core(m.matrix().mul(&QMatrix::from_columns(&columns[..s], d))?);
    let middle = QuadraticForm::new(a.congruent(&QMatrix::from_columns(&dec.mid, d))?)?;
    let Signature { p: p_prime, q: q_prime, .. } = signature(&middle);
    let params = CanonicalParams { d, s, m: dec.e.len(), p_prime, q_prime, r, n, middle_form: middle };
    Ok(CanonicalCertificate { g_d, g_s, params })
}

/// Decides `Q(x) = Q_0(g_d x)` and `M(x) = g_s M_0(g_d x)` exactly, for
/// an arbitrary target pair `(Q_0, M_0)`.
pub fn verify_equivalence(
    q: &QMatrix,
    m: &QMatrix,
    g_d: &ScaledMatrix,
    g_s: &ScaledMatrix,
    q0: &QMatrix,
    m0: &QMatrix,
) -> Result<bool, ArithError> {
    let d = q.rows();
    let s = m.rows();
    let shapes = g_d.rows() == d
        && g_d.cols() == d
        && g_s.rows() == s
        && g_s.cols() == s
        && q0.rows() == d
        && m0.rows() == s
        && m0.cols() == d
        && m.cols() == d;
    if !shapes || g_d.core().rank() != d || g_s.core().rank() != s {
        return Ok(false);
    }
    if !congruence_check(q, g_d, q0)? {
        return Ok(false);
    }
    let rhs = g_s.to_surd_matrix()?.mul(&SurdMatrix::from_qmatrix(m0))?.mul(&g_d.to_surd_matrix()?)?;
    rhs.equals(m)
}

pub fn verify_certificate(q: &QuadraticForm, m: &LinearMap, cert: &CanonicalCertificate) -> bool {
    let p = &cert.params;
    if p.d != q.dim() || p.s != m.s() || p.m + p.s + p.r + p.n != p.d || p.middle_form.dim() != p.s - p.m.min(p.s) {
        return false;
    }
    let m0 = LinearMap::leading(p.s, p.d);
    verify_equivalence(q.gram(), m.matrix(), &cert.g_d, &cert.g_s, &p.target_gram(), m0.matrix()).unwrap_or(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingleCase {
    /// `(sum x_i^2 - sum x_i^2, x_1)`, `rank(Q|ker L) = d - 1`.
    #[serde(rename = "1a")]
    OneA,
    /// `(sum x_i^2 - sum x_i^2, x_d)`, `rank(Q|ker L) = d - 1`.
    #[serde(rename = "1b")]
    OneB,
    /// `(2 x_1 x_d + sum x_i^2 - sum x_i^2, x_1)`, `rank(Q|ker L) = d - 2`.
    #[serde(rename = "2")]
    Two,
}

impl SingleCase {
    pub fn tag(self) -> &'static str {
        match self {
            SingleCase::OneA => "1a",
            SingleCase::OneB => "1b",
            SingleCase::Two => "2",
        }
    }

    /// `rank(Q|ker L)` for a form in `d` variables in this case.
    pub fn restricted_rank(self, d: usize) -> usize {
        match self {
            SingleCase::Two => d - 2,
            _ => d - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleReduction {
    pub case: SingleCase,
    pub g_d: ScaledMatrix,
    pub g_s: ScaledMatrix,
    pub target_form: QuadraticForm,
    pub target_map: QMatrix,
}

impl SingleReduction {
    pub fn verify(&self, q: &QuadraticForm, l: &LinearMap) -> bool {
        verify_equivalence(q.gram(), l.matrix(), &self.g_d, &self.g_s, self.target_form.gram(), &self.target_map)
            .unwrap_or(false)
    }
}

/// Normal form of a single nonzero linear form against a nondegenerate `Q`.
pub fn reduce_single(q: &QuadraticForm, l: &LinearMap) -> Result<SingleReduction, CanonError> {
    if l.s() != 1 || l.dim() != q.dim() {
        return Err(CanonError::Dimension(format!("expected one form in {} variables", q.dim())));
    }
    check_nondegenerate(q)?;
    let a = q.gram();
    let d = q.dim();
    let dec = decompose(a, l.matrix());
    let (r, n) = (dec.positive.len(), dec.negative.len());
    let w = dec.positive.iter().chain(&dec.negative);
    let mut diag = vec![1i64; r];
    diag.extend(std::iter::repeat(-1).take(n));
    let unit_row = |k: usize| {
        let mut row = QMatrix::zeros(1, d);
        row[(0, k)] = QuadScalar::one();
        row
    };

    if let ([f], [e]) = (dec.f.as_slice(), dec.e.as_slice()) {
        let mut columns = vec![f.clone()];
        let mut scales = vec![QuadScalar::one()];
        for (v, lam) in w {
            columns.push(v.clone());
            scales.push(lam.abs());
        }
        columns.push(e.clone());
        scales.push(QuadScalar::one());
        let g_d = inverse_with_scales(&columns, scales)?;
        let g_s = ScaledMatrix::from_core(l.matrix().mul(&QMatrix::from_columns(&columns[..1], d))?);
        let mut target = QMatrix::zeros(d, d);
        target.set_block(1, 1, &QMatrix::diag_int(&diag));
        target[(0, d - 1)] = QuadScalar::one();
        target[(d - 1, 0)] = QuadScalar::one();
        return Ok(SingleReduction {
            case: SingleCase::Two,
            g_d,
            g_s,
            target_form: QuadraticForm::new(target)?,
            target_map: unit_row(0),
        });
    }

    let v = dec.mid.first().ok_or(CanonError::ZeroMap)?;
    let c = bil(a, v, v);
    let lv = l.matrix().mul_vec(v)?[0].clone();
    let g_s = ScaledMatrix::new(vec![QuadScalar::one()], QMatrix::diag(&[lv]), vec![c.abs().inverse()?])?;
    let mut columns = Vec::new();
    let mut scales = Vec::new();
    let positive = c.is_positive();
    if positive {
        columns.push(v.clone());
        scales.push(c.clone());
        diag.insert(0, 1);
    }
    for (x, lam) in w {
        columns.push(x.clone());
        scales.push(lam.abs());
    }
    if !positive {
        columns.push(v.clone());
        scales.push(c.abs());
        diag.push(-1);
    }
    let g_d = inverse_with_scales(&columns, scales)?;
    let (case, slot) = if positive { (SingleCase::OneA, 0) } else { (SingleCase::OneB, d - 1) };
    Ok(SingleReduction {
        case,
        g_d,
        g_s,
        target_form: QuadraticForm::diag_int(&diag),
        target_map: unit_row(slot),
    })
}

#[cfg(test)]
mod tests;
