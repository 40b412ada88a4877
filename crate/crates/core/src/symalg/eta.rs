use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::orthogonalise;
use crate::exactnum::{congruence_check, ArithError, QMatrix, QuadScalar, ScaledMatrix};
use crate::quadforms::QuadraticForm;

use super::{build_q_prime, j_tau, GroupParams, ParamError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EtaError {
    #[error("eta_{which} needs {block} >= 1")]
    NeedsBlock { which: u8, block: &'static str },
    #[error("no map eta_{0}")]
    Unknown(u8),
    #[error("bad auxiliary data: {0}")]
    BadAux(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Inputs the maps depend on. Defaults give the identity-like choices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaAux {
    /// `eta_2` shifts; `alpha1` needs `tau1 >= 1`, `alpha2` needs `tau2 >= 1`.
    pub alpha1: QuadScalar,
    pub alpha2: QuadScalar,
    /// `eta_1` blocks in `SO(l)` and `O(tau1, tau2)`; `None` is the identity.
    pub a1: Option<QMatrix>,
    pub a2: Option<QMatrix>,
    /// `eta_4` moves a negative `tau` coordinate instead of a positive one.
    pub negative: bool,
    /// `eta_0` diagonalises this middle form.
    pub middle: Option<QuadraticForm>,
}

/// A map `eta` with `Q_source(eta x) = Q_target(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eta {
    pub which: u8,
    pub matrix: ScaledMatrix,
    pub source_gram: QMatrix,
    pub target_gram: QMatrix,
    pub target: GroupParams,
    /// Set when a block of the map is empty and the map degenerates.
    pub degenerate_branch: Option<String>,
}

impl Eta {
    pub fn verify(&self) -> Result<bool, ArithError> {
        congruence_check(&self.target_gram, &self.matrix, &self.source_gram)
    }
}

/// `(I - K)(I + K)^{-1}`: orthogonal for skew `K`, in `O(J)` when
/// `K^T J + J K = 0`.
pub fn cayley(k: &QMatrix) -> Result<QMatrix, ArithError> {
    let i = QMatrix::identity(k.rows());
    i.sub(k)?.mul(&i.add(k)?.inverse()?)
}

/// Matrix with `rows[i] = [(j, coeff)]`, 0-based, rest zero.
fn sparse(d: usize, rows: &[(usize, Vec<(usize, i64)>)]) -> QMatrix {
    let mut g = QMatrix::identity(d);
    for (i, entries) in rows {
        for j in 0..d {
            g[(*i, j)] = QuadScalar::zero();
        }
        for &(j, c) in entries {
            g[(*i, j)] = QuadScalar::from_int(c);
        }
    }
    g
}

fn need(which: u8, ok: bool, block: &'static str) -> Result<(), EtaError> {
    if ok {
        Ok(())
    } else {
        Err(EtaError::NeedsBlock { which, block })
    }
}

fn halves(d: usize, rows: &[usize]) -> Vec<QuadScalar> {
    (0..d).map(|i| if rows.contains(&i) { QuadScalar::frac(1, 2) } else { QuadScalar::one() }).collect()
}

/// Builds `eta_which` at `p`. Row `i` of the matrix is `(eta x)_i` in terms
/// of the coordinates `x` of the target form.
pub fn build_eta(which: u8, p: &GroupParams, aux: &EtaAux) -> Result<Eta, EtaError> {
    let (l, tau, sigma, d) = (p.l(), p.tau(), p.sigma(), p.d());
    let (t1, t2, s1) = (p.tau1(), p.tau2(), p.sigma1());
    let q = build_q_prime(p, None);
    let ones = || vec![QuadScalar::one(); d];
    let (i1, i2, i3) = p.indices();
    let mut degenerate = None;
    let (matrix, target, target_gram) = match which {
        0 => {
            let mid = aux.middle.as_ref().ok_or_else(|| EtaError::BadAux("eta_0 needs a middle form".into()))?;
            if p.indices() != (0, 0, 0) || mid.dim() != tau {
                return Err(EtaError::BadAux("eta_0 acts at i = (0,0,0) on a middle form of size tau".into()));
            }
            let basis: Vec<Vec<QuadScalar>> = (0..tau)
                .map(|k| (0..tau).map(|j| if j == k { QuadScalar::one() } else { QuadScalar::zero() }).collect())
                .collect();
            let mut orth = orthogonalise(mid.gram(), basis);
            orth.sort_by_key(|(_, lam)| lam.is_negative());
            let pos = orth.iter().filter(|(_, lam)| lam.is_positive()).count();
            if (pos, tau - pos) != (t1, t2) {
                return Err(EtaError::BadAux(format!("middle form has signature ({pos},{}), expected ({t1},{t2})", tau - pos)));
            }
            let cols: Vec<Vec<QuadScalar>> = orth.iter().map(|(v, _)| v.clone()).collect();
            let pinv = QMatrix::from_columns(&cols, tau).inverse()?;
            let mut core = QMatrix::identity(d);
            core.set_block(l, l, &pinv);
            let mut left = ones();
            for (k, (_, lam)) in orth.iter().enumerate() {
                left[l + k] = lam.abs();
            }
            let target_gram = build_q_prime(p, Some(mid));
            (ScaledMatrix::new(left, core, ones())?, *p, target_gram)
        }
        1 => {
            let a1 = aux.a1.clone().unwrap_or_else(|| QMatrix::identity(l));
            let a2 = aux.a2.clone().unwrap_or_else(|| QMatrix::identity(tau));
            if (a1.rows(), a1.cols(), a2.rows(), a2.cols()) != (l, l, tau, tau) {
                return Err(EtaError::BadAux(format!("a1 must be {l}x{l} and a2 {tau}x{tau}")));
            }
            if !super::preserves_form(&a1, &QMatrix::identity(l)) || (l > 0 && !a1.determinant()?.is_one()) {
                return Err(EtaError::BadAux("a1 is not in SO(l)".into()));
            }
            if !super::preserves_form(&a2, &j_tau(p)) {
                return Err(EtaError::BadAux("a2 is not in O(tau1, tau2)".into()));
            }
            degenerate = match (l, tau) {
                (0, 0) => Some("l = 0 and tau = 0: eta_1 is the identity".to_string()),
                (0, _) => Some("l = 0: eta_1 acts on the tau block only".to_string()),
                (_, 0) => Some("tau = 0: eta_1 acts on the paired blocks only".to_string()),
                _ => None,
            };
            let mut core = QMatrix::identity(d);
            core.set_block(0, 0, &a1);
            core.set_block(l, l, &a2);
            core.set_block(d - l, d - l, &a1);
            (ScaledMatrix::from_core(core), *p, q.clone())
        }
        2 => {
            need(2, l >= 1, "l")?;
            let (a1, a2) = (&aux.alpha1, &aux.alpha2);
            if !a1.is_zero() {
                need(2, t1 >= 1, "tau1")?;
            }
            if !a2.is_zero() {
                need(2, t2 >= 1, "tau2")?;
            }
            let alpha = &(&(a2 * a2) - &(a1 * a1)) * &QuadScalar::frac(1, 2);
            let mut core = QMatrix::identity(d);
            if !a1.is_zero() {
                core[(l, l - 1)] = a1.clone();
                core[(d - 1, l)] = -a1;
            }
            if !a2.is_zero() {
                core[(l + tau - 1, l - 1)] = a2.clone();
                core[(d - 1, l + tau - 1)] = a2.clone();
            }
            core[(d - 1, l - 1)] = alpha;
            (ScaledMatrix::from_core(core), *p, q.clone())
        }
        3 => {
            need(3, l >= 1, "l")?;
            let target = p.with_indices((i1, i2, i3 + 1))?;
            // 0-based: a = l + tau - 1 is the new first sigma coordinate,
            // b = l + tau + sigma the new last one.
            let (a, b) = (l + tau - 1, l + tau + sigma);
            let mut rows = vec![(l - 1, vec![(a, 1), (b, -1)]), (d - 1, vec![(a, 1), (b, 1)])];
            rows.extend((l..l + tau).map(|i| (i, vec![(i - 1, 1)])));
            rows.extend((l + tau + sigma..d - 1).map(|i| (i, vec![(i + 1, 1)])));
            let core = sparse(d, &rows);
            (ScaledMatrix::new(halves(d, &[l - 1, d - 1]), core, ones())?, target, build_q_prime(&target, None))
        }
        4 if !aux.negative => {
            need(4, t1 >= 1, "tau1")?;
            let target = p.with_indices((i1 + 1, i2, i3))?;
            let mut rows = vec![(l, vec![(l + tau - 1, 1)])];
            rows.extend((l + 1..l + tau).map(|i| (i, vec![(i - 1, 1)])));
            (ScaledMatrix::from_core(sparse(d, &rows)), target, build_q_prime(&target, None))
        }
        4 => {
            need(4, t2 >= 1, "tau2")?;
            let target = p.with_indices((i1, i2 + 1, i3))?;
            let mut rows = vec![(l + tau - 1, vec![(l + tau - 1 + s1, 1)])];
            rows.extend((l + tau..l + tau + s1).map(|i| (i, vec![(i - 1, 1)])));
            (ScaledMatrix::from_core(sparse(d, &rows)), target, build_q_prime(&target, None))
        }
        5 => {
            need(5, t1 >= 1, "tau1")?;
            need(5, t2 >= 1, "tau2")?;
            let target = p.with_indices((i1 + 1, i2 + 1, i3 - 1))?;
            let mut rows = vec![(l, vec![(l, 1), (d - 1, 1)]), (l + tau - 1, vec![(l, 1), (d - 1, -1)])];
            rows.extend((l + tau..d).map(|i| (i, vec![(i - 1, 1)])));
            let core = sparse(d, &rows);
            (ScaledMatrix::new(halves(d, &[l, l + tau - 1]), core, ones())?, target, build_q_prime(&target, None))
        }
        other => return Err(EtaError::Unknown(other)),
    };
    let source_gram = if which == 0 { q } else { build_q_prime(p, None) };
    Ok(Eta { which, matrix, source_gram, target_gram, target, degenerate_branch: degenerate })
}
