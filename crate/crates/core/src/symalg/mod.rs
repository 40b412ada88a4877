//! The stabiliser groups `U`, `D`, the form `Q'_{i1,i2,i3}` and the Lie
//! algebra decomposition of `so(Q')`, with exact checks of every identity
//! the enlargement argument relies on.
//!
//! Block layout of `R^d` for indices `(i1, i2, i3)`:
//!
//! ```text
//! [ l | tau1 + tau2 | sigma1 + sigma2 | l ]
//! l = m - i3, tau1 = p' - i1, tau2 = q' - i2,
//! sigma1 = r + i1 + i3, sigma2 = n + i2 + i3
//! ```
//!
//! `Q'` pairs the two `l` blocks through `I_l` and is `I_{tau1,tau2}`,
//! `I_{sigma1,sigma2}` on the diagonal blocks.

mod algebra;
mod eta;
mod group;
mod invariants;
mod scorecard;
mod walk;

pub use algebra::{lie_bracket, project, subspace_basis, AlgebraElement, Subspace, MAIN_SUBSPACES};
pub use eta::{build_eta, cayley, Eta, EtaAux, EtaError};
pub use group::{
    build_d_generators, build_u, exp_u_minus, fixes_leading, h0_generators, preserves_form, random_d_element,
    random_u_element, verify_normalization, NormalizationReport, UElement,
};
pub use invariants::{
    classification_probe, fixed_forms, invariance_check, jm_l0, l_m, transported_fixed_forms_check, Branch, ProbeGroup,
};
pub use scorecard::{verify_algebra, verify_params, Check, Scorecard};
pub use walk::{index_walk_check, WalkReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{QMatrix, QuadScalar};
use crate::quadforms::QuadraticForm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("index out of range: {0}")]
    Index(String),
    #[error("block size {name} = {value} is negative")]
    NegativeBlock { name: &'static str, value: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    pub p_prime: usize,
    pub q_prime: usize,
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub i1: i64,
    pub i2: i64,
    pub i3: i64,
}

impl GroupParams {
    pub fn new(p_prime: usize, q_prime: usize, m: usize, r: usize, n: usize, i: (i64, i64, i64)) -> Result<Self, ParamError> {
        let p = Self { p_prime, q_prime, m, r, n, i1: i.0, i2: i.1, i3: i.2 };
        p.validate()?;
        Ok(p)
    }

    /// Base parameters `i = (0, 0, 0)`.
    pub fn base(p_prime: usize, q_prime: usize, m: usize, r: usize, n: usize) -> Self {
        Self { p_prime, q_prime, m, r, n, i1: 0, i2: 0, i3: 0 }
    }

    pub fn with_indices(&self, i: (i64, i64, i64)) -> Result<Self, ParamError> {
        Self::new(self.p_prime, self.q_prime, self.m, self.r, self.n, i)
    }

    fn validate(&self) -> Result<(), ParamError> {
        let (pp, qq, m) = (self.p_prime as i64, self.q_prime as i64, self.m as i64);
        if !(0..=pp).contains(&self.i1) || !(0..=qq).contains(&self.i2) || !(-pp.min(qq)..=m).contains(&self.i3) {
            return Err(ParamError::Index(format!(
                "(i1,i2,i3) = ({},{},{}) with p'={pp}, q'={qq}, m={m}",
                self.i1, self.i2, self.i3
            )));
        }
        for (name, value) in [("sigma1", self.sigma1_i()), ("sigma2", self.sigma2_i())] {
            if value < 0 {
                return Err(ParamError::NegativeBlock { name, value });
            }
        }
        Ok(())
    }

    fn sigma1_i(&self) -> i64 {
        self.r as i64 + self.i1 + self.i3
    }

    fn sigma2_i(&self) -> i64 {
        self.n as i64 + self.i2 + self.i3
    }

    pub fn l(&self) -> usize {
        (self.m as i64 - self.i3) as usize
    }

    pub fn tau1(&self) -> usize {
        (self.p_prime as i64 - self.i1) as usize
    }

    pub fn tau2(&self) -> usize {
        (self.q_prime as i64 - self.i2) as usize
    }

    pub fn tau(&self) -> usize {
        self.tau1() + self.tau2()
    }

    pub fn sigma1(&self) -> usize {
        self.sigma1_i() as usize
    }

    pub fn sigma2(&self) -> usize {
        self.sigma2_i() as usize
    }

    pub fn sigma(&self) -> usize {
        self.sigma1() + self.sigma2()
    }

    pub fn d(&self) -> usize {
        2 * self.m + self.p_prime + self.q_prime + self.r + self.n
    }

    pub fn s(&self) -> usize {
        self.m + self.p_prime + self.q_prime
    }

    /// Coordinates fixed by `(UD)_{i1,i2,i3}`: the first `l + tau`.
    pub fn fixed_count(&self) -> usize {
        self.l() + self.tau()
    }

    pub fn indices(&self) -> (i64, i64, i64) {
        (self.i1, self.i2, self.i3)
    }

    /// Start offsets of the four blocks.
    pub fn offsets(&self) -> [usize; 4] {
        let (l, t, s) = (self.l(), self.tau(), self.sigma());
        [0, l, l + t, l + t + s]
    }

    pub fn sizes(&self) -> [usize; 4] {
        [self.l(), self.tau(), self.sigma(), self.l()]
    }

    /// All index triples allowed for these base sizes.
    pub fn all_valid(&self) -> Vec<GroupParams> {
        let (pp, qq, m) = (self.p_prime as i64, self.q_prime as i64, self.m as i64);
        let mut out = Vec::new();
        for i1 in 0..=pp {
            for i2 in 0..=qq {
                for i3 in -pp.min(qq)..=m {
                    if let Ok(p) = self.with_indices((i1, i2, i3)) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

/// Every valid parameter set with `p', q', m <= max_index`, `(r, n)` from
/// `rn` and `d <= max_d`.
pub fn sweep(max_index: usize, rn: &[(usize, usize)], max_d: usize) -> Vec<GroupParams> {
    let mut out = Vec::new();
    for pp in 0..=max_index {
        for qq in 0..=max_index {
            for m in 0..=max_index {
                for &(r, n) in rn {
                    let base = GroupParams::base(pp, qq, m, r, n);
                    if base.d() <= max_d {
                        out.extend(base.all_valid());
                    }
                }
            }
        }
    }
    out
}

/// `I_{a,b}`.
pub fn signature_matrix(a: usize, b: usize) -> QMatrix {
    let mut e = vec![1i64; a];
    e.extend(std::iter::repeat(-1).take(b));
    QMatrix::diag_int(&e)
}

pub(crate) fn j_tau(p: &GroupParams) -> QMatrix {
    signature_matrix(p.tau1(), p.tau2())
}

pub(crate) fn j_sigma(p: &GroupParams) -> QMatrix {
    signature_matrix(p.sigma1(), p.sigma2())
}

/// Gram of `Q'_{i1,i2,i3}`. At `i = (0,0,0)` a given middle form replaces
/// `I_{p',q'}`.
pub fn build_q_prime(p: &GroupParams, middle: Option<&QuadraticForm>) -> QMatrix {
    let d = p.d();
    let [_, o2, o3, o4] = p.offsets();
    let mut g = QMatrix::zeros(d, d);
    for k in 0..p.l() {
        g[(k, o4 + k)] = QuadScalar::one();
        g[(o4 + k, k)] = QuadScalar::one();
    }
    match middle {
        Some(mid) if p.indices() == (0, 0, 0) && mid.dim() == p.tau() => g.set_block(o2, o2, mid.gram()),
        _ => g.set_block(o2, o2, &j_tau(p)),
    }
    g.set_block(o3, o3, &j_sigma(p));
    g
}
