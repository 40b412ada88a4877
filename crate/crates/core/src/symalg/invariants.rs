use serde::{Deserialize, Serialize};

use crate::canon::CanonicalCertificate;
use crate::exactnum::{QMatrix, QuadScalar, SurdMatrix};
use crate::quadforms::LinearMap;

use super::{build_d_generators, h0_generators, GroupParams};

/// Linear forms `l` (rows of the result) with `l(g x) = l(x)` for every
/// generator, i.e. the null space of the stacked `g^T - I`.
pub fn fixed_forms(generators: &[QMatrix], d: usize) -> QMatrix {
    if generators.is_empty() {
        return QMatrix::identity(d);
    }
    let i = QMatrix::identity(d);
    let mut stacked = generators[0].transpose().sub(&i).expect("square");
    for g in &generators[1..] {
        stacked = stacked.stack(&g.transpose().sub(&i).expect("square")).expect("same width");
    }
    let null = stacked.nullspace();
    let rows = null.len();
    if rows == 0 {
        return QMatrix::zeros(0, d);
    }
    QMatrix::from_columns(&null, d).transpose().submatrix(0, 0, rows, d)
}

fn coordinate_span(d: usize, coords: impl Iterator<Item = usize>) -> QMatrix {
    let rows: Vec<Vec<QuadScalar>> = coords
        .map(|k| (0..d).map(|j| if j == k { QuadScalar::one() } else { QuadScalar::zero() }).collect())
        .collect();
    if rows.is_empty() {
        return QMatrix::zeros(0, d);
    }
    QMatrix::from_rows(rows).expect("rectangular")
}

/// `L_m`: forms in the sigma coordinates.
pub fn l_m(p: &GroupParams) -> QMatrix {
    let [_, _, o3, o4] = p.offsets();
    coordinate_span(p.d(), o3..o4)
}

/// `J_m L_0`: forms in the first `l` and the sigma coordinates.
pub fn jm_l0(p: &GroupParams) -> QMatrix {
    let [_, _, o3, o4] = p.offsets();
    coordinate_span(p.d(), (0..p.l()).chain(o3..o4))
}

/// Does the row span of `sub` lie in the row span of `space`?
fn span_contains(space: &QMatrix, sub: &QMatrix) -> bool {
    if sub.rows() == 0 {
        return true;
    }
    if space.rows() == 0 {
        return sub.is_zero();
    }
    space.stack(sub).expect("same width").rank() == space.rank()
}

/// Is the row span of `basis` mapped into itself by every `l -> g^T l`?
pub fn invariance_check(basis: &QMatrix, generators: &[QMatrix]) -> bool {
    generators.iter().all(|g| {
        let moved = basis.mul(g).expect("width matches");
        span_contains(basis, &moved)
    })
}

/// Which side of the invariant-subspace dichotomy a subspace is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Inside the forms fixed by the group.
    ContainedInFixed,
    /// Contains the block the group acts on irreducibly.
    ContainsBlock,
    Neither,
}

/// Group whose invariant subspaces are being classified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeGroup {
    /// `D`, block `L_m`.
    D,
    /// `(UD)`, block `J_m L_0`.
    H0,
}

pub fn classification_probe(p: &GroupParams, basis: &QMatrix, group: ProbeGroup) -> Branch {
    let (gens, block) = match group {
        ProbeGroup::D => (build_d_generators(p), l_m(p)),
        ProbeGroup::H0 => (h0_generators(p), jm_l0(p)),
    };
    if span_contains(&fixed_forms(&gens, p.d()), basis) {
        Branch::ContainedInFixed
    } else if span_contains(basis, &block) {
        Branch::ContainsBlock
    } else {
        Branch::Neither
    }
}

/// For `H* = g_d^{-1} H_0* g_d`: every generator fixes the rows of `M`
/// (exactly, through the square-root scales of `g_d`) and the fixed forms
/// of `H_0*` have dimension `s`. Together: the forms fixed by `H*` are
/// exactly the span of the rows of `M`.
pub fn transported_fixed_forms_check(m: &LinearMap, cert: &CanonicalCertificate) -> Result<bool, String> {
    let cp = &cert.params;
    let p = GroupParams::base(cp.p_prime, cp.q_prime, cp.m, cp.r, cp.n);
    if p.d() != m.dim() || p.s() != m.s() {
        return Err("certificate does not match the map".into());
    }
    let gens = h0_generators(&p);
    if fixed_forms(&gens, p.d()).rows() != p.s() {
        return Ok(false);
    }
    let gd = cert.g_d.to_surd_matrix().map_err(|e| e.to_string())?;
    let gd_inv = cert.g_d.inverse().and_then(|g| g.to_surd_matrix()).map_err(|e| e.to_string())?;
    let ms = SurdMatrix::from_qmatrix(m.matrix());
    let left = ms.mul(&gd_inv).map_err(|e| e.to_string())?;
    for h in &gens {
        let moved =
            left.mul(&SurdMatrix::from_qmatrix(h)).and_then(|x| x.mul(&gd)).map_err(|e| e.to_string())?;
        if !moved.equals(m.matrix()).map_err(|e| e.to_string())? {
            return Ok(false);
        }
    }
    Ok(true)
}
