use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{QMatrix, QuadScalar};

use super::{build_q_prime, j_sigma, j_tau, GroupParams};

/// Subspaces of `so(Q')`. The ten main ones form a direct sum
/// decomposition; `Vk`, `UkMinus`, `UkPlus` (1-based row `k`) refine `V`,
/// `UMinus`, `UPlus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subspace {
    VPlus,
    VMinus,
    V,
    A,
    D,
    C,
    UMinus,
    UPlus,
    BPlus,
    BMinus,
    Vk(usize),
    UkMinus(usize),
    UkPlus(usize),
}

pub const MAIN_SUBSPACES: [Subspace; 10] = [
    Subspace::VPlus,
    Subspace::VMinus,
    Subspace::V,
    Subspace::A,
    Subspace::D,
    Subspace::C,
    Subspace::UMinus,
    Subspace::UPlus,
    Subspace::BPlus,
    Subspace::BMinus,
];

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subspace::VPlus => write!(f, "v+"),
            Subspace::VMinus => write!(f, "v-"),
            Subspace::V => write!(f, "v"),
            Subspace::A => write!(f, "a"),
            Subspace::D => write!(f, "d"),
            Subspace::C => write!(f, "c"),
            Subspace::UMinus => write!(f, "u-"),
            Subspace::UPlus => write!(f, "u+"),
            Subspace::BPlus => write!(f, "b+"),
            Subspace::BMinus => write!(f, "b-"),
            Subspace::Vk(k) => write!(f, "v_{k}"),
            Subspace::UkMinus(k) => write!(f, "u-_{k}"),
            Subspace::UkPlus(k) => write!(f, "u+_{k}"),
        }
    }
}

enum Shape {
    /// Free `rows x cols` parameter.
    Free(usize, usize),
    /// `J K` with `K` skew of the given size; `J` is the block's signature.
    Skew(usize, Option<QMatrix>),
    /// Free parameter supported on one row.
    Row(usize, usize, usize),
}

fn shape(p: &GroupParams, sub: Subspace) -> Shape {
    let (l, t, s) = (p.l(), p.tau(), p.sigma());
    match sub {
        Subspace::VPlus | Subspace::VMinus => Shape::Free(t, l),
        Subspace::V => Shape::Free(t, s),
        Subspace::A => Shape::Skew(t, Some(j_tau(p))),
        Subspace::D => Shape::Skew(s, Some(j_sigma(p))),
        Subspace::C => Shape::Free(l, l),
        Subspace::UMinus | Subspace::UPlus => Shape::Free(l, s),
        Subspace::BPlus | Subspace::BMinus => Shape::Skew(l, None),
        Subspace::Vk(k) => Shape::Row(t, s, k),
        Subspace::UkMinus(k) | Subspace::UkPlus(k) => Shape::Row(l, s, k),
    }
}

pub(crate) fn parent_of(sub: Subspace) -> Subspace {
    match sub {
        Subspace::Vk(_) => Subspace::V,
        Subspace::UkMinus(_) => Subspace::UMinus,
        Subspace::UkPlus(_) => Subspace::UPlus,
        other => other,
    }
}

/// Places the parameter `x` of subspace `sub` into a `d x d` matrix.
pub(crate) fn embed(p: &GroupParams, sub: Subspace, x: &QMatrix) -> QMatrix {
    let [o1, o2, o3, o4] = p.offsets();
    let jt = j_tau(p);
    let js = j_sigma(p);
    let mut f = QMatrix::zeros(p.d(), p.d());
    let prod = |a: &QMatrix, b: &QMatrix| a.mul(b).expect("block shapes");
    match parent_of(sub) {
        Subspace::VPlus => {
            f.set_block(o1, o2, &prod(&x.transpose(), &jt).neg());
            f.set_block(o2, o4, x);
        }
        Subspace::VMinus => {
            f.set_block(o2, o1, x);
            f.set_block(o4, o2, &prod(&x.transpose(), &jt).neg());
        }
        Subspace::V => {
            f.set_block(o2, o3, x);
            f.set_block(o3, o2, &prod(&prod(&js, &x.transpose()), &jt).neg());
        }
        Subspace::A => f.set_block(o2, o2, x),
        Subspace::D => f.set_block(o3, o3, x),
        Subspace::C => {
            f.set_block(o1, o1, x);
            f.set_block(o4, o4, &x.transpose().neg());
        }
        Subspace::UMinus => {
            f.set_block(o3, o1, &prod(&js, &x.transpose()).neg());
            f.set_block(o4, o3, x);
        }
        Subspace::UPlus => {
            f.set_block(o1, o3, x);
            f.set_block(o3, o4, &prod(&js, &x.transpose()).neg());
        }
        Subspace::BPlus => f.set_block(o1, o4, x),
        Subspace::BMinus => f.set_block(o4, o1, x),
        _ => unreachable!("parent is a main subspace"),
    }
    f
}

fn unit(rows: usize, cols: usize, i: usize, j: usize) -> QMatrix {
    let mut m = QMatrix::zeros(rows, cols);
    m[(i, j)] = QuadScalar::one();
    m
}

/// Parameter matrices spanning `sub`.
fn parameter_basis(p: &GroupParams, sub: Subspace) -> Vec<QMatrix> {
    match shape(p, sub) {
        Shape::Free(r, c) => (0..r).flat_map(|i| (0..c).map(move |j| unit(r, c, i, j))).collect(),
        Shape::Row(r, c, k) => {
            if k == 0 || k > r {
                return Vec::new();
            }
            (0..c).map(|j| unit(r, c, k - 1, j)).collect()
        }
        Shape::Skew(n, j) => {
            let mut out = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let k = unit(n, n, a, b).sub(&unit(n, n, b, a)).expect("shape");
                    out.push(match &j {
                        Some(j) => j.mul(&k).expect("shape"),
                        None => k,
                    });
                }
            }
            out
        }
    }
}

/// Basis of `sub` as `d x d` matrices.
pub fn subspace_basis(p: &GroupParams, sub: Subspace) -> Vec<QMatrix> {
    parameter_basis(p, sub).iter().map(|x| embed(p, sub, x)).collect()
}

/// Component of `f` in `sub`, read off from the defining block.
pub fn project(p: &GroupParams, sub: Subspace, f: &QMatrix) -> QMatrix {
    let [o1, o2, o3, o4] = p.offsets();
    let (l, t, s) = (p.l(), p.tau(), p.sigma());
    let mut x = match parent_of(sub) {
        Subspace::VPlus => f.submatrix(o2, o4, t, l),
        Subspace::VMinus => f.submatrix(o2, o1, t, l),
        Subspace::V => f.submatrix(o2, o3, t, s),
        Subspace::A => f.submatrix(o2, o2, t, t),
        Subspace::D => f.submatrix(o3, o3, s, s),
        Subspace::C => f.submatrix(o1, o1, l, l),
        Subspace::UMinus => f.submatrix(o4, o3, l, s),
        Subspace::UPlus => f.submatrix(o1, o3, l, s),
        Subspace::BPlus => f.submatrix(o1, o4, l, l),
        Subspace::BMinus => f.submatrix(o4, o1, l, l),
        _ => unreachable!("parent is a main subspace"),
    };
    if let Subspace::Vk(k) | Subspace::UkMinus(k) | Subspace::UkPlus(k) = sub {
        for i in (0..x.rows()).filter(|&i| i + 1 != k) {
            for j in 0..x.cols() {
                x[(i, j)] = QuadScalar::zero();
            }
        }
    }
    embed(p, sub, &x)
}

/// Element of `so(Q'_{i1,i2,i3})` with its membership tags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraElement {
    pub params: GroupParams,
    pub mat: QMatrix,
    /// Main subspaces with a nonzero component, plus the refined subspace
    /// when the element lies in a single row of `v` or `u+-`.
    pub tags: Vec<Subspace>,
}

impl AlgebraElement {
    pub fn new(params: GroupParams, mat: QMatrix) -> Self {
        let mut tags: Vec<Subspace> =
            MAIN_SUBSPACES.iter().copied().filter(|&s| !project(&params, s, &mat).is_zero()).collect();
        if let [only] = tags.as_slice() {
            let refine: Option<(fn(usize) -> Subspace, usize)> = match only {
                Subspace::V => Some((Subspace::Vk, params.tau())),
                Subspace::UMinus => Some((Subspace::UkMinus, params.l())),
                Subspace::UPlus => Some((Subspace::UkPlus, params.l())),
                _ => None,
            };
            if let Some((ctor, rows)) = refine {
                if let Some(k) = (1..=rows).find(|&k| project(&params, ctor(k), &mat) == mat) {
                    tags.push(ctor(k));
                }
            }
        }
        Self { params, mat, tags }
    }

    /// `f^T Q' + Q' f = 0`.
    pub fn in_algebra(&self) -> bool {
        let q = build_q_prime(&self.params, None);
        let lhs = self.mat.transpose().mul(&q).and_then(|a| a.add(&q.mul(&self.mat)?)).expect("square");
        lhs.is_zero()
    }

    /// The element equals the sum of its main components.
    pub fn decomposes(&self) -> bool {
        let mut sum = QMatrix::zeros(self.mat.rows(), self.mat.cols());
        for s in MAIN_SUBSPACES {
            sum = sum.add(&project(&self.params, s, &self.mat)).expect("shape");
        }
        sum == self.mat
    }

    pub fn lies_in(&self, allowed: &[Subspace]) -> bool {
        self.tags.iter().all(|t| allowed.contains(t) || allowed.contains(&parent_of(*t)))
    }
}

/// `[a, b] = ab - ba`, retagged.
pub fn lie_bracket(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, String> {
    if a.params != b.params {
        return Err("elements live in different ambient algebras".into());
    }
    let ab = a.mat.mul(&b.mat).map_err(|e| e.to_string())?;
    let ba = b.mat.mul(&a.mat).map_err(|e| e.to_string())?;
    Ok(AlgebraElement::new(a.params, ab.sub(&ba).map_err(|e| e.to_string())?))
}

/// Random element of `sub` with small rational coefficients.
pub(crate) fn random_element<R: rand::Rng>(p: &GroupParams, sub: Subspace, rng: &mut R) -> QMatrix {
    let basis = parameter_basis(p, sub);
    let Some(first) = basis.first() else {
        return QMatrix::zeros(p.d(), p.d());
    };
    let mut x = QMatrix::zeros(first.rows(), first.cols());
    for b in &basis {
        let c = QuadScalar::frac(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        if !c.is_zero() {
            x = x.add(&b.scale(&c).expect("scale")).expect("shape");
        }
    }
    embed(p, sub, &x)
}
