use std::collections::{BTreeSet, HashSet, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::exactnum::{QMatrix, QuadScalar};
use crate::quadforms::QuadraticForm;

use super::{enumerate_box, IntegralProblem, LatError, PointSet, ScanOptions};

/// Integral `gamma` with `gamma^T A gamma = A` and `det gamma = +-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Automorph {
    pub dim: usize,
    /// Row-major entries.
    pub gamma: Vec<i64>,
}

impl Automorph {
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        Self { dim: rows.len(), gamma: rows.concat() }
    }

    pub fn apply(&self, x: &[i64]) -> Option<Vec<i64>> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let mut acc: i64 = 0;
                for j in 0..d {
                    acc = acc.checked_add(self.gamma[i * d + j].checked_mul(x[j])?)?;
                }
                Some(acc)
            })
            .collect()
    }

    fn to_qmatrix(&self) -> QMatrix {
        let rows: Vec<Vec<i64>> = self.gamma.chunks(self.dim).map(|r| r.to_vec()).collect();
        QMatrix::from_int_rows(&rows)
    }

    /// Exact check against `Q`.
    pub fn verify(&self, q: &QuadraticForm) -> bool {
        if self.dim != q.dim() {
            return false;
        }
        let g = self.to_qmatrix();
        let preserved = g.transpose().mul(q.gram()).and_then(|x| x.mul(&g)).map(|x| x == *q.gram()).unwrap_or(false);
        let det = g.determinant().unwrap_or_else(|_| QuadScalar::zero());
        preserved && det.abs().is_one()
    }

    fn is_identity(&self) -> bool {
        let d = self.dim;
        (0..d * d).all(|k| self.gamma[k] == i64::from(k / d == k % d))
    }
}

fn preserves(p: &IntegralProblem, g: &[i128]) -> bool {
    let d = p.d;
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0i128;
            for k in 0..d {
                for l in 0..d {
                    acc += g[k * d + i] * p.gram[k * d + l] * g[l * d + j];
                }
            }
            if acc != p.gram[i * d + j] {
                return false;
            }
        }
    }
    true
}

/// Signed permutations `x_j -> eps_j x_{pi(j)}` preserving the gram.
fn signed_permutations(p: &IntegralProblem, limit: usize, out: &mut BTreeSet<Automorph>) {
    let d = p.d;
    let mut pi = vec![0usize; d];
    let mut eps = vec![0i128; d];
    let mut used = vec![false; d];
    fn rec(
        j: usize,
        p: &IntegralProblem,
        pi: &mut [usize],
        eps: &mut [i128],
        used: &mut [bool],
        limit: usize,
        out: &mut BTreeSet<Automorph>,
    ) {
        let d = p.d;
        if out.len() >= limit {
            return;
        }
        if j == d {
            let mut gamma = vec![0i64; d * d];
            for c in 0..d {
                gamma[pi[c] * d + c] = eps[c] as i64;
            }
            let a = Automorph { dim: d, gamma };
            if !a.is_identity() {
                out.insert(a);
            }
            return;
        }
        for t in 0..d {
            if used[t] {
                continue;
            }
            for e in [1i128, -1] {
                pi[j] = t;
                eps[j] = e;
                let ok = (0..=j).all(|i| p.gram[pi[i] * d + t] * eps[i] * e == p.gram[i * d + j]);
                if ok {
                    used[t] = true;
                    rec(j + 1, p, pi, eps, used, limit, out);
                    used[t] = false;
                }
            }
        }
    }
    rec(0, p, &mut pi, &mut eps, &mut used, limit, out);
}

fn primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// `I + alpha w (Au)^T - alpha u (Aw)^T - beta u (Au)^T` with
/// `beta = alpha^2 Q(w) / 2`, `alpha` the smallest of 1, 2 making it
/// integral.
fn eichler(p: &IntegralProblem, u: &[i128], w: &[i128]) -> Option<Vec<i128>> {
    let d = p.d;
    let mul = |v: &[i128]| -> Vec<i128> { (0..d).map(|i| (0..d).map(|j| p.gram[i * d + j] * v[j]).sum()).collect() };
    let au = mul(u);
    let aw = mul(w);
    let qw: i128 = w.iter().zip(&aw).map(|(a, b)| a * b).sum();
    let alpha = if qw % 2 == 0 { 1 } else { 2 };
    let beta = alpha * alpha * qw / 2;
    let mut g = vec![0i128; d * d];
    for i in 0..d {
        for j in 0..d {
            g[i * d + j] = i128::from(i == j) + alpha * w[i] * au[j] - alpha * u[i] * aw[j] - beta * u[i] * au[j];
        }
    }
    preserves(p, &g).then_some(g)
}

/// Best effort: signed permutation symmetries, then Eichler unipotents
/// built from primitive isotropic vectors with `|u|_inf <= 2` and short
/// vectors `w` orthogonal to them. `budget` caps the number of candidates
/// tried. Every returned element is verified exactly; inverses of the
/// unipotents are included (`w -> -w`).
pub fn find_automorphs(q: &QuadraticForm, budget: usize) -> Result<Vec<Automorph>, LatError> {
    let p = IntegralProblem::new(q, &QuadScalar::zero())?;
    let d = p.d;
    let mut out = BTreeSet::new();
    signed_permutations(&p, budget, &mut out);
    let (iso, _) = enumerate_box(q, &QuadScalar::zero(), 2, &ScanOptions::default())?;
    let mut tried = 0usize;
    'outer: for u in iso.iter().filter(|u| primitive(u)) {
        // skip u when -u was already used: E(-u, w) = E(u, -w)
        if u.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            continue;
        }
        let u: Vec<i128> = u.iter().map(|&c| c as i128).collect();
        let au: Vec<i128> = (0..d).map(|i| (0..d).map(|j| p.gram[i * d + j] * u[j]).sum()).collect();
        let mut ws: Vec<Vec<i128>> = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let (a, b) = (au[j], -au[i]);
                let g = a.gcd(&b);
                if g == 0 {
                    continue;
                }
                let mut w = vec![0i128; d];
                w[i] = a / g;
                w[j] = b / g;
                ws.push(w);
            }
            if au[i] == 0 {
                let mut w = vec![0i128; d];
                w[i] = 1;
                ws.push(w);
            }
        }
        for w in ws {
            for sign in [1i128, -1] {
                tried += 1;
                if tried > budget {
                    break 'outer;
                }
                let w: Vec<i128> = w.iter().map(|c| sign * c).collect();
                if let Some(g) = eichler(&p, &u, &w) {
                    if let Some(gamma) = g.iter().map(|&x| i64::try_from(x).ok()).collect::<Option<Vec<i64>>>() {
                        let a = Automorph { dim: d, gamma };
                        if !a.is_identity() {
                            out.insert(a);
                        }
                    }
                }
            }
        }
    }
    Ok(out.into_iter().filter(|a| a.verify(q)).collect())
}

/// Breadth-first closure of the seeds (those with `|x|_inf <= h_out`)
/// under `autos`, keeping points with `|x|_inf <= h_out`, stopping at `cap`
/// points. Each new point is re-checked against `Q(x) = a`.
pub fn orbit_expand(
    q: &QuadraticForm,
    a: &QuadScalar,
    seed: &PointSet,
    autos: &[Automorph],
    h_out: u32,
    cap: usize,
) -> Result<PointSet, LatError> {
    let p = IntegralProblem::new(q, a)?;
    let bound = h_out as i64;
    let inside = |x: &[i64]| x.iter().all(|c| c.abs() <= bound);
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for x in seed.iter().filter(|x| inside(x) && p.on_quadric(x)) {
        if seen.len() >= cap {
            break;
        }
        if seen.insert(x.to_vec()) {
            queue.push_back(x.to_vec());
        }
    }
    while let Some(x) = queue.pop_front() {
        for g in autos {
            if seen.len() >= cap {
                break;
            }
            let Some(y) = g.apply(&x) else { continue };
            if inside(&y) && !seen.contains(&y) && p.on_quadric(&y) {
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let pts: Vec<Vec<i64>> = seen.into_iter().collect();
    Ok(PointSet::from_points(seed.dim, &pts, h_out, false))
}
