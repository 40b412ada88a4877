use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exactnum::{rat, QMatrix, QuadScalar};

use super::{j_sigma, GroupParams};

/// An element of `U_{i1,i2,i3}`: identity except for the blocks
/// `(3,1) = -I_{sigma1,sigma2} t^T`, `(4,1) = s`, `(4,3) = t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UElement {
    pub params: GroupParams,
    pub t: QMatrix,
    pub s: QMatrix,
}

impl UElement {
    pub fn matrix(&self) -> QMatrix {
        let p = &self.params;
        let [_, _, o3, o4] = p.offsets();
        let mut g = QMatrix::identity(p.d());
        let jt = j_sigma(p).mul(&self.t.transpose()).expect("shape").neg();
        g.set_block(o3, 0, &jt);
        g.set_block(o4, 0, &self.s);
        g.set_block(o4, o3, &self.t);
        g
    }
}

/// `s + s^T + t I_{sigma1,sigma2} t^T`.
fn u_residual(p: &GroupParams, t: &QMatrix, s: &QMatrix) -> QMatrix {
    let tjt = t.mul(&j_sigma(p)).and_then(|x| x.mul(&t.transpose())).expect("shape");
    s.add(&s.transpose()).and_then(|x| x.add(&tjt)).expect("shape")
}

pub fn build_u(p: &GroupParams, t: QMatrix, s: QMatrix) -> Result<UElement, String> {
    let (l, sigma) = (p.l(), p.sigma());
    if (t.rows(), t.cols()) != (l, sigma) || (s.rows(), s.cols()) != (l, l) {
        return Err(format!("t must be {l}x{sigma} and s must be {l}x{l}"));
    }
    let res = u_residual(p, &t, &s);
    if !res.is_zero() {
        return Err(format!("s + s^T + t I t^T = {res} is not zero"));
    }
    Ok(UElement { params: *p, t, s })
}

/// `exp` of the `u^-` element with parameter `u` (an `l x sigma` matrix).
pub fn exp_u_minus(p: &GroupParams, u: &QMatrix) -> UElement {
    let s = u.mul(&j_sigma(p)).and_then(|x| x.mul(&u.transpose())).expect("shape").scale(&QuadScalar::frac(-1, 2));
    build_u(p, u.clone(), s.expect("scale")).expect("exp satisfies the constraint")
}

fn small<R: Rng>(rng: &mut R) -> QuadScalar {
    QuadScalar::rational(rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    let mut m = QMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = small(rng);
        }
    }
    m
}

pub(crate) fn random_skew<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let mut k = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let x = small(rng);
            k[(j, i)] = -&x;
            k[(i, j)] = x;
        }
    }
    k
}

pub fn random_u_element<R: Rng>(p: &GroupParams, rng: &mut R) -> UElement {
    let t = random_matrix(rng, p.l(), p.sigma());
    let base = exp_u_minus(p, &t);
    let s = base.s.add(&random_skew(rng, p.l())).expect("shape");
    build_u(p, t, s).expect("skew part keeps the constraint")
}

/// `x -> x + B(x,u) w - B(x,w) u - B(w,w)/2 B(x,u) u` on the sigma block, with
/// `B` the form `I_{sigma1,sigma2}`; needs `u` isotropic and `B(u,w) = 0`.
fn eichler(jd: &QMatrix, u: &[QuadScalar], w: &[QuadScalar]) -> QMatrix {
    let n = u.len();
    let ju = jd.mul_vec(u).expect("shape");
    let jw = jd.mul_vec(w).expect("shape");
    let bww = w.iter().zip(&jw).fold(QuadScalar::zero(), |a, (x, y)| &a + &(x * y));
    let half = &bww * &QuadScalar::frac(1, 2);
    let mut e = QMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = &(&(&w[i] * &ju[j]) - &(&u[i] * &jw[j])) - &(&half * &(&u[i] * &ju[j]));
            e[(i, j)] = &e[(i, j)] + &v;
        }
    }
    e
}

/// Rational rotation (same signs) or boost (opposite signs) in coordinates
/// `a`, `b` of the sigma block with parameter `t`.
fn plane_element(p: &GroupParams, a: usize, b: usize, t: &QuadScalar) -> QMatrix {
    let n = p.sigma();
    let one = QuadScalar::one();
    let tt = t * t;
    let mut blk = QMatrix::identity(n);
    let same = (a < p.sigma1()) == (b < p.sigma1());
    if same {
        let den = (&one + &tt).inverse().expect("positive");
        let c = &(&one - &tt) * &den;
        let s = &(&QuadScalar::from_int(2) * t) * &den;
        blk[(a, a)] = c.clone();
        blk[(b, b)] = c;
        blk[(a, b)] = -&s;
        blk[(b, a)] = s;
    } else {
        let den = (&one - &tt).inverse().expect("|t| < 1");
        let ch = &(&one + &tt) * &den;
        let sh = &(&QuadScalar::from_int(2) * t) * &den;
        blk[(a, a)] = ch.clone();
        blk[(b, b)] = ch;
        blk[(a, b)] = sh.clone();
        blk[(b, a)] = sh;
    }
    embed_sigma(p, &blk)
}

fn embed_sigma(p: &GroupParams, blk: &QMatrix) -> QMatrix {
    let mut g = QMatrix::identity(p.d());
    g.set_block(p.offsets()[2], p.offsets()[2], blk);
    g
}

/// Generators of `D_{i1,i2,i3} = SO(sigma1, sigma2)^o` on the sigma block:
/// rotations and boosts in every coordinate plane plus Eichler unipotents.
pub fn build_d_generators(p: &GroupParams) -> Vec<QMatrix> {
    let n = p.sigma();
    let t = QuadScalar::frac(1, 2);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(plane_element(p, a, b, &t));
        }
    }
    if p.sigma1() >= 1 && p.sigma2() >= 1 && n >= 3 {
        let jd = j_sigma(p);
        let (a, b) = (0, p.sigma1());
        let mut u = vec![QuadScalar::zero(); n];
        u[a] = QuadScalar::one();
        u[b] = QuadScalar::one();
        for k in (0..n).filter(|&k| k != a && k != b) {
            let mut w = vec![QuadScalar::zero(); n];
            w[k] = QuadScalar::one();
            out.push(embed_sigma(p, &eichler(&jd, &u, &w)));
        }
    }
    out
}

/// Product of a few plane elements with random rational parameters.
pub fn random_d_element<R: Rng>(p: &GroupParams, rng: &mut R) -> QMatrix {
    let n = p.sigma();
    let mut g = QMatrix::identity(p.d());
    if n < 2 {
        return g;
    }
    for _ in 0..3 {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let (a, b) = (a.min(b), a.max(b));
        let t = QuadScalar::rational(rat(rng.gen_range(-4..=4), 5));
        g = g.mul(&plane_element(p, a, b, &t)).expect("square");
    }
    g
}

/// Generators of `(UD)_{i1,i2,i3}`: `D` generators, `exp` of the `u^-`
/// basis and the `b^-` directions.
pub fn h0_generators(p: &GroupParams) -> Vec<QMatrix> {
    let mut out = build_d_generators(p);
    let (l, sigma) = (p.l(), p.sigma());
    for k in 0..l {
        for j in 0..sigma {
            let mut u = QMatrix::zeros(l, sigma);
            u[(k, j)] = QuadScalar::one();
            out.push(exp_u_minus(p, &u).matrix());
        }
        for j in k + 1..l {
            let mut s = QMatrix::zeros(l, l);
            s[(k, j)] = QuadScalar::one();
            s[(j, k)] = QuadScalar::from_int(-1);
            out.push(build_u(p, QMatrix::zeros(l, sigma), s).expect("skew").matrix());
        }
    }
    out
}

pub fn preserves_form(g: &QMatrix, q: &QMatrix) -> bool {
    g.transpose().mul(q).and_then(|x| x.mul(g)).map(|x| x == *q).unwrap_or(false)
}

/// True when the first `k` coordinates of `g x` equal those of `x`.
pub fn fixes_leading(g: &QMatrix, k: usize) -> bool {
    g.submatrix(0, 0, k, g.cols()) == QMatrix::identity(g.cols()).submatrix(0, 0, k, g.cols())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub ok: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

/// Checks `g u g^{-1} in U` for every pair, by re-extracting `(t, s)` from
/// the conjugate and rebuilding it.
pub fn verify_normalization(p: &GroupParams, d_elements: &[QMatrix], u_elements: &[QMatrix]) -> NormalizationReport {
    let [_, _, o3, o4] = p.offsets();
    let mut checked = 0;
    for (a, g) in d_elements.iter().enumerate() {
        let g_inv = g.inverse().expect("group element");
        for (b, u) in u_elements.iter().enumerate() {
            checked += 1;
            let c = g.mul(u).and_then(|x| x.mul(&g_inv)).expect("square");
            let t = c.submatrix(o4, o3, p.l(), p.sigma());
            let s = c.submatrix(o4, 0, p.l(), p.l());
            let rebuilt = build_u(p, t, s).map(|e| e.matrix());
            if rebuilt.as_ref() != Ok(&c) {
                let why = rebuilt.err().unwrap_or_else(|| "block pattern differs".into());
                return NormalizationReport { ok: false, checked, witness: Some(format!("d[{a}] u[{b}]: {why}")) };
            }
        }
    }
    NormalizationReport { ok: true, checked, witness: None }
}
