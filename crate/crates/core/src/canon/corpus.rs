//! Seeded generators of pairs satisfying the reduction hypothesis.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::exactnum::{rat, QMatrix, QuadScalar};
use crate::quadforms::{check_conditions, LinearMap, QuadraticForm};

use super::CanonicalParams;

fn entry<R: Rng>(rng: &mut R) -> QuadScalar {
    // halves in [-5, 5], integers twice as likely
    let k = rng.gen_range(-10..=10i64);
    if rng.gen_bool(0.5) {
        QuadScalar::from_int(k / 2)
    } else {
        QuadScalar::rational(rat(k, 2))
    }
}

fn in_range(m: &QMatrix) -> bool {
    let five = QuadScalar::from_int(5);
    m.entries().all(|x| !(&x.abs() - &five).is_positive())
}

/// Random nondegenerate `Q` and full-rank `M` with `Q|ker M` indefinite;
/// all entries rational in `[-5, 5]`.
pub fn random_pair<R: Rng>(rng: &mut R, max_d: usize, max_s: usize) -> (QuadraticForm, LinearMap) {
    loop {
        let d = rng.gen_range(3..=max_d);
        let s = rng.gen_range(1..=max_s.min(d - 2));
        let mut a = QMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let x = entry(rng);
                a[(i, j)] = x.clone();
                a[(j, i)] = x;
            }
        }
        let rows = (0..s).map(|_| (0..d).map(|_| entry(rng)).collect()).collect();
        let Ok(m) = LinearMap::new(QMatrix::from_rows(rows).expect("rectangular")) else { continue };
        let q = QuadraticForm::new(a).expect("symmetric");
        let rep = check_conditions(&q, &m).expect("shapes");
        if rep.q_nondegenerate && rep.indefinite_restricted {
            return (q, m);
        }
    }
}

/// Canonical pair with `m >= 1`, moved by a random integral change of
/// variables; entries kept rational in `[-5, 5]`.
pub fn random_degenerate_pair<R: Rng>(rng: &mut R, max_d: usize, max_s: usize) -> (QuadraticForm, LinearMap) {
    loop {
        let s = rng.gen_range(1..=max_s);
        let m = rng.gen_range(1..=s);
        let (r, n) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let d = s + m + r + n;
        if d > max_d {
            continue;
        }
        let k = s - m;
        let mut mid = QMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let x = QuadScalar::from_int(rng.gen_range(-2..=2));
                mid[(i, j)] = x.clone();
                mid[(j, i)] = x;
            }
        }
        if mid.rank() != k {
            continue;
        }
        let params = CanonicalParams {
            d,
            s,
            m,
            p_prime: 0,
            q_prime: 0,
            r,
            n,
            middle_form: QuadraticForm::new(mid).expect("symmetric"),
        };
        let q0 = params.target_gram();
        let g = random_unimodular(rng, d);
        let mut gs = QMatrix::identity(s);
        for i in 0..s {
            for j in 0..s {
                if i != j && rng.gen_bool(0.3) {
                    gs[(i, j)] = QuadScalar::from_int(rng.gen_range(-1..=1));
                }
            }
        }
        if gs.rank() != s {
            continue;
        }
        let a = q0.congruent(&g).expect("square");
        let mrows = gs.mul(&LinearMap::leading(s, d).matrix().mul(&g).expect("shape")).expect("shape");
        if !in_range(&a) || !in_range(&mrows) {
            continue;
        }
        return (QuadraticForm::new(a).expect("symmetric"), LinearMap::new(mrows).expect("full rank"));
    }
}

/// Permutation times a sparse unit triangular integral matrix.
fn random_unimodular<R: Rng>(rng: &mut R, d: usize) -> QMatrix {
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let mut t = QMatrix::identity(d);
    for i in 0..d {
        for j in i + 1..d {
            if rng.gen_bool(0.25) {
                t[(i, j)] = QuadScalar::from_int(rng.gen_range(-1..=1));
            }
        }
    }
    QMatrix::identity(d).select_rows(&perm).mul(&t).expect("square")
}
