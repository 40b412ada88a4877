use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exactnum::QMatrix;

fn form(rows: &[Vec<i64>]) -> QuadraticForm {
    QuadraticForm::from_int_rows(rows).unwrap()
}

fn int(a: i64) -> QuadScalar {
    QuadScalar::from_int(a)
}

fn scan(q: &QuadraticForm, a: i64, h: u32) -> PointSet {
    enumerate_box(q, &int(a), h, &ScanOptions::default()).unwrap().0
}

/// Full `(2h+1)^d` scan in exact rational arithmetic.
fn naive(q: &QuadraticForm, a: &QuadScalar, h: i64) -> PointSet {
    let d = q.dim();
    let mut pts = Vec::new();
    let mut x = vec![-h; d];
    loop {
        let v: Vec<QuadScalar> = x.iter().map(|&c| int(c)).collect();
        if q.eval(&v).unwrap() == *a {
            pts.push(x.clone());
        }
        let mut k = 0;
        while k < d && x[k] == h {
            x[k] = -h;
            k += 1;
        }
        if k == d {
            break;
        }
        x[k] += 1;
    }
    PointSet::from_points(d, &pts, h as u32, true)
}

#[test]
fn difference_of_squares() {
    let ps = scan(&QuadraticForm::diag_int(&[1, -1]), 0, 3);
    assert_eq!(ps.len(), 13);
    assert!(ps.exhaustive);
    assert!(ps.iter().all(|x| x[0].abs() == x[1].abs()));
}

#[test]
fn pythagorean_triples() {
    let ps = scan(&QuadraticForm::diag_int(&[1, 1, -1]), 0, 5);
    for x in [[3, 4, 5], [4, 3, 5], [-3, 4, -5], [0, 5, 5]] {
        assert!(ps.contains(&x), "{x:?}");
    }
}

#[test]
fn five_variable_form_matches_naive() {
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1, -1]);
    let fast = scan(&q, 0, 6);
    assert_eq!(fast, naive(&q, &int(0), 6));
}

#[test]
fn random_forms_match_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let d = rng.gen_range(2..=4);
        let mut g = QMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                // off-diagonal halves keep x^T A x integral-valued or not; both are fine
                let v = QuadScalar::frac(rng.gen_range(-4..=4), if i == j { 1 } else { 2 });
                g[(i, j)] = v.clone();
                g[(j, i)] = v;
            }
        }
        let q = QuadraticForm::new(g).unwrap();
        let a = int(rng.gen_range(-6..=6));
        let h = rng.gen_range(1..=7);
        let fast = enumerate_box(&q, &a, h, &ScanOptions::default()).unwrap().0;
        assert_eq!(fast, naive(&q, &a, h as i64), "Q = {}, a = {a}", q.gram());
    }
}

#[test]
fn rational_value_and_degenerate_forms() {
    // 2 x1 x2 = 1/1 after scaling by 1/2: x1 x2 = 1
    let q = QuadraticForm::new(QMatrix::diag(&[QuadScalar::frac(1, 2), QuadScalar::frac(-1, 3)])).unwrap();
    let a = QuadScalar::frac(1, 6);
    assert_eq!(enumerate_box(&q, &a, 5, &ScanOptions::default()).unwrap().0, naive(&q, &a, 5));
    let z = QuadraticForm::diag_int(&[0, 1]);
    assert_eq!(scan(&z, 4, 3), naive(&z, &int(4), 3));
    assert_eq!(scan(&QuadraticForm::diag_int(&[2]), 8, 4).len(), 2);
}

#[test]
fn budget_gives_partial_result() {
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1, -1]);
    let opts = ScanOptions { budget: 1000, jobs: Some(1) };
    let (ps, stats) = enumerate_box(&q, &int(0), 10, &opts).unwrap();
    assert!(!ps.exhaustive && !stats.exhaustive);
    assert!(ps.is_subset(&scan(&q, 0, 10)));
}

#[test]
fn height_monotone_and_verified() {
    let q = QuadraticForm::diag_int(&[1, 1, -1, -1]);
    let small = scan(&q, 1, 4);
    let big = scan(&q, 1, 7);
    assert!(small.is_subset(&big));
    assert!(big.verify(&q, &int(1)).unwrap());
    assert!(big.max_height() <= 7);
}

#[test]
fn irrational_input_rejected() {
    let q = QuadraticForm::new(QMatrix::diag(&[QuadScalar::sqrt_of(2).unwrap(), int(-1)])).unwrap();
    assert_eq!(enumerate_box(&q, &int(0), 2, &ScanOptions::default()).unwrap_err(), LatError::Irrational);
    assert_eq!(scan_box(&QuadraticForm::diag_int(&[1]), &int(0), 0, &ScanOptions::default(), &Collect::default).err(), Some(LatError::Height));
}

#[test]
fn pythagorean_automorph() {
    let q = QuadraticForm::diag_int(&[1, 1, -1]);
    let gamma = Automorph::from_rows(&[vec![1, 2, 2], vec![2, 1, 2], vec![2, 2, 3]]);
    assert!(gamma.verify(&q));
    assert_eq!(gamma.apply(&[3, 4, 5]).unwrap(), vec![21, 20, 29]);
    let autos = find_automorphs(&q, 500).unwrap();
    assert!(autos.iter().all(|a| a.verify(&q)));
    // the swap and every single sign flip are found
    assert!(autos.contains(&Automorph::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]])));
    assert!(autos.contains(&Automorph::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, -1]])));
    // and some unipotent element
    assert!(autos.iter().any(|a| a.gamma.iter().any(|&c| c.abs() >= 2)));
}

#[test]
fn hyperbolic_plane_has_only_sign_symmetries() {
    let q = form(&[vec![0, 1], vec![1, 0]]);
    let autos = find_automorphs(&q, 500).unwrap();
    assert!(!autos.is_empty());
    assert!(autos.iter().all(|a| a.gamma.iter().all(|c| c.abs() <= 1)));
}

#[test]
fn orbit_expansion() {
    let q = QuadraticForm::diag_int(&[1, 1, -1]);
    let seed = PointSet::from_points(3, &[vec![3, 4, 5]], 5, false);
    assert_eq!(orbit_expand(&q, &int(0), &seed, &[], 50, 100).unwrap().iter().collect::<Vec<_>>(), vec![&[3, 4, 5][..]]);
    let autos = find_automorphs(&q, 500).unwrap();
    let orbit = orbit_expand(&q, &int(0), &seed, &autos, 30, 10_000).unwrap();
    assert!(orbit.len() > 8);
    assert!(orbit.verify(&q, &int(0)).unwrap());
    assert!(orbit.is_subset(&scan(&q, 0, 30)));
    assert!(orbit_expand(&q, &int(0), &seed, &autos, 4, 100).unwrap().is_empty());
    assert_eq!(orbit_expand(&q, &int(0), &seed, &autos, 30, 5).unwrap().len(), 5);
}
