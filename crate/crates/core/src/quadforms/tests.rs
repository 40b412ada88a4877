use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exactnum::{int, QuadScalar};

fn q2(a: i64, b: i64) -> QuadScalar {
    QuadScalar::new(int(a), int(b), 2).unwrap()
}

fn map(rows: Vec<Vec<QuadScalar>>) -> LinearMap {
    LinearMap::new(QMatrix::from_rows(rows).unwrap()).unwrap()
}

fn flagship() -> (QuadraticForm, LinearMap) {
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1, -1]);
    let z = QuadScalar::zero;
    let m = map(vec![vec![QuadScalar::one(), q2(0, 1), z(), z(), z()]]);
    (q, m)
}

/// Cyclic Jacobi eigenvalues of a symmetric float matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[test]
fn signature_examples() {
    assert_eq!(signature(&QuadraticForm::diag_int(&[1, 1, -1])), Signature { p: 2, q: 1, rank: 3 });
    let hyp = QuadraticForm::from_int_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
    assert_eq!(signature(&hyp), Signature { p: 1, q: 1, rank: 2 });
    // 2 x1 x4 + x2^2 - x3^2
    let case2 = QuadraticForm::from_int_rows(&[
        vec![0, 0, 0, 1],
        vec![0, 1, 0, 0],
        vec![0, 0, -1, 0],
        vec![1, 0, 0, 0],
    ])
    .unwrap();
    assert_eq!(signature(&case2), Signature { p: 2, q: 2, rank: 4 });
    let degenerate = QuadraticForm::diag_int(&[1, 0, -3]);
    assert_eq!(signature(&degenerate), Signature { p: 1, q: 1, rank: 2 });
}

#[test]
fn signature_of_block_shape_matches_float_oracle() {
    // x1^2 slot, then x2^2 - x3^2 - x4^2
    let q = QuadraticForm::diag_int(&[1, 1, -1, -1]);
    let restricted = restrict(&q, &QMatrix::identity(4).select_columns(&[1, 2, 3])).unwrap();
    let sig = signature(&restricted);
    let eig = jacobi_eigenvalues(restricted.gram().to_f64_rows());
    assert_eq!(sig.p, eig.iter().filter(|&&x| x > 0.0).count());
    assert_eq!(sig.q, eig.iter().filter(|&&x| x < 0.0).count());
    assert_eq!((sig.p, sig.q), (1, 2));
}

#[test]
fn float_oracle_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 200 {
        let n = 6;
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-10..=10);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let eig = jacobi_eigenvalues(rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect());
        if eig.iter().any(|x| x.abs() < 1e-3) {
            continue;
        }
        let sig = signature(&QuadraticForm::from_int_rows(&rows).unwrap());
        assert_eq!(sig.p, eig.iter().filter(|&&x| x > 0.0).count(), "{rows:?}");
        assert_eq!(sig.q, eig.iter().filter(|&&x| x < 0.0).count(), "{rows:?}");
        checked += 1;
    }
}

#[test]
fn diagonal_signatures() {
    for p in 0..=8usize {
        for q in 0..=8 - p {
            let mut e = vec![1i64; p];
            e.extend(std::iter::repeat(-1).take(q));
            assert_eq!(signature(&QuadraticForm::diag_int(&e)), Signature { p, q, rank: p + q });
        }
    }
}

#[test]
fn kernel_examples() {
    let z = QuadScalar::zero;
    let o = QuadScalar::one;
    let k = kernel_basis(&map(vec![vec![o(), z(), z()]]));
    assert_eq!(k, QMatrix::identity(3).select_columns(&[1, 2]));

    let k = kernel_basis(&map(vec![vec![o(), q2(0, 1), z()]]));
    let expect = QMatrix::from_columns(&[vec![q2(0, -1), o(), z()], vec![z(), z(), o()]], 3);
    assert_eq!(k, expect);

    let k = kernel_basis(&map(vec![vec![o(), z(), z(), z()], vec![z(), o(), z(), z()]]));
    assert_eq!(k, QMatrix::identity(4).select_columns(&[2, 3]));

    let bad = QMatrix::from_int_rows(&[vec![1, 2, 0], vec![2, 4, 0]]);
    assert_eq!(LinearMap::new(bad), Err(FormError::RankDeficient { rank: 1, s: 2 }));
}

#[test]
fn restrict_examples() {
    let q = QuadraticForm::diag_int(&[1, 1, -1]);
    let r = restrict(&q, &QMatrix::identity(3).select_columns(&[1, 2])).unwrap();
    assert_eq!(r, QuadraticForm::diag_int(&[1, -1]));
    assert_eq!(restrict(&q, &QMatrix::identity(3)).unwrap(), q);

    let (q, m) = flagship();
    let r = restrict(&q, &kernel_basis(&m)).unwrap();
    assert_eq!(r.gram()[(0, 0)], QuadScalar::from_int(3));
    let sig = signature(&r);
    assert_eq!((sig.p, sig.q), (2, 2));

    let dependent = QMatrix::from_int_rows(&[vec![1, 2], vec![0, 0], vec![0, 0]]);
    assert_eq!(restrict(&q_three(), &dependent), Err(FormError::DependentBasis));
}

fn q_three() -> QuadraticForm {
    QuadraticForm::diag_int(&[1, 1, -1])
}

#[test]
fn condition_examples() {
    let (q, m) = flagship();
    let rep = check_conditions(&q, &m).unwrap();
    assert!(rep.dim_ok && rep.rank_ok && rep.indefinite_restricted && rep.irrationality_ok);
    assert!(rep.overall && rep.q_rational && rep.q_nondegenerate);
    assert_eq!(rep.rank_restricted, 4);

    let rational = LinearMap::new(QMatrix::from_int_rows(&[vec![1, 0, 0, 0, 0]])).unwrap();
    let rep = check_conditions(&q, &rational).unwrap();
    assert!(!rep.irrationality_ok && !rep.overall);
    assert_eq!(rep.failures(), vec!["no rational combination of M"]);

    let q4 = QuadraticForm::diag_int(&[1, 1, -1, -1]);
    let z = QuadScalar::zero;
    let m2 = map(vec![
        vec![QuadScalar::one(), q2(0, 1), z(), z()],
        vec![z(), z(), QuadScalar::one(), q2(0, 1)],
    ]);
    assert!(!check_conditions(&q4, &m2).unwrap().dim_ok);
}

#[test]
fn irrationality_detects_hidden_rational_combination() {
    // L1 = x1 + sqrt2 x2, L2 = x3 + sqrt2 x2: L1 - L2 = x1 - x3 is rational
    let z = QuadScalar::zero;
    let o = QuadScalar::one;
    let m = map(vec![vec![o(), q2(0, 1), z(), z(), z(), z()], vec![z(), q2(0, 1), o(), z(), z(), z()]]);
    assert!(has_rational_combination(&m));
    let m = map(vec![vec![o(), q2(0, 1), z(), z(), z(), z()], vec![z(), z(), o(), q2(0, 1), z(), z()]]);
    assert!(!has_rational_combination(&m));
}

fn invertible_int_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n)
        .prop_filter("invertible", |rows| QMatrix::from_int_rows(rows).rank() == rows.len())
}

fn symmetric_int_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(-5i64..=5, n * (n + 1) / 2).prop_map(move |v| {
        let mut rows = vec![vec![0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                rows[i][j] = v[k];
                rows[j][i] = v[k];
                k += 1;
            }
        }
        rows
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn signature_is_congruence_invariant(a in symmetric_int_matrix(5), g in invertible_int_matrix(5)) {
        let a = QMatrix::from_int_rows(&a);
        let g = QMatrix::from_int_rows(&g);
        prop_assert_eq!(signature_of(&a), signature_of(&a.congruent(&g).unwrap()));
    }

    #[test]
    fn restriction_signature_ignores_basis_choice(a in symmetric_int_matrix(5), g in invertible_int_matrix(3)) {
        let q = QuadraticForm::from_int_rows(&a).unwrap();
        let b = QMatrix::identity(5).select_columns(&[0, 2, 4]);
        let b2 = b.mul(&QMatrix::from_int_rows(&g)).unwrap();
        prop_assert_eq!(signature(&restrict(&q, &b).unwrap()), signature(&restrict(&q, &b2).unwrap()));
    }
}
