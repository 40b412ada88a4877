use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::corpus::{random_degenerate_pair, random_pair};
use super::*;
use crate::exactnum::int;
use crate::quadforms::{kernel_basis, restrict};

fn q2(a: i64, b: i64) -> QuadScalar {
    QuadScalar::new(int(a), int(b), 2).unwrap()
}

fn lm(rows: &[Vec<i64>]) -> LinearMap {
    LinearMap::new(QMatrix::from_int_rows(rows)).unwrap()
}

fn case2_form() -> QuadraticForm {
    QuadraticForm::from_int_rows(&[vec![0, 0, 0, 1], vec![0, 1, 0, 0], vec![0, 0, -1, 0], vec![1, 0, 0, 0]]).unwrap()
}

#[test]
fn single_case_1a_is_fixed() {
    let q = QuadraticForm::diag_int(&[1, 1, -1]);
    let l = lm(&[vec![1, 0, 0]]);
    let red = reduce_single(&q, &l).unwrap();
    assert_eq!(red.case, SingleCase::OneA);
    assert_eq!(red.g_d, ScaledMatrix::identity(3));
    assert!(red.verify(&q, &l));
}

#[test]
fn single_case_2() {
    let q = QuadraticForm::diag_int(&[1, 1, -1]);
    let l = lm(&[vec![1, 0, 1]]);
    let red = reduce_single(&q, &l).unwrap();
    assert_eq!(red.case, SingleCase::Two);
    // target 2 x1 x3 + x2^2
    let expect = QuadraticForm::from_int_rows(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap();
    assert_eq!(red.target_form, expect);
    assert!(red.verify(&q, &l));
    assert!(congruence_check(q.gram(), &red.g_d, expect.gram()).unwrap());
}

#[test]
fn single_case_1b() {
    let q = QuadraticForm::diag_int(&[1, -1]);
    let l = lm(&[vec![0, 1]]);
    let red = reduce_single(&q, &l).unwrap();
    assert_eq!(red.case, SingleCase::OneB);
    assert_eq!(red.target_map, QMatrix::from_int_rows(&[vec![0, 1]]));
    assert!(red.verify(&q, &l));
}

#[test]
fn single_with_irrational_form_and_scales() {
    let q = QuadraticForm::diag_int(&[3, 2, -5, -7]);
    let z = QuadScalar::zero;
    let l = LinearMap::new(QMatrix::from_rows(vec![vec![q2(1, 0), q2(0, 1), z(), q2(2, -1)]]).unwrap()).unwrap();
    let red = reduce_single(&q, &l).unwrap();
    assert!(red.verify(&q, &l));
    let restricted = restrict(&q, &kernel_basis(&l)).unwrap();
    assert_eq!(signature(&restricted).rank, red.case.restricted_rank(4));
}

#[test]
fn single_errors() {
    let q = QuadraticForm::diag_int(&[1, 0, -1]);
    assert!(matches!(reduce_single(&q, &lm(&[vec![1, 0, 0]])), Err(CanonError::Degenerate { rank: 2, d: 3 })));
    assert!(LinearMap::new(QMatrix::zeros(1, 3)).is_err());
}

#[test]
fn canonical_pair_is_fixed_point() {
    let q = case2_form();
    let m = lm(&[vec![1, 0, 0, 0]]);
    let cert = reduce_pair(&q, &m).unwrap();
    assert_eq!(cert.g_d, ScaledMatrix::identity(4));
    assert_eq!(cert.g_s, ScaledMatrix::identity(1));
    let p = &cert.params;
    assert_eq!((p.m, p.r, p.n, p.p_prime, p.q_prime), (1, 1, 1, 0, 0));
    assert!(verify_certificate(&q, &m, &cert));

    // m = 0, s = 2 with a 2-dim middle form
    let mut g = QMatrix::diag_int(&[0, 0, 1, 1, -1]);
    g[(0, 1)] = QuadScalar::one();
    g[(1, 0)] = QuadScalar::one();
    let q = QuadraticForm::new(g).unwrap();
    let m = lm(&[vec![1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0]]);
    let cert = reduce_pair(&q, &m).unwrap();
    assert_eq!(cert.g_d, ScaledMatrix::identity(5));
    assert_eq!((cert.params.p_prime, cert.params.q_prime), (1, 1));
}

#[test]
fn flagship_pair() {
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1, -1]);
    let z = QuadScalar::zero;
    let m = LinearMap::new(QMatrix::from_rows(vec![vec![q2(1, 0), q2(0, 1), z(), z(), z()]]).unwrap()).unwrap();
    let cert = reduce_pair(&q, &m).unwrap();
    let p = &cert.params;
    assert_eq!((p.m, p.r, p.n, p.p_prime, p.q_prime), (0, 2, 2, 1, 0));
    assert!(verify_certificate(&q, &m, &cert));
}

#[test]
fn hyperbolic_example_and_hand_certificate() {
    let q = case2_form();
    let m = lm(&[vec![1, 0, 0, 0]]);
    let hand = CanonicalCertificate {
        g_d: ScaledMatrix::identity(4),
        g_s: ScaledMatrix::identity(1),
        params: CanonicalParams {
            d: 4,
            s: 1,
            m: 1,
            p_prime: 0,
            q_prime: 0,
            r: 1,
            n: 1,
            middle_form: QuadraticForm::new(QMatrix::zeros(0, 0)).unwrap(),
        },
    };
    assert!(verify_certificate(&q, &m, &hand));
}

#[test]
fn perturbed_certificate_fails() {
    let q = QuadraticForm::diag_int(&[2, 1, 1, -3, -1]);
    let m = lm(&[vec![1, 1, 0, 1, 0]]);
    let cert = reduce_pair(&q, &m).unwrap();
    assert!(verify_certificate(&q, &m, &cert));
    let mut core = cert.g_d.core().clone();
    core[(2, 3)] = &core[(2, 3)] + &QuadScalar::frac(1, 7);
    let bad = CanonicalCertificate {
        g_d: ScaledMatrix::new(cert.g_d.left_roots().to_vec(), core, cert.g_d.right_roots().to_vec()).unwrap(),
        ..cert
    };
    assert!(!verify_certificate(&q, &m, &bad));
}

#[test]
fn hypothesis_violation_is_named() {
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1]);
    let m = lm(&[vec![0, 0, 0, 1]]);
    let err = reduce_pair(&q, &m).unwrap_err();
    assert_eq!(err, CanonError::NotIndefinite { r: 3, n: 0 });
    assert!(err.to_string().contains("not indefinite"));
}

fn check_laws(q: &QuadraticForm, m: &LinearMap, cert: &CanonicalCertificate) {
    let p = &cert.params;
    let rank = signature(&restrict(q, &kernel_basis(m)).unwrap()).rank;
    assert_eq!(p.m, p.d - p.s - rank);
    assert!(p.r >= 1 && p.n >= 1);
    let sig = signature(q);
    assert_eq!((sig.p, sig.q), (p.p_prime + p.m + p.r, p.q_prime + p.m + p.n));
    let mid = signature(&p.middle_form);
    assert_eq!((mid.p, mid.q, mid.rank), (p.p_prime, p.q_prime, p.s - p.m));
}

#[test]
fn random_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..40 {
        let (q, m) = if k % 2 == 0 { random_pair(&mut rng, 8, 3) } else { random_degenerate_pair(&mut rng, 8, 3) };
        let cert = reduce_pair(&q, &m).unwrap();
        assert!(verify_certificate(&q, &m, &cert), "pair {k}");
        check_laws(&q, &m, &cert);
        if k % 2 == 1 {
            assert!(cert.params.m >= 1);
        }
    }
}

#[test]
fn random_single_cases_are_exclusive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let (q, m) = random_pair(&mut rng, 6, 1);
        let red = reduce_single(&q, &m).unwrap();
        assert!(red.verify(&q, &m));
        let rank = signature(&restrict(&q, &kernel_basis(&m)).unwrap()).rank;
        assert_eq!(rank, red.case.restricted_rank(q.dim()));
    }
}

#[test]
fn certificate_json_round_trip() {
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1, -1]);
    let m = LinearMap::new(QMatrix::from_rows(vec![vec![q2(1, 0), q2(0, 1), q2(0, 0), q2(0, 0), q2(0, 0)]]).unwrap())
        .unwrap();
    let cert = reduce_pair(&q, &m).unwrap();
    let text = serde_json::to_string(&cert).unwrap();
    let back: CanonicalCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
}
