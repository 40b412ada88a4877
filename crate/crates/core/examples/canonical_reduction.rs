//! Canonical reduction of (Q, M) with an exact certificate, plus the
//! single-form normal forms.
//!
//! `cargo run --example canonical_reduction`

use qdl::canon::{reduce_pair, reduce_single, verify_certificate};
use qdl::exactnum::{int, QMatrix, QuadScalar};
use qdl::quadforms::{LinearMap, QuadraticForm};

fn main() {
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1, -1]);
    let r2 = QuadScalar::new(int(0), int(1), 2).expect("sqrt 2");
    let row = vec![QuadScalar::one(), r2, QuadScalar::zero(), QuadScalar::zero(), QuadScalar::zero()];
    let m = LinearMap::new(QMatrix::from_rows(vec![row]).expect("row")).expect("full rank");
    let cert = reduce_pair(&q, &m).expect("hypothesis holds");
    let p = &cert.params;
    println!("params: m={} p'={} q'={} r={} n={}", p.m, p.p_prime, p.q_prime, p.r, p.n);
    println!("middle form: {:?}", p.middle_form.gram().to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>());
    println!("certificate verified exactly: {}", verify_certificate(&q, &m, &cert));

    // an isotropic linear form lands in the case with a hyperbolic pair
    let iso = LinearMap::new(QMatrix::from_rows(vec![[1, 0, 0, 1, 0].map(QuadScalar::from_int).to_vec()]).expect("row"))
        .expect("full rank");
    let single = reduce_single(&q, &iso).expect("nondegenerate");
    println!("x1 + x4 is case {} and verifies: {}", single.case.tag(), single.verify(&q, &iso));
}
