//! Exact arithmetic in Q(sqrt 2) and square-root scaled matrices.
//!
//! `cargo run --example exact_arithmetic`

use qdl::exactnum::{congruence_check, int, QMatrix, QuadScalar, ScaledMatrix, Surd};

fn main() {
    let x = QuadScalar::new(int(1), int(1), 2).expect("sqrt 2");
    let y = x.inverse().expect("nonzero");
    println!("x = {x}, 1/x = {y}, x * 1/x = {}", x.checked_mul(&y).expect("same field"));
    println!("norm(x) = {}, conjugate(x) = {}", x.norm(), x.conjugate());

    // sqrt(3 + 2 sqrt 2) = 1 + sqrt 2 is detected exactly
    let s = Surd::term(QuadScalar::one(), QuadScalar::new(int(3), int(2), 2).expect("field")).expect("positive");
    println!("sqrt(3 + 2 sqrt 2) = {:?}", s.to_scalar().map(|v| v.to_string()));

    // diag(1/sqrt 2, 1/sqrt 2) takes x^2 + y^2 to (x^2 + y^2) / 2
    let half = QuadScalar::frac(1, 2);
    let g = ScaledMatrix::new(vec![half.clone(), half.clone()], QMatrix::identity(2), vec![QuadScalar::one(); 2])
        .expect("scales");
    let target = QMatrix::diag(&[half.clone(), half]);
    println!("g^T I g = I/2 exactly: {}", congruence_check(&target, &g, &QMatrix::identity(2)).expect("shapes"));
}
