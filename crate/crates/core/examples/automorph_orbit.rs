//! Integral automorphs of x^2 + y^2 - z^2 and the orbit of (3, 4, 5).
//!
//! `cargo run --release --example automorph_orbit`

use qdl::exactnum::QuadScalar;
use qdl::latpoints::{find_automorphs, orbit_expand, PointSet};
use qdl::quadforms::QuadraticForm;

fn main() {
    let q = QuadraticForm::diag_int(&[1, 1, -1]);
    let autos = find_automorphs(&q, 2).expect("rational form");
    println!("{} automorphs found, all exact: {}", autos.len(), autos.iter().all(|g| g.verify(&q)));
    let seed = PointSet::from_points(3, &[vec![3, 4, 5]], 5, false);
    let orbit = orbit_expand(&q, &QuadScalar::zero(), &seed, &autos, 100, 10_000).expect("orbit");
    println!("orbit of (3,4,5) within height 100: {} points", orbit.len());
    for x in orbit.iter().filter(|x| x.iter().all(|&c| c > 0) && x[0] < x[1]).take(12) {
        println!("  {x:?}");
    }
}
