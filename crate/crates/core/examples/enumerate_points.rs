//! Exhaustive integer points on x1^2 + x2^2 + x3^2 - x4^2 - x5^2 = 0 by
//! height, with the pruning statistics.
//!
//! `cargo run --release --example enumerate_points -- [H]`

use qdl::exactnum::QuadScalar;
use qdl::latpoints::{enumerate_box, ScanOptions};
use qdl::quadforms::QuadraticForm;

fn main() {
    let top: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    let q = QuadraticForm::diag_int(&[1, 1, 1, -1, -1]);
    let opts = ScanOptions::from_env().expect("node budget");
    for h in 1..=top {
        let (set, stats) = enumerate_box(&q, &QuadScalar::zero(), h, &opts).expect("rational form");
        assert!(set.verify(&q, &QuadScalar::zero()).expect("rational form"));
        println!("H={h:>3} points={:>8} nodes={:>9} exhaustive={}", set.len(), stats.nodes, stats.exhaustive);
    }
}
