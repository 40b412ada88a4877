//! Coverage of M = x1 + sqrt(2) x2 on x1^2+x2^2+x3^2-x4^2-x5^2 = 0.
//!
//! `cargo run --release --example density_flagship [problem.json]`

use std::path::PathBuf;
use std::time::Instant;

use qdl::density::run_experiment;
use qdl::latpoints::ScanOptions;
use qdl::problem::Problem;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../problems/flagship.json")));
    let problem = Problem::load(&path).expect("problem file");
    let block = problem.experiment.clone().expect("experiment block");
    let t = Instant::now();
    let report = run_experiment(&problem, &block, 0, &ScanOptions::from_env().expect("node budget")).expect("experiment");
    println!("status={} audit_ok={} exhaustive={}", report.status, report.audit_ok, report.exhaustive);
    for l in &report.levels {
        println!(
            "H={:>3} points={:>9} values={:>8} coverage={:.4} max_gap={:?} histogram={:?}",
            l.height, l.points, l.distinct_values, l.coverage, l.max_gap, l.histogram
        );
    }
    eprintln!("elapsed {:.1}s", t.elapsed().as_secs_f64());
}
