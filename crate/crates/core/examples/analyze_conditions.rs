//! Evaluates the three density hypotheses on the sample problem files.
//!
//! `cargo run --example analyze_conditions`

use std::path::PathBuf;

use qdl::problem::Problem;
use qdl::quadforms::check_conditions;

fn main() {
    let dir = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../problems"));
    for name in ["flagship.json", "rational_control.json", "small_dimension.json"] {
        let p = Problem::load(&dir.join(name)).expect("problem file");
        let r = check_conditions(&p.q, &p.m).expect("shapes");
        let rs = r.restricted_signature;
        println!(
            "{name:<22} d={} s={} sig(Q|ker M)=({},{}) overall={} failed={:?}",
            r.d,
            r.s,
            rs.p,
            rs.q,
            r.overall,
            r.failures()
        );
    }
}
