//! Runs the full identity scorecard over every valid parameter set with
//! `p', q', m <= 2`, `(r, n)` in `{(2,1), (1,2)}` and `d <= 10`.
//!
//! `cargo run --release --example verify_algebra -- [samples] [seed]`

use std::time::Instant;

use qdl::symalg::{sweep, verify_algebra};

fn main() {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let params = sweep(2, &[(2, 1), (1, 2)], 10);
    let start = Instant::now();
    let card = verify_algebra(&params, samples, seed);
    println!("{} parameter sets, {samples} samples, {:.1}s", params.len(), start.elapsed().as_secs_f64());
    for c in &card.checks {
        let status = if c.pass { "ok  " } else { "FAIL" };
        println!("{status} {:<28} {:>7} checked  {}", c.name, c.checked, c.witness.as_deref().unwrap_or(""));
    }
    for f in card.flags.iter().take(5) {
        println!("flag: {f}");
    }
    if card.flags.len() > 5 {
        println!("flag: ... {} more", card.flags.len() - 5);
    }
    std::process::exit(if card.pass() { 0 } else { 1 });
}
