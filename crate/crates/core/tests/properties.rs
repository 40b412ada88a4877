//! Property tests spanning modules.

use proptest::prelude::*;

use qdl::density::{run_experiment, ExperimentBlock, PointSource, ValueIndex, ValuePoint};
use qdl::exactnum::QuadScalar;
use qdl::latpoints::{enumerate_box, ScanOptions};
use qdl::problem::Problem;
use qdl::quadforms::QuadraticForm;

fn diag_problem(diag: &[i64], m: &str) -> Problem {
    let d = diag.len();
    let rows: Vec<String> = (0..d)
        .map(|i| format!("[{}]", (0..d).map(|j| if i == j { diag[i].to_string() } else { "0".into() }).collect::<Vec<_>>().join(",")))
        .collect();
    let src = format!(r#"{{"d":{d},"s":1,"sqrtD":2,"Q":[{}],"M":[{m}],"a":0}}"#, rows.join(","));
    Problem::parse(&src).unwrap()
}

fn block(eps: f64, heights: Vec<u32>) -> ExperimentBlock {
    ExperimentBlock { lo: -2.0, hi: 2.0, step: 0.5, eps, heights, source: PointSource::Box }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coverage_monotone_in_h_and_eps(
        signs in prop::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)], 4),
        e1 in 0.05f64..0.5,
        de in 0.0f64..0.5,
    ) {
        let p = diag_problem(&signs, r#"[1, {"a":0,"b":1,"sqrt":2}, 0, 0]"#);
        let lo = run_experiment(&p, &block(e1, vec![1, 2, 3]), 0, &ScanOptions::default()).unwrap();
        let hi = run_experiment(&p, &block(e1 + de, vec![1, 2, 3]), 0, &ScanOptions::default()).unwrap();
        for w in lo.levels.windows(2) {
            prop_assert!(w[0].hits <= w[1].hits && w[0].points <= w[1].points);
        }
        for (a, b) in lo.levels.iter().zip(&hi.levels) {
            prop_assert!(a.hits <= b.hits);
            prop_assert!((0.0..=1.0).contains(&a.coverage));
        }
        prop_assert!(lo.audit_ok && hi.audit_ok);
    }

    #[test]
    fn enumeration_nested_in_h(
        entries in prop::collection::vec(-3i64..=3, 6),
        a in -4i64..=4,
        h in 1u32..6,
    ) {
        let rows = vec![
            vec![entries[0], entries[1], entries[2]],
            vec![entries[1], entries[3], entries[4]],
            vec![entries[2], entries[4], entries[5]],
        ];
        let q = QuadraticForm::from_int_rows(&rows).unwrap();
        let a = QuadScalar::from_int(a);
        let (small, _) = enumerate_box(&q, &a, h, &ScanOptions::default()).unwrap();
        let (big, _) = enumerate_box(&q, &a, h + 1, &ScanOptions::default()).unwrap();
        prop_assert!(small.is_subset(&big));
        prop_assert!(big.verify(&q, &a).unwrap());
        prop_assert!(small.max_height() <= h);
    }

    #[test]
    fn nearest_value_is_exact_argmin(
        vals in prop::collection::vec((-8i32..8, -8i32..8), 1..40),
        b in (-5.0f64..5.0, -5.0f64..5.0),
    ) {
        let pts: Vec<ValuePoint> = vals
            .iter()
            .enumerate()
            .map(|(k, (x, y))| ValuePoint { value: vec![*x as f64 * 0.5, *y as f64 * 0.5], witness: vec![k as i64] })
            .collect();
        let target = [b.0, b.1];
        let idx = ValueIndex::new(pts.clone());
        let (d, w) = idx.nearest_value(&target).unwrap();
        let best = pts
            .iter()
            .map(|p| p.value.iter().zip(&target).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(d, best);
        let first = pts.iter().find(|p| p.value.iter().zip(&target).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max) == best).unwrap();
        prop_assert_eq!(&w.witness, &first.witness);
    }
}
