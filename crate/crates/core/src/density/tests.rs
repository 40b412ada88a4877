use super::*;

const FLAGSHIP: &str = r#"{
  "version": 1, "d": 5, "s": 1, "sqrtD": 2,
  "Q": [[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,-1,0],[0,0,0,0,-1]],
  "M": [[1, {"a":0,"b":1,"sqrt":2}, 0, 0, 0]],
  "a": 0
}"#;

const CONTROL: &str = r#"{
  "version": 1, "d": 5, "s": 1,
  "Q": [[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,-1,0],[0,0,0,0,-1]],
  "M": [[1,0,0,0,0]],
  "a": 0
}"#;

fn block(lo: f64, hi: f64, step: f64, eps: f64, heights: Vec<u32>) -> ExperimentBlock {
    ExperimentBlock { lo, hi, step, eps, heights, source: PointSource::Box }
}

fn vp(v: &[f64], w: &[i64]) -> ValuePoint {
    ValuePoint { value: v.to_vec(), witness: w.to_vec() }
}

#[test]
fn nearest_value_hand_cases() {
    let idx = ValueIndex::new(vec![vp(&[1.0], &[1]), vp(&[0.0], &[0]), vp(&[0.5], &[5])]);
    let (d, p) = idx.nearest_value(&[0.7]).unwrap();
    assert!((d - 0.2).abs() < 1e-12 && p.witness == [5]);
    let (d, p) = idx.nearest_value(&[-3.0]).unwrap();
    assert_eq!((d, p.witness.as_slice()), (3.0, [0].as_slice()));
    // equidistant: smaller witness wins
    let (d, p) = idx.nearest_value(&[0.25]).unwrap();
    assert_eq!((d, p.witness.as_slice()), (0.25, [0].as_slice()));
    assert!(ValueIndex::default().nearest_value(&[0.0]).is_none());
}

#[test]
fn nearest_value_sup_norm_in_two_dims() {
    // first coordinate close but second far; the true nearest is further left
    let idx = ValueIndex::new(vec![vp(&[0.0, 5.0], &[1]), vp(&[-0.9, 0.0], &[2]), vp(&[3.0, 0.0], &[3])]);
    let (d, p) = idx.nearest_value(&[0.0, 0.0]).unwrap();
    assert_eq!((d, p.witness.as_slice()), (0.9, [2].as_slice()));
}

#[test]
fn nearest_value_matches_linear_scan() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let pts: Vec<ValuePoint> = (0..200)
        .map(|k| vp(&[rng.gen_range(-3..=3) as f64 * 0.5, rng.gen_range(-3..=3) as f64 * 0.5], &[k]))
        .collect();
    let idx = ValueIndex::new(pts.clone());
    for _ in 0..200 {
        let b = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let best = pts
            .iter()
            .map(|p| (sup_dist(&p.value, &b), p.witness.clone()))
            .min_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)))
            .unwrap();
        let (d, p) = idx.nearest_value(&b).unwrap();
        assert_eq!((d, p.witness.clone()), best);
    }
}

#[test]
fn target_grid() {
    let b = block(-5.0, 5.0, 0.25, 0.25, vec![1]);
    let t = b.targets(1);
    assert_eq!(t.len(), 41);
    assert_eq!((t[0][0], t[40][0]), (-5.0, 5.0));
    assert_eq!(block(0.0, 1.0, 0.5, 0.1, vec![1]).targets(2).len(), 9);
}

#[test]
fn invalid_blocks_are_rejected() {
    assert!(block(0.0, 1.0, 0.5, 0.0, vec![1]).validate().is_err());
    assert!(block(1.0, 0.0, 0.5, 0.1, vec![1]).validate().is_err());
    assert!(block(0.0, 1.0, 0.5, 0.1, vec![2, 2]).validate().is_err());
    assert!(block(0.0, 1.0, 0.5, 0.1, vec![]).validate().is_err());
}

#[test]
fn negative_control_integer_values() {
    // M = x1 takes only integer values: once H >= 5 exactly the 11 integer
    // targets are hit, quarter targets sit at eps and half targets at 2 eps
    let p = Problem::parse(CONTROL).unwrap();
    let r = run_experiment(&p, &block(-5.0, 5.0, 0.25, 0.25, vec![3, 5, 8]), 0, &ScanOptions::default()).unwrap();
    assert!(!r.hypotheses_ok && r.status == "hypotheses-violated");
    assert_eq!(r.levels[0].hits, 7);
    for l in &r.levels[1..] {
        assert_eq!(l.hits, 11);
        assert_eq!(l.max_gap, Some(0.5));
        assert_eq!(l.histogram, [11, 0, 0, 20, 10]);
    }
    assert!(r.audit_ok && r.exhaustive);
}

#[test]
fn flagship_small_heights_frozen() {
    let p = Problem::parse(FLAGSHIP).unwrap();
    let r = run_experiment(&p, &block(-5.0, 5.0, 0.25, 0.25, vec![1, 2, 3]), 0, &ScanOptions::default()).unwrap();
    assert!(r.hypotheses_ok && r.status == "ok" && r.audit_ok);
    let hits: Vec<usize> = r.levels.iter().map(|l| l.hits).collect();
    assert_eq!(hits, [15, 37, 41]);
    assert_eq!(r.levels[2].points, 889);
    // monotone in H: one scan feeds every level
    assert!(r.levels.windows(2).all(|w| w[0].points <= w[1].points));
}

#[test]
fn points_match_direct_enumeration() {
    let p = Problem::parse(FLAGSHIP).unwrap();
    let r = run_experiment(&p, &block(0.0, 1.0, 0.5, 0.25, vec![1, 2, 4]), 0, &ScanOptions::default()).unwrap();
    for l in &r.levels {
        let (set, _) = enumerate_box(&p.q, &p.a, l.height, &ScanOptions::default()).unwrap();
        assert_eq!(l.points as usize, set.len());
    }
}

#[test]
fn report_is_deterministic_across_jobs() {
    let p = Problem::parse(FLAGSHIP).unwrap();
    let b = block(-2.0, 2.0, 0.5, 0.25, vec![2, 4]);
    let one = run_experiment(&p, &b, 1, &ScanOptions { jobs: Some(1), ..Default::default() }).unwrap();
    let many = run_experiment(&p, &b, 1, &ScanOptions { jobs: Some(3), ..Default::default() }).unwrap();
    assert_eq!(one.to_json(), many.to_json());
    assert_eq!(one.to_csv(), many.to_csv());
    assert!(one.to_csv().starts_with("H,points,coverage,max_gap\n"));
}

#[test]
fn orbit_source_stays_on_quadric() {
    let p = Problem::parse(FLAGSHIP).unwrap();
    let mut b = block(-2.0, 2.0, 0.5, 0.25, vec![2, 4]);
    b.source = PointSource::Orbit { seed_height: 1, cap: 5000, search_budget: 2 };
    let r = run_experiment(&p, &b, 0, &ScanOptions::default()).unwrap();
    assert!(!r.exhaustive && r.audit_ok);
    let full = run_experiment(&p, &block(-2.0, 2.0, 0.5, 0.25, vec![2, 4]), 0, &ScanOptions::default()).unwrap();
    for (o, f) in r.levels.iter().zip(&full.levels) {
        assert!(o.points <= f.points && o.hits <= f.hits);
    }
}

#[test]
fn single_point_level_carries_note() {
    // x1^2 + x2^2 = 0 has only the origin
    let src = r#"{"d":2,"s":1,"Q":[[1,0],[0,1]],"M":[[1,0]],"a":0}"#;
    let p = Problem::parse(src).unwrap();
    let r = run_experiment(&p, &block(0.0, 1.0, 1.0, 0.5, vec![1]), 0, &ScanOptions::default()).unwrap();
    assert_eq!(r.levels[0].points, 1);
    assert!(r.levels[0].note.as_deref().unwrap().contains("unverified"));
    assert_eq!(r.levels[0].hits, 1);
}

#[test]
fn rational_control_plateaus_at_two_fifths() {
    // integer values, eps 0.1, targets 0, 0.25, .., 1: only 0 and 1 are hit
    let p = Problem::parse(CONTROL).unwrap();
    let r = run_experiment(&p, &block(0.0, 1.0, 0.25, 0.1, vec![1, 4, 16]), 0, &ScanOptions::default()).unwrap();
    assert!(r.levels.iter().all(|l| l.hits == 2 && l.targets == 5));
}

#[test]
fn hand_values_cover_unit_interval() {
    let idx = ValueIndex::new(vec![vp(&[0.0], &[0]), vp(&[0.5], &[1]), vp(&[1.0], &[2])]);
    let t = block(0.0, 1.0, 0.25, 0.3, vec![1]).targets(1);
    assert!(t.iter().all(|b| idx.nearest_value(b).unwrap().0 < 0.3));
    // values {1, 3}, b = 2: distance 1, smaller witness
    let idx = ValueIndex::new(vec![vp(&[3.0], &[0, 3]), vp(&[1.0], &[0, 1])]);
    let (d, w) = idx.nearest_value(&[2.0]).unwrap();
    assert_eq!((d, w.witness.as_slice()), (1.0, [0, 1].as_slice()));
}
