//! Coverage experiments: how closely `M(x)`, `x` an integer point of
//! `Q = a` with `|x|_inf <= H`, approaches each point of a target grid in
//! `R^s`, for a schedule of heights `H`.
//!
//! One scan at the largest height feeds every level: each point is
//! bucketed by its height. Values are keyed exactly (`M` is split as
//! `M_a + sqrt(D) M_b` and scaled to integers), so repeated values collapse
//! before any float work. Distances use the sup-norm; a target counts as
//! covered when its nearest value is at distance `< eps`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{lcm_big, rational_to_f64, Rational};
use crate::latpoints::{
    enumerate_box, find_automorphs, orbit_expand, scan_box, IntegralProblem, LatError, PointSink, ScanOptions,
};
use crate::problem::Problem;
use crate::quadforms::check_conditions;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error(transparent)]
    Lattice(#[from] LatError),
}

/// Where the points come from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum PointSource {
    /// Exhaustive box scan at the largest height.
    #[default]
    Box,
    /// Box scan at `seed_height`, then closure under found automorphs up to
    /// the largest height, capped at `cap` points.
    Orbit { seed_height: u32, cap: usize, search_budget: usize },
}

/// Experiment block of a problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    /// Target box `[lo, hi]^s` with grid step `step`.
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub eps: f64,
    /// Strictly increasing height schedule.
    pub heights: Vec<u32>,
    #[serde(default)]
    pub source: PointSource,
}

impl ExperimentBlock {
    pub fn validate(&self) -> Result<(), DensityError> {
        let bad = |m: &str| Err(DensityError::Spec(m.to_string()));
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be positive");
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return bad("need lo <= hi");
        }
        if self.heights.is_empty() || self.heights[0] == 0 || self.heights.windows(2).any(|w| w[0] >= w[1]) {
            return bad("heights must be positive and strictly increasing");
        }
        if self.grid_len() > 1 << 20 {
            return bad("target grid has more than 2^20 points per axis");
        }
        Ok(())
    }

    /// Grid points per axis.
    pub fn grid_len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    /// Targets in lexicographic grid order.
    pub fn targets(&self, s: usize) -> Vec<Vec<f64>> {
        let n = self.grid_len();
        let axis: Vec<f64> = (0..n).map(|k| self.lo + k as f64 * self.step).collect();
        let mut out = vec![Vec::new()];
        for _ in 0..s {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&b| {
                        let mut t = prefix.clone();
                        t.push(b);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// A value `M(x)` with its witness `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuePoint {
    pub value: Vec<f64>,
    pub witness: Vec<i64>,
}

/// Values sorted by first coordinate for nearest-value queries.
#[derive(Clone, Debug, Default)]
pub struct ValueIndex {
    points: Vec<ValuePoint>,
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl ValueIndex {
    pub fn new(mut points: Vec<ValuePoint>) -> Self {
        points.sort_by(|a, b| a.value[0].total_cmp(&b.value[0]).then_with(|| a.witness.cmp(&b.witness)));
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest value to `b` in the sup-norm; ties go to the
    /// lexicographically smallest witness. `None` on an empty index.
    pub fn nearest_value(&self, b: &[f64]) -> Option<(f64, &ValuePoint)> {
        let n = self.points.len();
        if n == 0 {
            return None;
        }
        let start = self.points.partition_point(|p| p.value[0] < b[0]);
        let mut best: Option<(f64, usize)> = None;
        let better = |d: f64, k: usize, best: &Option<(f64, usize)>, pts: &[ValuePoint]| match best {
            None => true,
            Some((bd, bk)) => d < *bd || (d == *bd && pts[k].witness < pts[*bk].witness),
        };
        // walk right then left while the first coordinate alone can still tie
        for k in start..n {
            let gap = (self.points[k].value[0] - b[0]).abs();
            if best.is_some_and(|(bd, _)| gap > bd) {
                break;
            }
            let d = sup_dist(&self.points[k].value, b);
            if better(d, k, &best, &self.points) {
                best = Some((d, k));
            }
        }
        for k in (0..start).rev() {
            let gap = (self.points[k].value[0] - b[0]).abs();
            if best.is_some_and(|(bd, _)| gap > bd) {
                break;
            }
            let d = sup_dist(&self.points[k].value, b);
            if better(d, k, &best, &self.points) {
                best = Some((d, k));
            }
        }
        best.map(|(d, k)| (d, &self.points[k]))
    }
}

/// `M` scaled to integers: `M = (A + sqrt(D) B) / den`.
#[derive(Clone, Debug)]
struct IntMap {
    s: usize,
    d: usize,
    a: Vec<i128>,
    b: Vec<i128>,
    den: f64,
    sqrt_d: f64,
    irrational: bool,
}

impl IntMap {
    fn new(p: &Problem) -> Result<Self, DensityError> {
        let m = p.m.matrix();
        let parts: Vec<(Rational, Rational)> = m.entries().map(|x| x.parts()).collect();
        let mut den = BigInt::one();
        for (a, b) in &parts {
            den = lcm_big(&lcm_big(&den, a.denom()), b.denom());
        }
        let big = Rational::from_integer(den.clone());
        let conv = |x: &Rational| (x * &big).to_integer().to_i128().ok_or(LatError::Overflow);
        let a = parts.iter().map(|(a, _)| conv(a)).collect::<Result<Vec<_>, _>>()?;
        let b = parts.iter().map(|(_, b)| conv(b)).collect::<Result<Vec<_>, _>>()?;
        let root = m.root().unwrap_or(0);
        Ok(Self {
            s: m.rows(),
            d: m.cols(),
            irrational: b.iter().any(|&x| x != 0),
            a,
            b,
            den: rational_to_f64(&big),
            sqrt_d: (root as f64).sqrt(),
        })
    }

    fn key(&self, x: &[i64]) -> Vec<i128> {
        let dot = |m: &[i128], i: usize| (0..self.d).map(|j| m[i * self.d + j] * x[j] as i128).sum::<i128>();
        let mut k: Vec<i128> = (0..self.s).map(|i| dot(&self.a, i)).collect();
        if self.irrational {
            k.extend((0..self.s).map(|i| dot(&self.b, i)));
        }
        k
    }

    /// Float value of a key and a bound on its rounding error.
    fn value(&self, key: &[i128]) -> (Vec<f64>, f64) {
        let u = f64::EPSILON / 2.0;
        let mut bound: f64 = 0.0;
        let v = (0..self.s)
            .map(|i| {
                let ka = key[i] as f64;
                let kb = if self.irrational { key[self.s + i] as f64 } else { 0.0 };
                // each of ka, kb, sqrt D, the product, sum and quotient rounds once
                bound = bound.max(6.0 * u * (ka.abs() + (kb * self.sqrt_d).abs()) / self.den);
                (ka + kb * self.sqrt_d) / self.den
            })
            .collect();
        (v, bound)
    }
}

/// Per exact value: the lexicographically smallest witness in each height
/// band (points with `H_{k-1} < |x|_inf <= H_k`).
#[derive(Clone, Debug)]
struct Entry {
    witness: Vec<Option<Vec<i64>>>,
}

struct DensitySink {
    map: Arc<IntMap>,
    heights: Arc<Vec<u32>>,
    values: HashMap<Vec<i128>, Entry>,
    counts: Vec<u64>,
}

impl DensitySink {
    fn new(map: Arc<IntMap>, heights: Arc<Vec<u32>>) -> Self {
        let n = heights.len();
        Self { map, heights, values: HashMap::new(), counts: vec![0; n] }
    }

    fn band(&self, x: &[i64]) -> Option<usize> {
        let h = x.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
        self.heights.iter().position(|&hk| h <= hk as u64)
    }
}

fn lexmin(slot: &mut Option<Vec<i64>>, x: Vec<i64>) {
    if slot.as_ref().is_none_or(|w| x < *w) {
        *slot = Some(x);
    }
}

impl PointSink for DensitySink {
    fn visit(&mut self, x: &[i64]) {
        let Some(band) = self.band(x) else { return };
        self.counts[band] += 1;
        let key = self.map.key(x);
        let n = self.heights.len();
        let e = self.values.entry(key).or_insert_with(|| Entry { witness: vec![None; n] });
        lexmin(&mut e.witness[band], x.to_vec());
    }

    fn merge(&mut self, other: Self) {
        for (c, o) in self.counts.iter_mut().zip(other.counts) {
            *c += o;
        }
        for (k, e) in other.values {
            match self.values.get_mut(&k) {
                None => {
                    self.values.insert(k, e);
                }
                Some(mine) => {
                    for (slot, w) in mine.witness.iter_mut().zip(e.witness) {
                        if let Some(w) = w {
                            lexmin(slot, w);
                        }
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nearest {
    pub target: Vec<f64>,
    pub distance: Option<f64>,
    pub value: Option<Vec<f64>>,
    pub witness: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub height: u32,
    pub points: u64,
    pub distinct_values: usize,
    pub hits: usize,
    pub targets: usize,
    pub coverage: f64,
    /// Largest nearest distance over the targets; `None` without points.
    pub max_gap: Option<f64>,
    /// Bound on the float error of any reported value.
    pub roundoff_bound: f64,
    /// Nearest distances in `[0, eps/4), [eps/4, eps/2), [eps/2, eps),
    /// [eps, 2 eps), [2 eps, inf)`.
    pub histogram: [usize; 5],
    pub note: Option<String>,
    pub nearest: Vec<Nearest>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub d: usize,
    pub s: usize,
    pub seed: u64,
    pub experiment: ExperimentBlock,
    pub hypotheses_ok: bool,
    /// `"ok"` or `"hypotheses-violated"`.
    pub status: String,
    pub exhaustive: bool,
    pub scan_order: Vec<usize>,
    /// Every hit re-checked: exact `Q(x) = a` and a direct float evaluation
    /// of `M(x)` within `eps` plus the rounding bound.
    pub audit_ok: bool,
    pub levels: Vec<LevelReport>,
}

impl CoverageReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// `H,points,coverage,max_gap`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["H", "points", "coverage", "max_gap"]).expect("in memory");
        for l in &self.levels {
            let gap = l.max_gap.map(|g| g.to_string()).unwrap_or_default();
            w.write_record([l.height.to_string(), l.points.to_string(), l.coverage.to_string(), gap]).expect("in memory");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn coverages(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.coverage).collect()
    }
}

fn histogram(dists: &[Option<f64>], eps: f64) -> [usize; 5] {
    let mut h = [0; 5];
    for d in dists {
        let k = match d {
            Some(d) if *d < eps / 4.0 => 0,
            Some(d) if *d < eps / 2.0 => 1,
            Some(d) if *d < eps => 2,
            Some(d) if *d < 2.0 * eps => 3,
            _ => 4,
        };
        h[k] += 1;
    }
    h
}

/// Direct float evaluation `sum_j M_ij x_j` and its error bound.
fn naive_value(p: &Problem, x: &[i64]) -> (Vec<f64>, f64) {
    let m = p.m.matrix();
    let d = m.cols();
    let u = f64::EPSILON / 2.0;
    let mut bound: f64 = 0.0;
    let v = (0..m.rows())
        .map(|i| {
            let mut acc = 0.0;
            let mut mag = 0.0;
            for j in 0..d {
                let t = m[(i, j)].to_f64() * x[j] as f64;
                acc += t;
                mag += t.abs();
            }
            bound = bound.max(mag * (d as f64 + 1.0) * u);
            acc
        })
        .collect();
    (v, bound)
}

/// Runs the experiment. Hypotheses are checked and reported; a violation
/// does not stop the run.
pub fn run_experiment(
    problem: &Problem,
    block: &ExperimentBlock,
    seed: u64,
    opts: &ScanOptions,
) -> Result<CoverageReport, DensityError> {
    block.validate()?;
    let hypotheses_ok = check_conditions(&problem.q, &problem.m).map(|r| r.overall).unwrap_or(false);
    let int_problem = IntegralProblem::new(&problem.q, &problem.a)?;
    let map = Arc::new(IntMap::new(problem)?);
    let heights = Arc::new(block.heights.clone());
    let top = *block.heights.last().expect("validated");
    let make = || DensitySink::new(map.clone(), heights.clone());
    let (sink, exhaustive, order) = match &block.source {
        PointSource::Box => {
            let (sink, stats) = scan_box(&problem.q, &problem.a, top, opts, &make)?;
            (sink, stats.exhaustive, stats.order)
        }
        PointSource::Orbit { seed_height, cap, search_budget } => {
            let (seeds, stats) = enumerate_box(&problem.q, &problem.a, (*seed_height).max(1), opts)?;
            let autos = find_automorphs(&problem.q, *search_budget)?;
            let pts = orbit_expand(&problem.q, &problem.a, &seeds, &autos, top, *cap)?;
            let mut sink = make();
            for x in pts.iter() {
                sink.visit(x);
            }
            (sink, false, stats.order)
        }
    };

    let s = map.s;
    let targets = block.targets(s);
    let mut levels = Vec::with_capacity(heights.len());
    let mut audit_ok = true;
    let mut points = 0u64;
    let mut keys: Vec<(&Vec<i128>, &Entry)> = sink.values.iter().collect();
    keys.sort_by(|a, b| a.0.cmp(b.0));
    for (k, &h) in heights.iter().enumerate() {
        points += sink.counts[k];
        let mut vals = Vec::new();
        let mut roundoff: f64 = 0.0;
        for (key, e) in &keys {
            let w = e.witness[..=k].iter().flatten().min();
            if let Some(w) = w {
                let (value, bound) = map.value(key);
                roundoff = roundoff.max(bound);
                vals.push(ValuePoint { value, witness: w.clone() });
            }
        }
        let index = ValueIndex::new(vals);
        let mut nearest = Vec::with_capacity(targets.len());
        let mut hits = 0;
        for b in &targets {
            let found = index.nearest_value(b);
            if let Some((dist, vp)) = found {
                if dist < block.eps {
                    hits += 1;
                    let (direct, nb) = naive_value(problem, &vp.witness);
                    audit_ok &= int_problem.on_quadric(&vp.witness) && sup_dist(&direct, b) < block.eps + nb + roundoff;
                }
            }
            nearest.push(Nearest {
                target: b.clone(),
                distance: found.map(|(d, _)| d),
                value: found.map(|(_, v)| v.value.clone()),
                witness: found.map(|(_, v)| v.witness.clone()),
            });
        }
        let dists: Vec<Option<f64>> = nearest.iter().map(|n| n.distance).collect();
        let max_gap = if index.is_empty() { None } else { dists.iter().flatten().copied().reduce(f64::max) };
        let note = (points < 2).then(|| format!("hypothesis unverified at scale H={h}: fewer than 2 integer points"));
        levels.push(LevelReport {
            height: h,
            points,
            distinct_values: index.len(),
            hits,
            targets: targets.len(),
            coverage: if targets.is_empty() { 0.0 } else { hits as f64 / targets.len() as f64 },
            max_gap,
            roundoff_bound: roundoff,
            histogram: histogram(&dists, block.eps),
            note,
            nearest,
        });
    }
    Ok(CoverageReport {
        d: problem.q.dim(),
        s,
        seed,
        experiment: block.clone(),
        hypotheses_ok,
        status: if hypotheses_ok { "ok" } else { "hypotheses-violated" }.to_string(),
        exhaustive,
        scan_order: order,
        audit_ok,
        levels,
    })
}

#[cfg(test)]
mod tests;
