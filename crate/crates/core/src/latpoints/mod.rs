//! Integer points on `Q(x) = a` in the box `|x|_inf <= H`, and their
//! expansion under integral automorphs of `Q`.
//!
//! The scan clears denominators once and then works in `i128`. Coordinates
//! are fixed one at a time (largest `|A_jj|` first). At every node with at
//! least two free coordinates the reachable range of `Q` over the rest of the
//! box is bounded from the exact one-variable ranges of the diagonal terms
//! plus a worst-case bound on the free cross terms; the last coordinate is
//! solved exactly. The bounds are sound, so a completed scan is exhaustive.

mod automorph;

pub use automorph::{find_automorphs, orbit_expand, Automorph};

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{lcm_big, QuadScalar, Rational};
use crate::quadforms::QuadraticForm;

/// Environment variable capping scan nodes.
pub const NODE_BUDGET_VAR: &str = "QDL_NODE_BUDGET";
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatError {
    #[error("Q has irrational entries; integer points need a rational form")]
    Irrational,
    #[error("the value a = {0} is not rational")]
    IrrationalValue(String),
    #[error("scaled entries do not fit in 128-bit integers")]
    Overflow,
    #[error("height bound must be at least 1")]
    Height,
    #[error("invalid {NODE_BUDGET_VAR}: {0:?}")]
    Budget(String),
}

/// Node budget from `QDL_NODE_BUDGET`, or the default.
pub fn node_budget_from_env() -> Result<u64, LatError> {
    match std::env::var(NODE_BUDGET_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| LatError::Budget(v)),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

/// `Q` and `a` scaled by a common denominator: `x^T A x = t` in integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralProblem {
    pub d: usize,
    /// Row-major scaled gram.
    pub gram: Vec<i128>,
    pub target: i128,
}

fn to_i128(x: &BigInt) -> Result<i128, LatError> {
    x.to_i128().ok_or(LatError::Overflow)
}

impl IntegralProblem {
    pub fn new(q: &QuadraticForm, a: &QuadScalar) -> Result<Self, LatError> {
        if !q.is_rational() {
            return Err(LatError::Irrational);
        }
        if !a.is_rational() {
            return Err(LatError::IrrationalValue(a.to_string()));
        }
        let entries: Vec<Rational> = q.gram().entries().map(|x| x.a().clone()).collect();
        let mut den = BigInt::one();
        for x in entries.iter().chain(std::iter::once(a.a())) {
            den = lcm_big(&den, x.denom());
        }
        let scale = |x: &Rational| to_i128(&(x * Rational::from_integer(den.clone())).to_integer());
        let gram = entries.iter().map(scale).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { d: q.dim(), gram, target: scale(a.a())? })
    }

    pub fn eval(&self, x: &[i64]) -> i128 {
        let d = self.d;
        let mut acc = 0i128;
        for i in 0..d {
            let xi = x[i] as i128;
            if xi == 0 {
                continue;
            }
            let row: i128 = (0..d).map(|j| self.gram[i * d + j] * x[j] as i128).sum();
            acc += xi * row;
        }
        acc
    }

    pub fn on_quadric(&self, x: &[i64]) -> bool {
        self.eval(x) == self.target
    }

    /// Coordinates by descending `|A_jj|`, ties by index.
    pub fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.d).collect();
        order.sort_by_key(|&j| std::cmp::Reverse(self.gram[j * self.d + j].abs()));
        order
    }
}

/// Receives points during a scan; partial results are merged in the order
/// of the top-level coordinate.
pub trait PointSink: Send + Sized {
    fn visit(&mut self, x: &[i64]);
    fn merge(&mut self, other: Self);
}

/// Flat collector.
#[derive(Clone, Debug, Default)]
pub struct Collect(pub Vec<i64>);

impl PointSink for Collect {
    fn visit(&mut self, x: &[i64]) {
        self.0.extend_from_slice(x);
    }

    fn merge(&mut self, mut other: Self) {
        self.0.append(&mut other.0);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStats {
    pub nodes: u64,
    pub exhaustive: bool,
    /// Order in which coordinates were fixed.
    pub order: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_NODE_BUDGET, jobs: None }
    }
}

impl ScanOptions {
    pub fn from_env() -> Result<Self, LatError> {
        Ok(Self { budget: node_budget_from_env()?, jobs: None })
    }
}

struct Shared {
    used: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
}

/// Scan state in the reordered coordinates.
struct Engine<'a, S> {
    d: usize,
    a: Vec<i128>,
    target: i128,
    h: i64,
    order: &'a [usize],
    /// `2 h^2 sum |A_ij|` over free pairs `k <= i < j`, per level `k`.
    cross: Vec<i128>,
    shared: &'a Shared,
    local: u64,
    x: Vec<i64>,
    out: Vec<i64>,
    /// `b[j] = sum_{i fixed} A_ij x_i`.
    b: Vec<i128>,
    sink: S,
}

/// `(min, max)` of `a x^2 + 2 b x` over integers `|x| <= h`.
fn range_1d(a: i128, b: i128, h: i64) -> (i128, i128) {
    let h = h as i128;
    let g = |x: i128| a * x * x + 2 * b * x;
    let (e1, e2) = (g(-h), g(h));
    let mut lo = e1.min(e2);
    let mut hi = e1.max(e2);
    if a != 0 {
        // vertex at -b/a; the integer extreme is within one of this quotient
        let q = (-b).div_euclid(a);
        for x in [q - 1, q, q + 1] {
            if (-h..=h).contains(&x) {
                let v = g(x);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    (lo, hi)
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

const FLUSH: u64 = 1 << 12;

impl<S: PointSink> Engine<'_, S> {
    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local >= FLUSH {
            self.flush();
        }
        !self.shared.exhausted.load(Ordering::Relaxed)
    }

    fn flush(&mut self) {
        let before = self.shared.used.fetch_add(self.local, Ordering::Relaxed);
        if before + self.local > self.shared.budget {
            self.shared.exhausted.store(true, Ordering::Relaxed);
        }
        self.local = 0;
    }

    fn emit(&mut self) {
        for (k, &c) in self.order.iter().enumerate() {
            self.out[c] = self.x[k];
        }
        self.sink.visit(&self.out);
    }

    fn fix(&mut self, k: usize, v: i64) {
        self.x[k] = v;
        let d = self.d;
        for j in k + 1..d {
            self.b[j] += self.a[k * d + j] * v as i128;
        }
    }

    fn unfix(&mut self, k: usize) {
        let v = self.x[k] as i128;
        let d = self.d;
        for j in k + 1..d {
            self.b[j] -= self.a[k * d + j] * v;
        }
        self.x[k] = 0;
    }

    /// Fixed part `f` of `Q` so far; free coordinates `k..d`.
    fn descend(&mut self, k: usize, f: i128) {
        let d = self.d;
        let akk = self.a[k * d + k];
        let bk = self.b[k];
        let rest = self.target - f;
        if k + 1 == d {
            if !self.tick() {
                return;
            }
            // akk x^2 + 2 bk x = rest
            let mut sols = Vec::with_capacity(2);
            if akk == 0 {
                if bk == 0 {
                    if rest == 0 {
                        sols.extend(-self.h..=self.h);
                    }
                } else if rest % (2 * bk) == 0 {
                    sols.push((rest / (2 * bk)) as i64);
                }
            } else if let Some(r) = isqrt(bk * bk + akk * rest) {
                for num in [-bk - r, -bk + r] {
                    if num % akk == 0 {
                        sols.push((num / akk) as i64);
                    }
                }
                sols.dedup();
            }
            let h = self.h;
            for v in sols.into_iter().filter(|v| v.abs() <= h) {
                self.x[k] = v;
                self.emit();
            }
            self.x[k] = 0;
            return;
        }
        // range of the free coordinates other than k
        let mut lo = -self.cross[k];
        let mut hi = self.cross[k];
        for j in k + 1..d {
            let (a, b) = range_1d(self.a[j * d + j], self.b[j], self.h);
            lo += a;
            hi += b;
        }
        for v in -self.h..=self.h {
            let vi = v as i128;
            let g = akk * vi * vi + 2 * bk * vi;
            if g + lo > rest || g + hi < rest {
                continue;
            }
            if !self.tick() {
                return;
            }
            self.fix(k, v);
            self.descend(k + 1, f + g);
            self.unfix(k);
        }
    }
}

fn run_scan<S: PointSink>(
    p: &IntegralProblem,
    h: i64,
    opts: &ScanOptions,
    make: &(dyn Fn() -> S + Sync),
) -> (S, ScanStats) {
    let d = p.d;
    let order = p.order();
    let mut a = vec![0i128; d * d];
    for i in 0..d {
        for j in 0..d {
            a[i * d + j] = p.gram[order[i] * d + order[j]];
        }
    }
    let hh = (h as i128) * (h as i128);
    let cross: Vec<i128> = (0..d)
        .map(|k| {
            let mut c = 0;
            for i in k..d {
                for j in i + 1..d {
                    c += 2 * a[i * d + j].abs() * hh;
                }
            }
            c
        })
        .collect();
    let shared = Shared { used: AtomicU64::new(0), budget: opts.budget, exhausted: AtomicBool::new(false) };
    let engine = |sink: S| Engine {
        d,
        a: a.clone(),
        target: p.target,
        h,
        order: &order,
        cross: cross.clone(),
        shared: &shared,
        local: 0,
        x: vec![0; d],
        out: vec![0; d],
        b: vec![0; d],
        sink,
    };
    let sink = if d == 1 {
        let mut e = engine(make());
        e.descend(0, 0);
        e.flush();
        e.sink
    } else {
        // top level split across workers, merged in coordinate order
        let tops: Vec<i64> = (-h..=h).collect();
        let work = || {
            tops.par_iter()
                .map(|&v| {
                    let mut e = engine(make());
                    let a00 = e.a[0];
                    let g = a00 * (v as i128) * (v as i128);
                    e.fix(0, v);
                    e.descend(1, g);
                    e.flush();
                    e.sink
                })
                .collect::<Vec<S>>()
        };
        let parts = match opts.jobs {
            Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map(|pool| pool.install(work)),
            None => Ok(work()),
        }
        .unwrap_or_else(|_| work());
        let mut parts = parts.into_iter();
        let mut first = parts.next().unwrap_or_else(make);
        for s in parts {
            first.merge(s);
        }
        first
    };
    let exhaustive = !shared.exhausted.load(Ordering::Relaxed);
    (sink, ScanStats { nodes: shared.used.load(Ordering::Relaxed), exhaustive, order })
}

/// Streams every solution of `Q(x) = a`, `|x|_inf <= h`, into sinks made by
/// `make`. Within one top-level value points arrive in scan order.
pub fn scan_box<S: PointSink>(
    q: &QuadraticForm,
    a: &QuadScalar,
    h: u32,
    opts: &ScanOptions,
    make: &(dyn Fn() -> S + Sync),
) -> Result<(S, ScanStats), LatError> {
    if h == 0 {
        return Err(LatError::Height);
    }
    let p = IntegralProblem::new(q, a)?;
    Ok(run_scan(&p, h as i64, opts, make))
}

/// Integer points, sorted lexicographically and stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    pub dim: usize,
    coords: Vec<i64>,
    pub height: u32,
    /// True when the box scan completed within its node budget.
    pub exhaustive: bool,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<i64>, height: u32, exhaustive: bool) -> Self {
        assert!(dim > 0 && coords.len() % dim == 0, "flat length must be a multiple of the dimension");
        let mut rows: Vec<&[i64]> = coords.chunks(dim).collect();
        rows.sort();
        rows.dedup();
        let coords = rows.concat();
        Self { dim, coords, height, exhaustive }
    }

    pub fn from_points(dim: usize, points: &[Vec<i64>], height: u32, exhaustive: bool) -> Self {
        Self::new(dim, points.concat(), height, exhaustive)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.coords.chunks(self.dim)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let n = self.len();
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.coords[mid * self.dim..(mid + 1) * self.dim].cmp(x) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// Largest `|x|_inf` over the set.
    pub fn max_height(&self) -> u32 {
        self.coords.iter().map(|c| c.unsigned_abs() as u32).max().unwrap_or(0)
    }

    /// Exact recomputation of `Q(x) = a` for every point.
    pub fn verify(&self, q: &QuadraticForm, a: &QuadScalar) -> Result<bool, LatError> {
        let p = IntegralProblem::new(q, a)?;
        Ok(self.iter().all(|x| p.on_quadric(x)))
    }
}

/// Exhaustive box scan (unless the node budget runs out).
pub fn enumerate_box(q: &QuadraticForm, a: &QuadScalar, h: u32, opts: &ScanOptions) -> Result<(PointSet, ScanStats), LatError> {
    let (sink, stats) = scan_box(q, a, h, opts, &Collect::default)?;
    Ok((PointSet::new(q.dim(), sink.0, h, stats.exhaustive), stats))
}

#[cfg(test)]
mod tests;
