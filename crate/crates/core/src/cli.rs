//! Command-line front end. `main` only forwards to [`run`].
//!
//! Exit codes: 0 success, 2 hypothesis failure, 64 usage or parse error,
//! 70 an exact check that cannot fail did fail.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::canon::{reduce_pair, verify_certificate, CanonError};
use crate::density::{run_experiment, DensityError, PointSource};
use crate::latpoints::{enumerate_box, find_automorphs, orbit_expand, LatError, ScanOptions};
use crate::problem::{Problem, ProblemError};
use crate::quadforms::{check_conditions, has_rational_combination, kernel_basis};
use crate::symalg::{verify_algebra, GroupParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Parser)]
#[command(name = "qdl", version, about = "Canonical reduction, stabilizer algebra checks and density experiments for (Q, M) pairs")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the density hypotheses on a problem file.
    Analyze { file: PathBuf },
    /// Reduce (Q, M) to canonical form and certify it.
    Reduce { file: PathBuf },
    /// Run the algebra identity suite at one parameter triple.
    VerifyAlgebra {
        /// `p',q',m` (every valid index triple) or `p',q',m,i1,i2,i3`.
        #[arg(long)]
        params: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// List integer points of Q = a with |x|_inf <= H.
    Enumerate {
        file: PathBuf,
        #[arg(long = "H")]
        h: u32,
        /// Expand a box scan at `--seed-height` under found automorphs.
        #[arg(long)]
        orbit: bool,
        /// Automorph search budget (coefficient bound) for `--orbit`.
        #[arg(long, default_value_t = 2)]
        budget: usize,
        #[arg(long, default_value_t = 2)]
        seed_height: u32,
        /// Maximum number of orbit points.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Coverage experiment from a problem file with an experiment block.
    Density {
        #[arg(long)]
        spec: PathBuf,
        /// Also write the `H,points,coverage,max_gap` table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Error carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        fail(EXIT_USAGE, e.to_string())
    }
}

impl From<LatError> for Failure {
    fn from(e: LatError) -> Self {
        let code = match e {
            LatError::Overflow => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        fail(code, e.to_string())
    }
}

impl From<DensityError> for Failure {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::Spec(m) => fail(EXIT_USAGE, m),
            DensityError::Lattice(l) => l.into(),
        }
    }
}

/// Outcome of a subcommand: the text to emit and the exit code.
pub struct Output {
    pub body: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command,
/// writing to stdout or `--out`. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => match emit(cli.common.out.as_deref(), &out.body) {
            Ok(()) => out.code,
            Err(f) => report(f),
        },
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> i32 {
    eprintln!("qdl: {}", f.message);
    f.code
}

fn emit(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body.as_bytes()).map_err(|e| fail(EXIT_INTERNAL, e.to_string()))
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

/// Runs the parsed command without touching stdout.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let c = &cli.common;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs.unwrap_or(0))
        .build()
        .map_err(|e| fail(EXIT_INTERNAL, e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Analyze { file } => analyze(file, c.format),
        Command::Reduce { file } => reduce(file, c.format),
        Command::VerifyAlgebra { params, r, n, samples } => verify(params, *r, *n, *samples, c.seed, c.format),
        Command::Enumerate { file, h, orbit, budget, seed_height, cap } => {
            enumerate(file, *h, orbit.then_some((*budget, *seed_height, *cap)), c)
        }
        Command::Density { spec, csv } => density(spec, csv.as_deref(), c),
    })
}

fn scan_options(c: &Common) -> Result<ScanOptions, Failure> {
    let mut o = ScanOptions::from_env()?;
    o.jobs = c.jobs;
    Ok(o)
}

#[derive(Serialize)]
struct AnalyzeOut {
    report: crate::quadforms::ConditionReport,
    failures: Vec<&'static str>,
    /// Columns span `ker M`.
    kernel: crate::exactnum::QMatrix,
    rational_combination: bool,
}

fn analyze(file: &Path, format: Format) -> Result<Output, Failure> {
    let p = Problem::load(file)?;
    let report = check_conditions(&p.q, &p.m).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let code = if report.overall { EXIT_OK } else { EXIT_HYPOTHESIS };
    let out = AnalyzeOut {
        failures: report.failures(),
        kernel: kernel_basis(&p.m),
        rational_combination: has_rational_combination(&p.m),
        report,
    };
    let body = match format {
        Format::Json => json(&out),
        Format::Csv => {
            let r = &out.report;
            let mut s = String::from("condition,holds\n");
            for (k, v) in [
                ("q_nondegenerate", r.q_nondegenerate),
                ("q_rational", r.q_rational),
                ("dim_ok", r.dim_ok),
                ("rank_ok", r.rank_ok),
                ("indefinite_restricted", r.indefinite_restricted),
                ("irrationality_ok", r.irrationality_ok),
                ("overall", r.overall),
            ] {
                let _ = writeln!(s, "{k},{v}");
            }
            s
        }
        Format::Text => {
            let r = &out.report;
            let mut s = String::new();
            let _ = writeln!(s, "d = {}, s = {}", r.d, r.s);
            let _ = writeln!(s, "Q signature (p,q) = ({},{})", r.q_signature.p, r.q_signature.q);
            let _ = writeln!(s, "Q rational: {}  nondegenerate: {}", r.q_rational, r.q_nondegenerate);
            let _ = writeln!(s, "d > 2s: {}", r.dim_ok);
            let rs = r.restricted_signature;
            let _ = writeln!(s, "Q|ker M signature ({},{}), rank {}", rs.p, rs.q, r.rank_restricted);
            let _ = writeln!(s, "rank(Q|ker M) > 2: {}", r.rank_ok);
            let _ = writeln!(s, "Q|ker M indefinite: {}", r.indefinite_restricted);
            let _ = writeln!(s, "no rational combination of M: {}", r.irrationality_ok);
            let _ = writeln!(s, "overall: {}", if r.overall { "pass" } else { "FAIL" });
            for f in &out.failures {
                let _ = writeln!(s, "failed: {f}");
            }
            s
        }
    };
    Ok(Output { body, code })
}

#[derive(Serialize)]
struct ReduceOut {
    g_d: crate::exactnum::ScaledMatrix,
    g_s: crate::exactnum::ScaledMatrix,
    params: crate::canon::CanonicalParams,
    verified: bool,
}

fn reduce(file: &Path, format: Format) -> Result<Output, Failure> {
    let p = Problem::load(file)?;
    let cert = reduce_pair(&p.q, &p.m).map_err(|e| match e {
        CanonError::Degenerate { .. } | CanonError::NotIndefinite { .. } | CanonError::ZeroMap => {
            fail(EXIT_HYPOTHESIS, e.to_string())
        }
        CanonError::Dimension(_) => fail(EXIT_USAGE, e.to_string()),
        _ => fail(EXIT_INTERNAL, e.to_string()),
    })?;
    let verified = verify_certificate(&p.q, &p.m, &cert);
    let out = ReduceOut { verified, g_d: cert.g_d, g_s: cert.g_s, params: cert.params };
    let body = match format {
        Format::Text => {
            let k = &out.params;
            format!(
                "d={} s={} m={} p'={} q'={} r={} n={} verified={}\n",
                k.d, k.s, k.m, k.p_prime, k.q_prime, k.r, k.n, out.verified
            )
        }
        Format::Csv => {
            let k = &out.params;
            format!(
                "d,s,m,p_prime,q_prime,r,n,verified\n{},{},{},{},{},{},{},{}\n",
                k.d, k.s, k.m, k.p_prime, k.q_prime, k.r, k.n, out.verified
            )
        }
        Format::Json => json(&out),
    };
    Ok(Output { body, code: if verified { EXIT_OK } else { EXIT_INTERNAL } })
}

/// `p',q',m` or `p',q',m,i1,i2,i3`.
pub fn parse_params(text: &str, r: usize, n: usize) -> Result<Vec<GroupParams>, Failure> {
    let bad = |m: String| fail(EXIT_USAGE, format!("--params {text:?}: {m}"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 && parts.len() != 6 {
        return Err(bad("expected 3 or 6 comma-separated integers".into()));
    }
    let size = |s: &str| s.parse::<usize>().map_err(|e| bad(e.to_string()));
    let (pp, qq, m) = (size(parts[0])?, size(parts[1])?, size(parts[2])?);
    if r == 0 || n == 0 {
        return Err(bad("r and n must be at least 1".into()));
    }
    if parts.len() == 3 {
        return Ok(GroupParams::base(pp, qq, m, r, n).all_valid());
    }
    let idx = |s: &str| s.parse::<i64>().map_err(|e| bad(e.to_string()));
    let i = (idx(parts[3])?, idx(parts[4])?, idx(parts[5])?);
    GroupParams::new(pp, qq, m, r, n, i).map(|p| vec![p]).map_err(|e| bad(e.to_string()))
}

fn verify(params: &str, r: usize, n: usize, samples: usize, seed: u64, format: Format) -> Result<Output, Failure> {
    let list = parse_params(params, r, n)?;
    let card = verify_algebra(&list, samples, seed);
    let code = if card.pass() { EXIT_OK } else { EXIT_INTERNAL };
    let body = match format {
        Format::Json => json(&card),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "pass", "checked", "witness"]).expect("in memory");
            for ch in &card.checks {
                let witness = ch.witness.clone().unwrap_or_default();
                w.write_record([ch.name.clone(), ch.pass.to_string(), ch.checked.to_string(), witness])
                    .expect("in memory");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
        Format::Text => {
            let mut s = String::new();
            for ch in &card.checks {
                let _ = writeln!(s, "{:<4} {:<28} {:>6}", if ch.pass { "ok" } else { "FAIL" }, ch.name, ch.checked);
                if let Some(w) = &ch.witness {
                    let _ = writeln!(s, "     witness: {w}");
                }
            }
            for f in &card.flags {
                let _ = writeln!(s, "flag: {f}");
            }
            let _ = writeln!(s, "{} parameter sets, overall {}", card.params.len(), if card.pass() { "pass" } else { "FAIL" });
            s
        }
    };
    Ok(Output { body, code })
}

#[derive(Serialize)]
struct Summary {
    count: usize,
    #[serde(rename = "H")]
    h: u32,
    exhaustive: bool,
}

fn enumerate(file: &Path, h: u32, orbit: Option<(usize, u32, usize)>, c: &Common) -> Result<Output, Failure> {
    let p = Problem::load(file)?;
    let opts = scan_options(c)?;
    let set = match orbit {
        None => enumerate_box(&p.q, &p.a, h, &opts)?.0,
        Some((budget, seed_height, cap)) => {
            let (seeds, _) = enumerate_box(&p.q, &p.a, seed_height.clamp(1, h.max(1)), &opts)?;
            let autos = find_automorphs(&p.q, budget)?;
            orbit_expand(&p.q, &p.a, &seeds, &autos, h, cap)?
        }
    };
    if !set.verify(&p.q, &p.a)? {
        return Err(fail(EXIT_INTERNAL, "enumerated point off the quadric"));
    }
    let summary = Summary { count: set.len(), h, exhaustive: set.exhaustive };
    let mut body = String::new();
    match c.format {
        Format::Json => {
            for x in set.iter() {
                let _ = writeln!(body, "{}", serde_json::to_string(x).expect("ints"));
            }
            let _ = writeln!(body, "{}", serde_json::to_string(&summary).expect("summary"));
        }
        Format::Csv => {
            let header: Vec<String> = (1..=p.q.dim()).map(|i| format!("x{i}")).collect();
            let _ = writeln!(body, "{}", header.join(","));
            for x in set.iter() {
                let row: Vec<String> = x.iter().map(i64::to_string).collect();
                let _ = writeln!(body, "{}", row.join(","));
            }
        }
        Format::Text => {
            for x in set.iter() {
                let row: Vec<String> = x.iter().map(i64::to_string).collect();
                let _ = writeln!(body, "{}", row.join(" "));
            }
            let _ = writeln!(body, "count={} H={} exhaustive={}", summary.count, h, summary.exhaustive);
        }
    }
    if summary.count < 2 {
        eprintln!("qdl: hypothesis unverified at scale H={h}: fewer than 2 integer points");
    }
    Ok(Output { body, code: EXIT_OK })
}

fn density(spec: &Path, csv_path: Option<&Path>, c: &Common) -> Result<Output, Failure> {
    let p = Problem::load(spec)?;
    let block = p
        .experiment
        .clone()
        .ok_or_else(|| fail(EXIT_USAGE, format!("{}: no experiment block", spec.display())))?;
    if let PointSource::Orbit { cap: 0, .. } = block.source {
        return Err(fail(EXIT_USAGE, "orbit cap must be positive"));
    }
    let report = run_experiment(&p, &block, c.seed, &scan_options(c)?)?;
    if let Some(path) = csv_path {
        emit(Some(path), &report.to_csv())?;
    }
    if !report.audit_ok {
        return Err(fail(EXIT_INTERNAL, "witness audit failed"));
    }
    let body = match c.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => report.to_csv(),
        Format::Text => {
            let mut s = format!("status: {}  exhaustive: {}\n", report.status, report.exhaustive);
            for l in &report.levels {
                let gap = l.max_gap.map(|g| format!("{g:.6}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    s,
                    "H={:<5} points={:<10} coverage={}/{} max_gap={gap}",
                    l.height, l.points, l.hits, l.targets
                );
                if let Some(n) = &l.note {
                    let _ = writeln!(s, "  {n}");
                }
            }
            s
        }
    };
    let code = if report.hypotheses_ok { EXIT_OK } else { EXIT_HYPOTHESIS };
    Ok(Output { body, code })
}
