//! The `padic-rds` command line.
//!
//! Every run is a pure function of its configuration and `--seed`. Exit codes:
//! 0 success, 2 validation or usage error, 3 invariant breach, 4 I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::markov::transition_matrix;
use crate::analysis::report::{analyze, fmt_rational};
use crate::analysis::{attractor_order, RdsSpec};
use crate::engine::{
    default_burn_in, empirical_transition_matrix_with, run_trials, NoiseProcess, Simulator, TrialSummary,
};
use crate::error::Error;
use crate::padic::{PadicInt, DEFAULT_PRECISION};
use crate::pattern::{generate_pattern, seed_independence_check, PatternConfig, PatternResult, SeedReport};
use crate::unity::RootIndex;
use crate::{ExactMatrix, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INCONSISTENCY: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const DEFAULT_STEPS: u64 = 1000;
pub const DEFAULT_CHAIN_STEPS: u64 = 100_000;
pub const DEFAULT_PARTICLES: u64 = 20_000;

#[derive(Debug, Parser)]
#[command(name = "padic-rds", version, about = "Monomial random dynamical systems on the p-adic integers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact attractor, invariant subsets, stationary and absorption distributions (JSON).
    Analyze(SpecArgs),
    /// Seeded orbit simulation: trace.csv for trial 0 and summary.json for all trials.
    Simulate(SimulateArgs),
    /// Exact transition matrix next to a single-orbit estimate.
    Chain(ChainArgs),
    /// Interference-strip samples, histogram and strip report.
    Pattern(PatternArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpecArgs {
    /// Prime p.
    #[arg(long)]
    pub p: Option<u64>,
    /// Exponents, comma separated.
    #[arg(long)]
    pub s: Option<String>,
    /// Probabilities, comma separated decimals or fractions (default uniform).
    #[arg(long)]
    pub q: Option<String>,
    /// p-adic precision K (default 16).
    #[arg(long)]
    pub precision: Option<u32>,
    /// Seed for every random stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for output files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Initial state: an integer or `p:K:digits` (default 2, or 3 when p = 2).
    #[arg(long)]
    pub u0: Option<String>,
    /// Steps per trial (default 1000).
    #[arg(long)]
    pub steps: Option<u64>,
    /// Number of independent trials (default 1).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Worker threads; never changes the output (default 1).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Orbit length for the estimate (default 100000; 0 skips it).
    #[arg(long)]
    pub steps: Option<u64>,
    /// Steps discarded before counting (default 0: the orbit starts on the attractor).
    #[arg(long)]
    pub burn_in: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct PatternArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Initial state: an integer or `p:K:digits` (default 2, or 3 when p = 2).
    #[arg(long)]
    pub u0: Option<String>,
    /// Orbit length including burn-in (default 20000).
    #[arg(long)]
    pub particles: Option<u64>,
    /// Discarded leading states (default 10·(p−1)).
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// y interval as `a,b` (default 0,1).
    #[arg(long)]
    pub y_range: Option<String>,
    #[arg(long)]
    pub x_bins: Option<usize>,
    #[arg(long)]
    pub y_bins: Option<usize>,
    /// Extra seeds for a strip-set independence check, comma separated.
    #[arg(long)]
    pub check_seeds: Option<String>,
}

/// Values a JSON config file may set; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: Option<u64>,
    pub s: Option<Vec<u64>>,
    /// Numbers or strings (`"1/3"`, `"0.2"`).
    pub q: Option<Vec<Value>>,
    pub precision: Option<u32>,
    pub seed: Option<u64>,
    pub u0: Option<Value>,
    pub steps: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub particles: Option<u64>,
    pub burn_in: Option<u64>,
    pub y_range: Option<(f64, f64)>,
    pub x_bins: Option<usize>,
    pub y_bins: Option<usize>,
    pub check_seeds: Option<Vec<u64>>,
}

#[derive(Debug)]
enum Failure {
    Validation(Vec<String>),
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Io(..) => EXIT_IO,
            Failure::Lib(e) => match e {
                Error::InternalInconsistency(_) | Error::ModelViolation(_) | Error::NotAbsorbed(_) => {
                    EXIT_INCONSISTENCY
                }
                _ => EXIT_VALIDATION,
            },
        }
    }

    fn render(&self) -> String {
        match self {
            Failure::Validation(v) => {
                let mut out = String::from("invalid configuration:\n");
                for line in v {
                    let _ = writeln!(out, "  - {line}");
                }
                out
            }
            Failure::Lib(Error::InvalidSpec(v)) => Failure::Validation(v.clone()).render(),
            Failure::Lib(e) => format!("error: {e}\n"),
            Failure::Io(path, e) => format!("error: {}: {e}\n", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses a decimal (`0.25`, `1e-2`) or fraction (`1/3`) exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    if negative {
        digits = -digits;
    }
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    })
}

fn parse_list<T: std::str::FromStr>(what: &str, text: &str, problems: &mut Vec<String>) -> Option<Vec<T>> {
    let mut out = Vec::new();
    for item in text.split(',') {
        match item.trim().parse() {
            Ok(v) => out.push(v),
            Err(_) => {
                problems.push(format!("{what}: cannot parse {:?}", item.trim()));
                return None;
            }
        }
    }
    Some(out)
}

fn json_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Validation(vec![format!("{}: {e}", path.display())]))
}

/// Merged configuration after flags have overridden the file.
struct Resolved {
    spec: RdsSpec,
    file: ExperimentConfig,
    out_dir: Option<PathBuf>,
}

fn resolve(args: &SpecArgs, problems: &mut Vec<String>) -> CliResult<Option<Resolved>> {
    let file = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    let p = args.p.or(file.p);
    if p.is_none() {
        problems.push("--p is required".to_string());
    }
    let exponents = match &args.s {
        Some(text) => parse_list::<u64>("--s", text, problems),
        None => file.s.clone(),
    };
    if exponents.is_none() && args.s.is_none() {
        problems.push("--s is required".to_string());
    }
    let q_texts: Option<Vec<String>> = match &args.q {
        Some(text) => Some(text.split(',').map(|t| t.trim().to_string()).collect()),
        None => file.q.as_ref().map(|v| v.iter().map(json_text).collect()),
    };
    let probabilities = match (&q_texts, &exponents) {
        (Some(texts), _) => {
            let parsed: Vec<Option<Rational>> = texts.iter().map(|t| parse_rational(t)).collect();
            for (t, r) in texts.iter().zip(&parsed) {
                if r.is_none() {
                    problems.push(format!("--q: cannot parse {t:?} as a decimal or fraction"));
                }
            }
            parsed.into_iter().collect::<Option<Vec<_>>>()
        }
        (None, Some(ex)) if !ex.is_empty() => {
            Some(vec![Rational::new(BigInt::one(), BigInt::from(ex.len())); ex.len()])
        }
        (None, _) => Some(Vec::new()),
    };
    let precision = args.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let (Some(p), Some(exponents)) = (p, exponents) else {
        return Ok(None);
    };
    // unparsable probabilities still let the other fields be checked
    let parsed_q = probabilities.is_some();
    let probabilities = probabilities.unwrap_or_else(|| {
        vec![Rational::new(BigInt::one(), BigInt::from(exponents.len().max(1))); exponents.len()]
    });
    match RdsSpec::new(p, exponents, probabilities, precision, seed) {
        Ok(spec) if parsed_q => Ok(Some(Resolved { spec, file, out_dir: args.out_dir.clone() })),
        Ok(_) => Ok(None),
        Err(Error::InvalidSpec(v)) => {
            problems.extend(v);
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_u0(text: Option<String>, spec: &RdsSpec, problems: &mut Vec<String>) -> Option<PadicInt> {
    let (p, k) = (spec.p(), spec.precision());
    let parsed = match text {
        None => PadicInt::from_integer(if p == 2 { 3 } else { 2 }, p, k),
        Some(t) if t.contains(':') => t.parse::<PadicInt>(),
        Some(t) => match t.trim().parse::<BigInt>() {
            Ok(n) => PadicInt::from_integer(n, p, k),
            Err(_) => Err(Error::Parse(format!("cannot parse {t:?} as an integer or p:K:digits"))),
        },
    };
    match parsed {
        Ok(u) if u.p() as u64 == p && u.precision() == k => Some(u),
        Ok(u) => {
            problems.push(format!("--u0 {u} does not live in Z_{p} at precision {k}"));
            None
        }
        Err(e) => {
            problems.push(format!("--u0: {e}"));
            None
        }
    }
}

fn finish(problems: Vec<String>) -> CliResult<()> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(problems))
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn io_out(e: std::io::Error) -> Failure {
    Failure::Io(PathBuf::from("<stdout>"), e)
}

fn cmd_analyze(args: SpecArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut problems = Vec::new();
    let resolved = resolve(&args, &mut problems)?;
    finish(problems)?;
    let Resolved { spec, out_dir, .. } = resolved.expect("validated");
    let json = to_json(&analyze(&spec)?);
    if let Some(dir) = out_dir {
        write_file(&dir, "report.json", &json)?;
    }
    out.write_all(json.as_bytes()).map_err(io_out)
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    p: u64,
    exponents: &'a [u64],
    probabilities: Vec<String>,
    precision: u32,
    seed: u64,
    u0: &'a PadicInt,
    steps: u64,
    attractor_order: u64,
    components: &'a [Vec<RootIndex>],
    trials: Vec<TrialSummary>,
}

fn cmd_simulate(args: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut problems = Vec::new();
    let resolved = resolve(&args.spec, &mut problems)?;
    let Some(Resolved { spec, file, out_dir }) = resolved else {
        return finish(problems);
    };
    let u0 = parse_u0(args.u0.or(file.u0.as_ref().map(json_text)), &spec, &mut problems);
    let trials = args.trials.or(file.trials).unwrap_or(1);
    let workers = args.workers.or(file.workers).unwrap_or(1);
    if trials == 0 {
        problems.push("--trials must be at least 1".to_string());
    }
    if workers == 0 {
        problems.push("--workers must be at least 1".to_string());
    }
    finish(problems)?;
    let u0 = u0.expect("validated");
    let steps = args.steps.or(file.steps).unwrap_or(DEFAULT_STEPS);
    let sim = Simulator::new(&spec)?;
    let (traces, summaries) = run_trials(&sim, &u0, steps, trials, workers)?;
    let summary = SimulationSummary {
        p: spec.p(),
        exponents: spec.exponents(),
        probabilities: spec.probabilities().iter().map(fmt_rational).collect(),
        precision: spec.precision(),
        seed: spec.seed(),
        u0: &u0,
        steps,
        attractor_order: attractor_order(spec.p(), spec.exponents()).q,
        components: sim.components(),
        trials: summaries,
    };
    let dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
    write_file(&dir, "trace.csv", &traces[0].to_csv())?;
    write_file(&dir, "summary.json", &to_json(&summary))?;
    let last = traces[0].last();
    writeln!(
        out,
        "{} trial(s) x {steps} steps; trial 0 ends at {} (distance valuation {}); wrote {}",
        trials,
        last.state,
        last.dist_valuation,
        dir.display()
    )
    .map_err(io_out)
}

/// `q1+q3`-style label of `P(a,b)`, or `.` when no exponent links them.
fn symbolic_entry(exponents: &[u64], a: RootIndex, b: RootIndex) -> String {
    let labels: Vec<String> = exponents
        .iter()
        .enumerate()
        .filter(|(_, &s)| a.power(s) == b)
        .map(|(j, _)| format!("q{}", j + 1))
        .collect();
    if labels.is_empty() {
        ".".to_string()
    } else {
        labels.join("+")
    }
}

pub fn render_chain(spec: &RdsSpec, matrix: &ExactMatrix) -> String {
    let states = matrix.states();
    let names: Vec<String> = states.iter().map(|a| a.to_string()).collect();
    let mut out = String::new();
    let _ = writeln!(out, "transition matrix on the attractor (rows: from, columns: to)");
    let width = states
        .iter()
        .flat_map(|&a| states.iter().map(move |&b| (a, b)))
        .map(|(a, b)| symbolic_entry(spec.exponents(), a, b).chars().count())
        .chain(names.iter().map(|n| n.chars().count()))
        .max()
        .unwrap_or(1);
    let _ = write!(out, "{:>width$}", "");
    for n in &names {
        let _ = write!(out, " {n:>width$}");
    }
    out.push('\n');
    for (i, &a) in states.iter().enumerate() {
        let _ = write!(out, "{:>width$}", names[i]);
        for &b in states {
            let _ = write!(out, " {:>width$}", symbolic_entry(spec.exponents(), a, b));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "\nedges (self-loops omitted):");
    for &a in states {
        for &b in states {
            if a != b {
                let label = symbolic_entry(spec.exponents(), a, b);
                if label != "." {
                    let value = matrix.get(a, b).expect("state in matrix");
                    let _ = writeln!(out, "  {a} -> {b}  {label} = {}", fmt_rational(value));
                }
            }
        }
    }
    out
}

fn cmd_chain(args: ChainArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut problems = Vec::new();
    let resolved = resolve(&args.spec, &mut problems)?;
    finish(problems)?;
    let Resolved { spec, file, out_dir } = resolved.expect("validated");
    let matrix: ExactMatrix = transition_matrix(&spec)?;
    let mut text = render_chain(&spec, &matrix);
    let steps = args.steps.or(file.steps).unwrap_or(DEFAULT_CHAIN_STEPS);
    let mut report = None;
    if steps > 0 {
        let sim = Simulator::new(&spec)?;
        let start = sim
            .components()
            .iter()
            .find(|c| c.len() > 1)
            .map(|c| c[0])
            .unwrap_or_else(|| RootIndex::unity(spec.p()));
        let burn_in = args.burn_in.or(file.burn_in).unwrap_or(0);
        let chain = empirical_transition_matrix_with(&sim, &NoiseProcess::for_spec(&spec, 0), start, steps, burn_in)?;
        let failing = chain.entries.iter().filter(|e| !e.pass).count();
        let _ = writeln!(
            text,
            "\nempirical estimate from {start}: {} transitions, max |deviation| {:.3e}, {} of {} entries within 3 sigma: {}",
            chain.transitions,
            chain.max_abs_deviation,
            chain.entries.len() - failing,
            chain.entries.len(),
            if chain.all_pass { "PASS" } else { "FAIL" }
        );
        report = Some(chain);
    }
    if let Some(dir) = out_dir {
        write_file(&dir, "chain.txt", &text)?;
        if let Some(chain) = &report {
            write_file(&dir, "chain.json", &to_json(chain))?;
        }
    }
    out.write_all(text.as_bytes()).map_err(io_out)
}

#[derive(Serialize)]
struct StripReport<'a> {
    seed: u64,
    tolerance: String,
    #[serde(flatten)]
    result: &'a PatternResult,
    seed_check: Option<SeedReport>,
}

fn cmd_pattern(args: PatternArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut problems = Vec::new();
    let resolved = resolve(&args.spec, &mut problems)?;
    let Some(Resolved { spec, file, out_dir }) = resolved else {
        return finish(problems);
    };
    let u0 = parse_u0(args.u0.or(file.u0.as_ref().map(json_text)), &spec, &mut problems);
    let y_range = match &args.y_range {
        Some(text) => match parse_list::<f64>("--y-range", text, &mut problems) {
            Some(v) if v.len() == 2 => Some((v[0], v[1])),
            Some(_) => {
                problems.push("--y-range needs exactly two values a,b".to_string());
                None
            }
            None => None,
        },
        None => file.y_range,
    };
    let check_seeds = match &args.check_seeds {
        Some(text) => parse_list::<u64>("--check-seeds", text, &mut problems),
        None => file.check_seeds.clone(),
    };
    let Some(u0) = u0 else {
        return finish(problems);
    };
    let config = PatternConfig {
        tolerance_digits: spec.precision() / 2,
        burn_in: args.burn_in.or(file.burn_in).unwrap_or_else(|| default_burn_in(spec.p())),
        n_particles: args.particles.or(file.particles).unwrap_or(DEFAULT_PARTICLES),
        y_range: y_range.unwrap_or((0.0, 1.0)),
        x_bins: args.x_bins.or(file.x_bins).unwrap_or(200),
        y_bins: args.y_bins.or(file.y_bins).unwrap_or(50),
        spec,
        u0,
    };
    if let Err(Error::InvalidSpec(v)) = config.validate() {
        problems.extend(v);
    }
    finish(problems)?;
    let result = generate_pattern(&config)?;
    let seed_check = match check_seeds {
        Some(mut seeds) => {
            seeds.insert(0, config.spec.seed());
            Some(seed_independence_check(&config, &seeds)?)
        }
        None => None,
    };
    let report = StripReport {
        seed: config.spec.seed(),
        tolerance: format!("{}^-{}", config.spec.p(), config.tolerance_digits),
        result: &result,
        seed_check,
    };
    let dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
    write_file(&dir, "points.csv", &result.points_csv())?;
    write_file(&dir, "histogram.csv", &result.histogram.to_csv())?;
    write_file(&dir, "strips.json", &to_json(&report))?;
    let mut text = format!(
        "{} samples in component {}; {} strip(s):\n",
        result.samples.len(),
        result.reached_component,
        result.strip_centers.len()
    );
    for (c, n) in result.strip_centers.iter().zip(&result.occupancy) {
        let _ = writeln!(text, "  x = {:.16e}  ({})  {n} samples", c.x, c.index);
    }
    let _ = writeln!(
        text,
        "all samples within {}: {}",
        report.tolerance,
        if result.within_tolerance { "yes" } else { "no" }
    );
    out.write_all(text.as_bytes()).map_err(io_out)
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Chain(a) => cmd_chain(a, out),
        Command::Pattern(a) => cmd_pattern(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = err.write_all(f.render().as_bytes());
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("0.2"), Some(r(1, 5)));
        assert_eq!(parse_rational("1/3"), Some(r(1, 3)));
        assert_eq!(parse_rational(" 2 / 6 "), Some(r(1, 3)));
        assert_eq!(parse_rational("1"), Some(r(1, 1)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("2.5e-1"), Some(r(1, 4)));
        assert_eq!(parse_rational("3E2"), Some(r(300, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn symbolic_labels() {
        let spec = RdsSpec::uniform(29, &[29, 2, 3]).unwrap();
        let m: ExactMatrix = transition_matrix(&spec).unwrap();
        let text = render_chain(&spec, &m);
        assert!(text.contains("ξ^4 -> ξ^8  q2 = 1/3"));
        assert!(text.contains("ξ^4 -> ξ^12  q3 = 1/3"));
        assert!(!text.contains("ξ^0 -> "));
    }

    #[test]
    fn merged_labels() {
        // 29 ≡ 1 and 57 ≡ 1 mod 28: both act as the identity on indices
        let spec = RdsSpec::uniform(29, &[29, 57]).unwrap();
        assert_eq!(symbolic_entry(spec.exponents(), RootIndex::new(4, 29), RootIndex::new(4, 29)), "q1+q2");
    }
}
