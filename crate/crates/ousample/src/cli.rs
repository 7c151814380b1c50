//! Command-line interface.
//!
//! Outputs go to `--out` when given, otherwise to a default file name inside
//! the directory named by `OUSAMPLE_OUT_DIR` when that variable is set, and
//! otherwise to standard output. Multi-file outputs (design curves) go to
//! `--out-dir`, then `OUSAMPLE_OUT_DIR`, then the current directory.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ousample_core::asymptotics::{conditional_mean_variance, summary};
use ousample_core::design::{self, audit, optimize_rate, rate_curve, Criterion, DesignProblem, Family};
use ousample_core::estimators::estimate;
use ousample_core::process::simulate;
use ousample_core::stats::variance;
use serde::Serialize;

use crate::config::{GridSpec, LawSection, ProcessSection, RunConfig};
use crate::error::CliError;
use crate::formats::{self, json_document, Metadata};
use crate::montecarlo::{self, ExperimentConfig, ExperimentReport, PRESETS};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "OUSAMPLE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "ousample", version, about = "Simulate, estimate and design sampling for Ornstein-Uhlenbeck processes observed at random times")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one sampled path and write it as a t,x CSV.
    Simulate(SimulateArgs),
    /// Estimate drift and innovation variance from a path CSV.
    Estimate(EstimateArgs),
    /// Print the large-sample bias and variance constants.
    Asymptotics(AsymptoticsArgs),
    /// Optimal average sampling rates.
    Design {
        #[command(subcommand)]
        command: DesignCommand,
    },
    /// Run a replicated Monte Carlo experiment and check it against the limits.
    Validate(ValidateArgs),
}

#[derive(Debug, Subcommand)]
pub enum DesignCommand {
    /// Optimal rate for one drift.
    Point(DesignPointArgs),
    /// Optimal rate over a grid of drifts, one CSV per criterion.
    Curve(DesignCurveArgs),
    /// Rate minimizing the worst relative bias over a drift interval.
    Minimax(DesignMinimaxArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawKind {
    Uniform,
    Exponential,
    #[value(alias = "shifted-exponential", alias = "truncated-exponential")]
    Truncated,
}

impl LawKind {
    fn name(self) -> &'static str {
        match self {
            LawKind::Uniform => "uniform",
            LawKind::Exponential => "exponential",
            LawKind::Truncated => "truncated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Moment,
    #[value(alias = "mle_uniform")]
    MleUniform,
    #[value(alias = "mle_numeric")]
    MleNumeric,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Moment => "moment",
            MethodArg::MleUniform => "mle_uniform",
            MethodArg::MleNumeric => "mle_numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointCriterion {
    Bias,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveCriterion {
    Bias,
    Variance,
    Both,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON configuration file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Drift alpha > 0.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Innovation variance sigma2 > 0.
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    /// Spacing law.
    #[arg(long, value_enum)]
    pub law: Option<LawKind>,
    /// Exponential rate (exponential and truncated laws).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Spacing (uniform) or minimum separation (truncated).
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Lower end of the rate search range [default: 0.01].
    #[arg(long)]
    pub beta_lo: Option<f64>,
    /// Upper end of the rate search range [default: 1000].
    #[arg(long)]
    pub beta_hi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub law: LawArgs,
    /// Number of observations (>= 2).
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed of the path generator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV [default: $OUSAMPLE_OUT_DIR/path.csv, else stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Path CSV with columns t,x.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Estimator [default: moment].
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[command(flatten)]
    pub law: LawArgs,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file [default: $OUSAMPLE_OUT_DIR/estimate.<format>, else stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub law: LawArgs,
    /// Sample size for the finite-n mean of T_n (limit when omitted).
    #[arg(long)]
    pub n: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file [default: $OUSAMPLE_OUT_DIR/asymptotics.<format>, else stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignPointArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Criterion to minimize.
    #[arg(long, value_enum, default_value = "bias")]
    pub criterion: PointCriterion,
    /// Drift alpha > 0.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Spacing family: exponential or truncated (with --delta).
    #[arg(long, value_enum)]
    pub law: Option<LawKind>,
    /// Minimum separation for the truncated family.
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    /// Output JSON [default: $OUSAMPLE_OUT_DIR/design_point.json, else stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignCurveArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Criterion; `both` writes one file per criterion.
    #[arg(long, value_enum, default_value = "both")]
    pub criterion: CurveCriterion,
    /// Drift grid as lo:hi:count, log-spaced [default: 0.05:2:50].
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub alpha_grid: Option<String>,
    /// Spacing family: exponential or truncated (with --delta).
    #[arg(long, value_enum)]
    pub law: Option<LawKind>,
    /// Minimum separation for the truncated family.
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    /// Directory for the curve files [default: $OUSAMPLE_OUT_DIR, else .].
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignMinimaxArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Lower end of the drift interval.
    #[arg(long)]
    pub alpha_lo: Option<f64>,
    /// Upper end of the drift interval.
    #[arg(long)]
    pub alpha_hi: Option<f64>,
    /// Drifts in the inner log-spaced grid (>= 10) [default: 200].
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Spacing family: exponential or truncated (with --delta).
    #[arg(long, value_enum)]
    pub law: Option<LawKind>,
    /// Minimum separation for the truncated family.
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    /// Output JSON [default: $OUSAMPLE_OUT_DIR/design_minimax.json, else stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Named experiment (paper-exponential, truncated-0.5).
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub law: LawArgs,
    /// Path length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of replicates (>= 2).
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Base seed; replicate r uses a seed derived from (seed, r).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Estimator [default: moment].
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON report [default: $OUSAMPLE_OUT_DIR/validate.json, else not written].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Per-replicate CSV with columns replicate,seed,alpha_hat,sigma2_hat,t_n,v_n,status.
    #[arg(long, value_name = "FILE")]
    pub raw: Option<PathBuf>,
    /// Skip the check table on stdout; the exit code still reports the outcome.
    #[arg(long)]
    pub quiet: bool,
}

fn base_config(arg: &ConfigArg) -> Result<RunConfig, CliError> {
    match &arg.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn process_section(p: &ProcessArgs) -> ProcessSection {
    ProcessSection {
        alpha: p.alpha,
        sigma2: p.sigma2,
    }
}

fn law_section(l: &LawArgs) -> LawSection {
    LawSection {
        kind: l.law.map(|k| k.name().to_string()),
        beta: l.beta,
        delta: l.delta,
    }
}

fn family_section(law: Option<LawKind>, delta: Option<f64>) -> LawSection {
    LawSection {
        kind: law.map(|k| k.name().to_string()),
        beta: None,
        delta,
    }
}

fn bounds(b: &BoundsArgs, file: &RunConfig) -> Option<[f64; 2]> {
    let [lo, hi] = file.beta_bounds.unwrap_or([design::DEFAULT_BETA_BOUNDS.0, design::DEFAULT_BETA_BOUNDS.1]);
    match (b.beta_lo, b.beta_hi) {
        (None, None) => file.beta_bounds,
        (l, h) => Some([l.unwrap_or(lo), h.unwrap_or(hi)]),
    }
}

/// Where a single-file output goes.
enum Sink {
    File(PathBuf),
    Stdout,
}

fn sink(explicit: Option<&Path>, default_name: &str) -> Sink {
    match explicit {
        Some(p) => Sink::File(p.to_path_buf()),
        None => match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Sink::File(PathBuf::from(dir).join(default_name)),
            _ => Sink::Stdout,
        },
    }
}

fn out_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    std::fs::write(path, bytes).map_err(CliError::io(path))
}

fn emit(sink: &Sink, bytes: &[u8]) -> Result<(), CliError> {
    match sink {
        Sink::File(p) => write_file(p, bytes),
        Sink::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(CliError::io("<stdout>"))
        }
    }
}

/// Informational line: stdout when the data went to a file, stderr otherwise.
fn info(sink: &Sink, line: &str) {
    match sink {
        Sink::File(_) => println!("{line}"),
        Sink::Stdout => eprintln!("{line}"),
    }
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Asymptotics(a) => cmd_asymptotics(a),
        Command::Design { command } => match command {
            DesignCommand::Point(a) => cmd_design_point(a),
            DesignCommand::Curve(a) => cmd_design_curve(a),
            DesignCommand::Minimax(a) => cmd_design_minimax(a),
        },
        Command::Validate(a) => cmd_validate(a),
    }
}

pub fn cmd_simulate(a: SimulateArgs) -> Result<(), CliError> {
    let cfg = base_config(&a.config)?.merge(RunConfig {
        process: process_section(&a.process),
        law: law_section(&a.law),
        n: a.n,
        seed: a.seed,
        out: a.out,
        ..Default::default()
    });
    let params = cfg.params()?;
    let law = cfg.law()?;
    let n = cfg.n()?;
    let seed = cfg.seed()?;
    let path = simulate(&params, &law, n, seed)?;

    let meta = Metadata::new("simulate", Some(seed), cfg.to_value());
    let mut buf = Vec::new();
    formats::write_path_csv(&mut buf, &meta, &path)?;
    let sink = sink(cfg.out.as_deref(), "path.csv");
    emit(&sink, &buf)?;
    info(
        &sink,
        &format!("n={} span={} sample_variance={}", path.len(), path.span(), variance(path.values())),
    );
    Ok(())
}

pub fn cmd_estimate(a: EstimateArgs) -> Result<(), CliError> {
    let cfg = base_config(&a.config)?.merge(RunConfig {
        input: a.input,
        method: a.method.map(|m| m.name().to_string()),
        law: law_section(&a.law),
        out: a.out,
        ..Default::default()
    });
    let input = cfg
        .input
        .clone()
        .ok_or_else(|| CliError::Usage("input is required (flag --input or config field input)".into()))?;
    let method = cfg.method()?;
    let law = cfg.law_opt()?;
    if method == ousample_core::Method::Moment && law.is_none() {
        return Err(CliError::Usage(
            "law.kind is required for the moment method (flag --law or config field law.kind)".into(),
        ));
    }
    let file = std::fs::File::open(&input).map_err(CliError::io(&input))?;
    let path = formats::read_path_csv(std::io::BufReader::new(file)).map_err(|e| match e {
        CliError::Format(msg) => CliError::Format(format!("{}: {msg}", input.display())),
        other => other,
    })?;
    let report = estimate(&path, method, law.as_ref())?;

    let meta = Metadata::new("estimate", None, cfg.to_value());
    let (bytes, ext) = match a.format {
        Format::Json => (json_document(&meta, "estimate", &report)?.into_bytes(), "json"),
        Format::Csv => {
            let mut buf = Vec::new();
            formats::write_estimate_csv(&mut buf, &meta, &report)?;
            (buf, "csv")
        }
    };
    emit(&sink(cfg.out.as_deref(), &format!("estimate.{ext}")), &bytes)?;
    if !report.status.is_ok() {
        return Err(CliError::Estimation(report.status.to_string()));
    }
    Ok(())
}

#[derive(Serialize)]
struct AsymptoticsOutput {
    #[serde(flatten)]
    summary: ousample_core::AsymptoticSummary,
    /// `eta² (g(2 alpha) - g(alpha)²)`, the lag-zero term not included in
    /// `n_var_tn`.
    conditional_mean_variance: f64,
}

pub fn cmd_asymptotics(a: AsymptoticsArgs) -> Result<(), CliError> {
    let cfg = base_config(&a.config)?.merge(RunConfig {
        process: process_section(&a.process),
        law: law_section(&a.law),
        n: a.n,
        out: a.out,
        ..Default::default()
    });
    let params = cfg.params()?;
    let law = cfg.law()?;
    let n = match cfg.n {
        Some(_) => Some(cfg.n()?),
        None => None,
    };
    let s = summary(&params, &law, n)?;
    let omitted = conditional_mean_variance(&params, &law)?;
    let meta = Metadata::new("asymptotics", None, cfg.to_value());
    let (bytes, ext) = match a.format {
        Format::Json => {
            let out = AsymptoticsOutput {
                summary: s,
                conditional_mean_variance: omitted,
            };
            (json_document(&meta, "asymptotics", &out)?.into_bytes(), "json")
        }
        Format::Csv => {
            let mut buf = Vec::new();
            formats::write_summary_csv(&mut buf, &meta, &s, omitted)?;
            (buf, "csv")
        }
    };
    emit(&sink(cfg.out.as_deref(), &format!("asymptotics.{ext}")), &bytes)
}

const ABS_BIAS_NOTE: &str = "bias criterion minimizes |n bias(alpha_hat)|; relative bias is |n bias(alpha_hat)| / alpha";

#[derive(Serialize)]
struct DesignOutput {
    family: Family,
    beta_bounds: (f64, f64),
    solution: design::DesignSolution,
    audit: design::Audit,
}

fn criterion_name(c: Criterion) -> &'static str {
    match c {
        Criterion::AbsBias => "bias",
        Criterion::Variance => "variance",
        Criterion::MinimaxRelativeBias => "minimax",
    }
}

fn parse_criterion(s: &str) -> Result<Vec<Criterion>, CliError> {
    match s {
        "bias" | "abs_bias" => Ok(vec![Criterion::AbsBias]),
        "variance" => Ok(vec![Criterion::Variance]),
        "both" => Ok(vec![Criterion::AbsBias, Criterion::Variance]),
        other => Err(CliError::Usage(format!("criterion must be bias, variance or both (got {other:?})"))),
    }
}

fn solve_and_write(command: &str, problem: DesignProblem, cfg: &RunConfig, default_name: &str) -> Result<(), CliError> {
    let solution = optimize_rate(&problem)?;
    let audit = audit(&problem, solution.beta_star, 10_000);
    let mut meta = Metadata::new(command, None, cfg.to_value());
    meta.notes.push(ABS_BIAS_NOTE.into());
    let out = DesignOutput {
        family: problem.family,
        beta_bounds: problem.beta_bounds,
        solution,
        audit,
    };
    let doc = json_document(&meta, "design", &out)?;
    let sink = sink(cfg.out.as_deref(), default_name);
    emit(&sink, doc.as_bytes())?;
    info(
        &sink,
        &format!(
            "beta_star={} objective={} at_boundary={} audit={}",
            out.solution.beta_star,
            out.solution.objective_value,
            out.solution.at_boundary,
            if out.audit.passed { "pass" } else { "FAIL" }
        ),
    );
    Ok(())
}

pub fn cmd_design_point(a: DesignPointArgs) -> Result<(), CliError> {
    let file = base_config(&a.config)?;
    let mut cfg = file.clone().merge(RunConfig {
        process: ProcessSection {
            alpha: a.alpha,
            sigma2: None,
        },
        law: family_section(a.law, a.delta),
        criterion: Some(criterion_name_point(a.criterion).to_string()),
        beta_bounds: bounds(&a.bounds, &file),
        out: a.out,
        ..Default::default()
    });
    let (lo, hi) = cfg.beta_bounds()?;
    cfg.beta_bounds = Some([lo, hi]);
    let family = cfg.family()?;
    let alpha = cfg
        .process
        .alpha
        .ok_or_else(|| CliError::Usage("process.alpha is required (flag --alpha or config field process.alpha)".into()))?;
    let criterion = match parse_criterion(cfg.criterion.as_deref().unwrap_or("bias"))?.as_slice() {
        [c] => *c,
        _ => return Err(CliError::Usage("criterion must be bias or variance for a point design".into())),
    };
    let problem = DesignProblem::pointwise(family, criterion, alpha).with_beta_bounds(lo, hi);
    solve_and_write("design point", problem, &cfg, "design_point.json")
}

fn criterion_name_point(c: PointCriterion) -> &'static str {
    match c {
        PointCriterion::Bias => "bias",
        PointCriterion::Variance => "variance",
    }
}

pub fn cmd_design_curve(a: DesignCurveArgs) -> Result<(), CliError> {
    let file = base_config(&a.config)?;
    let crit = match a.criterion {
        CurveCriterion::Bias => "bias",
        CurveCriterion::Variance => "variance",
        CurveCriterion::Both => "both",
    };
    let mut cfg = file.clone().merge(RunConfig {
        law: family_section(a.law, a.delta),
        criterion: Some(crit.to_string()),
        alpha_grid: a.alpha_grid.map(GridSpec::Spec),
        beta_bounds: bounds(&a.bounds, &file),
        out_dir: a.out_dir,
        ..Default::default()
    });
    if cfg.alpha_grid.is_none() {
        cfg.alpha_grid = Some(GridSpec::Spec("0.05:2:50".into()));
    }
    let (lo, hi) = cfg.beta_bounds()?;
    cfg.beta_bounds = Some([lo, hi]);
    let family = cfg.family()?;
    let grid = cfg.alpha_grid()?;
    let criteria = parse_criterion(cfg.criterion.as_deref().unwrap_or("both"))?;
    let dir = out_dir(cfg.out_dir.as_deref());

    for criterion in criteria {
        let points = rate_curve(family, criterion, &grid, (lo, hi))?;
        let mut meta = Metadata::new("design curve", None, cfg.to_value());
        meta.notes.push(ABS_BIAS_NOTE.into());
        let mut buf = Vec::new();
        formats::write_curve_csv(&mut buf, &meta, &points)?;
        let path = dir.join(formats::curve_file_name(family.delta(), criterion_name(criterion)));
        write_file(&path, &buf)?;
        let boundary = points.iter().filter(|p| p.status != "ok").count();
        println!("{} ({} points, {} at a bound or failed)", path.display(), points.len(), boundary);
    }
    Ok(())
}

pub fn cmd_design_minimax(a: DesignMinimaxArgs) -> Result<(), CliError> {
    let file = base_config(&a.config)?;
    let mut cfg = file.clone().merge(RunConfig {
        law: family_section(a.law, a.delta),
        alpha_lo: a.alpha_lo,
        alpha_hi: a.alpha_hi,
        grid_size: a.grid_size,
        beta_bounds: bounds(&a.bounds, &file),
        out: a.out,
        ..Default::default()
    });
    let (lo, hi) = cfg.beta_bounds()?;
    cfg.beta_bounds = Some([lo, hi]);
    cfg.grid_size = Some(cfg.grid_size.unwrap_or(design::DEFAULT_MINIMAX_GRID));
    let family = cfg.family()?;
    let need = |field: &str, flag: &str, v: Option<f64>| {
        v.ok_or_else(|| CliError::Usage(format!("{field} is required (flag {flag} or config field {field})")))
    };
    let alpha_lo = need("alpha_lo", "--alpha-lo", cfg.alpha_lo)?;
    let alpha_hi = need("alpha_hi", "--alpha-hi", cfg.alpha_hi)?;
    let problem = DesignProblem::minimax(family, alpha_lo, alpha_hi, cfg.grid_size.unwrap_or_default()).with_beta_bounds(lo, hi);
    solve_and_write("design minimax", problem, &cfg, "design_minimax.json")
}

/// One line per check, `PASS`/`FAIL` first.
pub fn format_checks(report: &ExperimentReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "replicates={} successes={} failures={} failure_rate={:.4}\n",
        report.config.replicates, report.successes, report.failures, report.failure_rate
    ));
    for c in &report.checks {
        s.push_str(&format!(
            "{}  {:<14} empirical {:>12.6}  target {:>12.6}  mc_se {:>10.6}  tolerance {:>10.6}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.empirical,
            c.target,
            c.mc_se,
            c.tolerance
        ));
    }
    for f in &report.flags {
        s.push_str(&format!("flag: {f}\n"));
    }
    s
}

pub fn cmd_validate(a: ValidateArgs) -> Result<(), CliError> {
    let cfg = base_config(&a.config)?.merge(RunConfig {
        preset: a.preset,
        process: process_section(&a.process),
        law: law_section(&a.law),
        n: a.n,
        replicates: a.replicates,
        seed: a.seed,
        method: a.method.map(|m| m.name().to_string()),
        out: a.out,
        raw: a.raw,
        ..Default::default()
    });
    let base = match cfg.preset.as_deref() {
        Some(name) => Some(montecarlo::preset(name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset {name:?}; available presets: {}", PRESETS.join(", ")))
        })?),
        None => None,
    };
    let experiment = resolve_experiment(&cfg, base)?;
    experiment.validate()?;

    let outcomes = montecarlo::run_replicates(&experiment, a.threads)?;
    let report = montecarlo::aggregate(&experiment, &outcomes)?;

    let mut echo = cfg.clone();
    echo.out = None;
    echo.raw = None;
    let mut config_value = echo.to_value();
    config_value["experiment"] = serde_json::to_value(experiment).map_err(CliError::json)?;
    let meta = Metadata::new("validate", Some(experiment.base_seed), config_value);

    if let Sink::File(path) = sink(cfg.out.as_deref(), "validate.json") {
        write_file(&path, json_document(&meta, "report", &report)?.as_bytes())?;
    }
    if let Some(raw) = &cfg.raw {
        let mut buf = Vec::new();
        formats::write_raw_csv(&mut buf, &meta, &outcomes)?;
        write_file(raw, &buf)?;
    }
    if !a.quiet {
        print!("{}", format_checks(&report));
    }

    let failed = report.checks.iter().filter(|c| !c.pass).count();
    if report.vacuous || failed > 0 {
        return Err(CliError::ChecksFailed {
            failed: if report.vacuous { report.checks.len().max(1) } else { failed },
            total: report.checks.len().max(1),
        });
    }
    Ok(())
}

fn resolve_experiment(cfg: &RunConfig, base: Option<ExperimentConfig>) -> Result<ExperimentConfig, CliError> {
    let missing = |field: &str| CliError::Usage(format!("{field} is required without --preset (flag or config field {field})"));
    let params = match (base, cfg.process.alpha.is_some() || cfg.process.sigma2.is_some()) {
        (Some(b), false) => b.params,
        (Some(b), true) => {
            let mut merged = cfg.clone();
            merged.process.alpha = merged.process.alpha.or(Some(b.params.alpha));
            merged.process.sigma2 = merged.process.sigma2.or(Some(b.params.sigma2));
            merged.params()?
        }
        (None, _) => cfg.params()?,
    };
    let law = match (base, cfg.law.kind.is_some()) {
        (Some(b), false) => b.law,
        _ => cfg.law()?,
    };
    let n = match (base, cfg.n) {
        (_, Some(_)) => cfg.n()?,
        (Some(b), None) => b.n,
        (None, None) => return Err(missing("n")),
    };
    let replicates = cfg
        .replicates
        .or(base.map(|b| b.replicates))
        .ok_or_else(|| missing("replicates"))?;
    let base_seed = cfg.seed.or(base.map(|b| b.base_seed)).ok_or_else(|| missing("seed"))?;
    let method = match (&cfg.method, base) {
        (None, Some(b)) => b.method,
        _ => cfg.method()?,
    };
    Ok(ExperimentConfig {
        params,
        law,
        n,
        replicates,
        base_seed,
        method,
    })
}
