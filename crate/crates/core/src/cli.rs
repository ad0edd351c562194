//! `tortb` command-line front end.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or validation error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::{calibrate_sequence, derive_oc, CalibrationResult, Chaining, SolvedValue};
use crate::config::{self, AnchorsFile, EpisodesFile};
use crate::log_analysis::{extract_metrics, parse_drive_log, summarize_metrics, TakeoverMetrics};
use crate::model::{
    estimate_tortb, CoefficientSet, DriverProfile, ModelError, NdrtClass, ScenarioSpec,
    TakeoverContext, TortbEstimate,
};
use crate::presets::ScenarioPreset;
use crate::simulator::{run_batch, BatchReport};
use crate::table::{reproduce_table, TableRowResult};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "tortb", version, about = "Takeover-request time budget toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the time budget for one driver, scenario and context
    Estimate(EstimateArgs),
    /// Solve unknown coefficients from anchor scenarios
    Calibrate(CalibrateArgs),
    /// Extract takeover metrics from drive-log CSV files
    Analyze(AnalyzeArgs),
    /// Run a batch of seeded takeover episodes
    Simulate(SimulateArgs),
    /// Reproduce the six published estimation examples
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffSetName {
    Published,
    Unrounded,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Stimulus response time, s
    #[arg(long)]
    pub srt: f64,
    /// Weekly driving distance, km/week
    #[arg(long)]
    pub experience: f64,
    #[arg(long, conflicts_with = "scenario")]
    pub noa: Option<u32>,
    #[arg(long, conflicts_with = "scenario")]
    pub noj: Option<u32>,
    /// Ego speed, km/hr
    #[arg(long, conflicts_with = "scenario")]
    pub ego_speed: Option<f64>,
    /// Hazard speed, km/hr (0 for stationary causes)
    #[arg(long, conflicts_with = "scenario")]
    pub hazard_speed: Option<f64>,
    /// Scenario preset: S1, S2 or S3
    #[arg(long)]
    pub scenario: Option<ScenarioPreset>,
    /// handsfree or handheld
    #[arg(long)]
    pub ndrt: NdrtClass,
    /// Exposure ordinal (1 = first drive)
    #[arg(long)]
    pub ordinal: u32,
    /// Coefficient file (TOML)
    #[arg(long, conflicts_with = "coeff_set")]
    pub coeffs: Option<PathBuf>,
    /// Built-in coefficient set
    #[arg(long, value_enum)]
    pub coeff_set: Option<CoeffSetName>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Anchors file (TOML)
    #[arg(long)]
    pub anchors: PathBuf,
    #[arg(long, value_enum, default_value = "raw")]
    pub chaining: ChainingArg,
    /// Ordinal effect size (partial eta squared) for deriving the repeat deduction
    #[arg(long)]
    pub oc_effect_size: Option<f64>,
    /// Upper-bound budget multiplied by the effect size, s
    #[arg(long, default_value_t = 7.0)]
    pub oc_upper_bound: f64,
    /// Write the rounded coefficient set here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the unrounded coefficient set here
    #[arg(long)]
    pub out_raw: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainingArg {
    Raw,
    Rounded,
}

impl From<ChainingArg> for Chaining {
    fn from(c: ChainingArg) -> Self {
        match c {
            ChainingArg::Raw => Chaining::UseRaw,
            ChainingArg::Rounded => Chaining::UseRounded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Drive-log CSV; repeat for several logs
    #[arg(long, required = true)]
    pub log: Vec<PathBuf>,
    /// Seconds before the TOR in the lateral displacement window
    #[arg(long, default_value_t = 5.0)]
    pub pre_window: f64,
    /// Seconds after the TOR in the lateral displacement window
    #[arg(long, default_value_t = 5.0)]
    pub post_window: f64,
    /// Steering/brake change, as a fraction of full range, that marks the takeover
    #[arg(long, default_value_t = crate::log_analysis::DEFAULT_TOT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Episode batch file (TOML)
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the file's base_seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for synthetic logs and report.json
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    run(cli, out)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match cli.command {
        Command::Estimate(a) => cmd_estimate(&a)?,
        Command::Calibrate(a) => cmd_calibrate(&a)?,
        Command::Analyze(a) => cmd_analyze(&a)?,
        Command::Simulate(a) => cmd_simulate(&a)?,
        Command::Table(a) => cmd_table(&a)?,
    };
    out.write_all(text.as_bytes()).map_err(internal)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn flag_for(err: &ModelError) -> &'static str {
    match err {
        ModelError::SrtOutOfRange(_) => "--srt",
        ModelError::NegativeExperience(_) => "--experience",
        ModelError::InvalidScenarioValue { field: "ego_speed", .. } => "--ego-speed",
        ModelError::InvalidScenarioValue { .. } => "--hazard-speed",
        ModelError::NegativeRelativeSpeed { .. } => "--hazard-speed",
        ModelError::SpeedAboveModelRange { .. } => "--ego-speed",
        ModelError::InvalidOrdinal => "--ordinal",
        ModelError::UnknownNdrtClass(_) => "--ndrt",
        ModelError::InvalidCoefficients(_) => "--coeffs",
    }
}

fn flag_error(err: ModelError) -> CliError {
    usage(format!("invalid {}: {err}", flag_for(&err)))
}

/// Inputs and result of one estimate; `--json` prints this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub driver: DriverProfile,
    pub scenario: ScenarioSpec,
    pub ctx: TakeoverContext,
    pub coefficient_source: String,
    pub coefficients: CoefficientSet,
    pub estimate: TortbEstimate,
}

fn load_coefficients(path: &Path) -> Result<CoefficientSet, CliError> {
    config::load_coefficients(path).map_err(|e| usage(format!("invalid --coeffs: {e}")))
}

fn cmd_estimate(a: &EstimateArgs) -> Result<String, CliError> {
    let driver = DriverProfile::new(a.srt, a.experience).map_err(flag_error)?;
    let ctx = TakeoverContext::new(a.ndrt, a.ordinal).map_err(flag_error)?;
    let scenario = match a.scenario {
        Some(p) => p.spec(),
        None => {
            let missing = |flag: &str| usage(format!("missing {flag} (or give --scenario)"));
            ScenarioSpec::new(
                a.noa.ok_or_else(|| missing("--noa"))?,
                a.noj.ok_or_else(|| missing("--noj"))?,
                a.ego_speed.ok_or_else(|| missing("--ego-speed"))?,
                a.hazard_speed.unwrap_or(0.0),
            )
            .map_err(flag_error)?
        }
    };
    let (coefficient_source, coefficients) = match (&a.coeffs, a.coeff_set) {
        (Some(path), _) => (path.display().to_string(), load_coefficients(path)?),
        (None, Some(CoeffSetName::Unrounded)) => ("unrounded".to_string(), CoefficientSet::unrounded()),
        (None, _) => ("published".to_string(), CoefficientSet::published()),
    };
    let estimate = estimate_tortb(&driver, &scenario, &ctx, &coefficients).map_err(flag_error)?;
    let report = EstimateReport {
        driver,
        scenario,
        ctx,
        coefficient_source,
        coefficients,
        estimate,
    };
    if a.json {
        return Ok(serde_json::to_string_pretty(&report).map_err(internal)? + "\n");
    }
    Ok(render_estimate(&report))
}

fn render_estimate(r: &EstimateReport) -> String {
    let k = &r.estimate.components;
    let mut s = String::new();
    let _ = writeln!(s, "TORTB estimate ({} coefficients)", r.coefficient_source);
    let _ = writeln!(
        s,
        "  scenario  noa={} noj={} relative speed={} km/hr {}",
        r.scenario.noa, r.scenario.noj, r.estimate.relative_speed, r.scenario.label
    );
    for (name, v) in [
        ("srt", k.srt),
        ("dec", k.dec),
        ("noa_term", k.noa_term),
        ("noj_term", k.noj_term),
        ("rsc", k.rsc),
        ("sst", k.sst),
        ("ndrtc", k.ndrtc),
        ("oc", k.oc),
    ] {
        let _ = writeln!(s, "  {name:<9} {v:>8.3} s");
    }
    let _ = writeln!(s, "  {:<9} {:>8.3} s", "total", r.estimate.total);
    for w in &r.estimate.warnings {
        let _ = writeln!(s, "  warning: {w}");
    }
    s
}

#[derive(Debug, Serialize)]
struct CalibrateReport<'a> {
    #[serde(flatten)]
    result: &'a CalibrationResult,
    oc: Option<SolvedValue>,
}

fn cmd_calibrate(a: &CalibrateArgs) -> Result<String, CliError> {
    let file = AnchorsFile::load(&a.anchors).map_err(|e| usage(format!("invalid --anchors: {e}")))?;
    let anchors = file.anchors().map_err(|e| usage(format!("invalid --anchors: {e}")))?;
    if anchors.is_empty() {
        return Err(usage(format!("invalid --anchors: {} has no [[anchor]] entries", a.anchors.display())));
    }
    let mut result = calibrate_sequence(&anchors, &file.seed(), a.chaining.into())
        .map_err(|e| usage(format!("calibration failed: {e}")))?;
    let oc = a
        .oc_effect_size
        .map(|eta| derive_oc(eta, a.oc_upper_bound))
        .transpose()
        .map_err(|e| usage(format!("invalid --oc-effect-size/--oc-upper-bound: {e}")))?;
    if let Some(oc) = oc {
        result.raw.oc_repeat = oc.raw;
        result.rounded.oc_repeat = oc.rounded;
    }

    for (path, set) in [(&a.out, &result.rounded), (&a.out_raw, &result.raw)] {
        if let Some(path) = path {
            fs::write(path, config::coefficients_to_toml(set))
                .map_err(|e| internal(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    if a.json {
        let report = CalibrateReport { result: &result, oc };
        return Ok(serde_json::to_string_pretty(&report).map_err(internal)? + "\n");
    }
    let mut s = String::new();
    let chaining = match result.chaining {
        Chaining::UseRaw => "raw",
        Chaining::UseRounded => "rounded",
    };
    let _ = writeln!(s, "calibration ({chaining} chaining)");
    let _ = writeln!(s, "  {:<10} {:<8} {:>10} {:>8} {:>10}", "anchor", "unknown", "raw", "rounded", "residual");
    for c in &result.solved {
        let _ = writeln!(
            s,
            "  {:<10} {:<8} {:>10.4} {:>8.1} {:>10.4}",
            c.label, c.unknown.to_string(), c.raw, c.rounded, c.residual
        );
    }
    if let Some(oc) = oc {
        let _ = writeln!(s, "  {:<10} {:<8} {:>10.4} {:>8.1}", "derived", "oc", oc.raw, oc.rounded);
    }
    Ok(s)
}

#[derive(Debug, Serialize)]
struct LogMetrics {
    log: String,
    tor_time: f64,
    samples: usize,
    #[serde(flatten)]
    metrics: TakeoverMetrics,
}

fn fmt_opt(v: Option<f64>, precision: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.precision$}"))
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<String, CliError> {
    if !(a.threshold > 0.0 && a.threshold <= 1.0) {
        return Err(usage(format!("invalid --threshold: {} is outside (0, 1]", a.threshold)));
    }
    if !(a.pre_window > 0.0) {
        return Err(usage("invalid --pre-window: must be > 0"));
    }
    if !(a.post_window > 0.0) {
        return Err(usage("invalid --post-window: must be > 0"));
    }
    let mut rows = Vec::new();
    for path in &a.log {
        let file = fs::File::open(path).map_err(|e| usage(format!("invalid --log {}: {e}", path.display())))?;
        let log = parse_drive_log(std::io::BufReader::new(file))
            .map_err(|e| usage(format!("invalid --log {}: {e}", path.display())))?;
        let metrics = extract_metrics(&log, a.pre_window, a.post_window, a.threshold)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        rows.push(LogMetrics {
            log: path.display().to_string(),
            tor_time: log.tor_time(),
            samples: log.samples().len(),
            metrics,
        });
    }

    match a.format {
        OutputFormat::Json => {
            let keyed: Vec<((), TakeoverMetrics)> = rows.iter().map(|r| ((), r.metrics)).collect();
            let summary = summarize_metrics(&keyed).map_err(internal)?.remove(&());
            let body = serde_json::json!({ "logs": rows, "summary": summary });
            Ok(serde_json::to_string_pretty(&body).map_err(internal)? + "\n")
        }
        OutputFormat::Csv => {
            let mut s = String::from("log,tor_time,tot,takeover_time_abs,avg_ld,max_acc\n");
            for r in &rows {
                let m = &r.metrics;
                let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.log,
                    r.tor_time,
                    opt(m.tot),
                    opt(m.takeover_time_abs),
                    m.avg_ld,
                    opt(m.max_acc)
                );
            }
            Ok(s)
        }
        OutputFormat::Table => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:<32} {:>8} {:>8} {:>10} {:>10}",
                "log", "tor [s]", "tot [s]", "avg_ld [m]", "max_acc"
            );
            for r in &rows {
                let m = &r.metrics;
                let _ = writeln!(
                    s,
                    "{:<32} {:>8.3} {:>8} {:>10.4} {:>10}",
                    r.log,
                    r.tor_time,
                    fmt_opt(m.tot, 3),
                    m.avg_ld,
                    fmt_opt(m.max_acc, 3)
                );
            }
            let _ = writeln!(
                s,
                "avg_ld window: {} s before to {} s after TOR; takeover threshold {}",
                a.pre_window, a.post_window, a.threshold
            );
            Ok(s)
        }
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<String, CliError> {
    let file = EpisodesFile::load(&a.config).map_err(|e| usage(format!("invalid --config: {e}")))?;
    let configs = file.configs().map_err(|e| usage(format!("invalid --config: {e}")))?;
    if configs.is_empty() {
        return Err(usage(format!("invalid --config: {} has no [[episode]] entries", a.config.display())));
    }
    let base_seed = a.seed.unwrap_or(file.base_seed);
    let report = run_batch(&configs, base_seed).map_err(|e| usage(format!("simulation failed: {e}")))?;
    let report_json = serde_json::to_string_pretty(&report).map_err(internal)? + "\n";

    if let Some(dir) = &a.out_dir {
        write_batch(dir, &report, &report_json)?;
    }
    if a.json {
        return Ok(report_json);
    }
    Ok(render_batch(&report))
}

fn write_batch(dir: &Path, report: &BatchReport, report_json: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| internal(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for (i, o) in report.outcomes.iter().enumerate() {
        let file = fs::File::create(dir.join(format!("episode_{i:03}.csv"))).map_err(io)?;
        o.log.write_csv(std::io::BufWriter::new(file)).map_err(internal)?;
    }
    fs::write(dir.join("report.json"), report_json).map_err(io)
}

fn render_batch(r: &BatchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "episodes: {} (base seed {})", r.outcomes.len(), r.base_seed);
    let _ = writeln!(
        s,
        "{:>4} {:>10} {:>10} {:>10} {:>10}  {}",
        "#", "onset [s]", "required", "deadline", "margin", "outcome"
    );
    for (i, o) in r.outcomes.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>4} {:>10.3} {:>10.3} {:>10.3} {:>10.3}  {:?}",
            i, o.response_onset, o.required_time, o.deadline, o.margin, o.classification
        );
    }
    let _ = writeln!(s, "success {}  late {}  collision {}", r.success, r.late, r.collision);
    let m = &r.margin;
    let _ = writeln!(
        s,
        "margin: mean {:.3} s, std {:.3} s, min {:.3} s, max {:.3} s",
        m.mean, m.std, m.min, m.max
    );
    s
}

fn cmd_table(a: &TableArgs) -> Result<String, CliError> {
    let rows: Vec<TableRowResult> = reproduce_table().map_err(internal)?;
    if a.json {
        return Ok(serde_json::to_string_pretty(&rows).map_err(internal)? + "\n");
    }
    let mut s = String::new();
    let _ = writeln!(s, "driver: srt 0.2 s, 80 km/week (dec 1.5 s)");
    let _ = writeln!(
        s,
        "{:>3} {:>3} {:>14} {:>7} {:>5} {:>6} {:>9} {:>9}",
        "NOA", "NOJ", "RS [km/hr]", "RSC [s]", "OC", "NDRTC", "TORTB [s]", "published"
    );
    for r in &rows {
        let k = &r.estimate.components;
        let rs = format!("{} - {} = {}", r.row.ego_speed, r.row.hazard_speed, r.estimate.relative_speed);
        let _ = writeln!(
            s,
            "{:>3} {:>3} {:>14} {:>7} {:>5} {:>6} {:>9.3} {:>9}",
            r.row.noa, r.row.noj, rs, k.rsc, k.oc, k.ndrtc, r.estimate.total, r.row.published_tortb
        );
    }
    Ok(s)
}
