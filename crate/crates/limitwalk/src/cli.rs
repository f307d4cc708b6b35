//! Command-line front end: JSON pattern configs in, TSV tables on standard
//! output, optional JSON run reports, warnings on standard error.
//!
//! Output is deterministic: the same config, flags, and seed produce
//! byte-identical bytes on every run. Every number is printed at 12
//! significant digits, in both the TSV tables and the JSON report.

use crate::cycle::{CaseLabel, CyclePattern};
use crate::error::{Error, Result};
use crate::limitdist::{BuildConfig, LimitDistribution};
use crate::oracle::{verify, VerifyConfig};
use crate::pmf::DiscretePmf;
use crate::roots::{find_unit_roots, RootConfig, RootSet};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Tables and diagnostics for the limiting probability that a periodically
/// driven integer walk stays at or below a fixed level forever.
#[derive(Debug, Parser)]
#[command(name = "limitwalk", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Pattern configuration file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the full run report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Period structure: length, descent, support edge, drift, case.
    Summary,
    /// Unit-disk zeros of the period generating function.
    Roots,
    /// Boundary values seeding the recurrence.
    Init,
    /// Table of the limit CDF on an integer range.
    Cdf {
        #[arg(long, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, allow_negative_numbers = true)]
        to: i64,
    },
    /// Table of the limit mass function on an integer range.
    Pmf {
        #[arg(long, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, allow_negative_numbers = true)]
        to: i64,
    },
    /// Generating function of the limit law at a complex point.
    Gf {
        /// Evaluation point as RE,IM (for example "0.5,-0.25").
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Compare analytic values against the exact and Monte Carlo oracles.
    Verify {
        /// Comma-separated integer evaluation points.
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Summary => "summary",
            Command::Roots => "roots",
            Command::Init => "init",
            Command::Cdf { .. } => "cdf",
            Command::Pmf { .. } => "pmf",
            Command::Gf { .. } => "gf",
            Command::Verify { .. } => "verify",
        }
    }
}

/// On-disk pattern description. Unknown fields are rejected so typos fail
/// loudly instead of silently falling back to defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    pub laws: Vec<LawSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    Geometric { p: f64 },
    ShiftedPoisson { lambda: f64, shift: i64 },
    DiscreteWeibullUnit,
    Table { min_support: i64, weights: Vec<f64> },
}

impl LawSpec {
    fn build(&self, tail_tol: f64) -> Result<DiscretePmf> {
        match self {
            LawSpec::Geometric { p } => DiscretePmf::geometric(*p, tail_tol),
            LawSpec::ShiftedPoisson { lambda, shift } => {
                DiscretePmf::shifted_poisson(*lambda, *shift, tail_tol)
            }
            LawSpec::DiscreteWeibullUnit => DiscretePmf::discrete_weibull_unit(tail_tol),
            LawSpec::Table {
                min_support,
                weights,
            } => DiscretePmf::from_weights(*min_support, weights),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_disk_slack")]
    pub disk_slack: f64,
    #[serde(default = "default_cluster_tol")]
    pub cluster_tol: f64,
    #[serde(default = "default_dp_convergence_tol")]
    pub dp_convergence_tol: f64,
}

fn default_tail_tol() -> f64 {
    1e-12
}
fn default_disk_slack() -> f64 {
    1e-7
}
fn default_cluster_tol() -> f64 {
    1e-6
}
fn default_dp_convergence_tol() -> f64 {
    5e-4
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tail_tol: default_tail_tol(),
            disk_slack: default_disk_slack(),
            cluster_tol: default_cluster_tol(),
            dp_convergence_tol: default_dp_convergence_tol(),
        }
    }
}

impl Tolerances {
    fn build_config(&self) -> BuildConfig {
        BuildConfig {
            tail_tol: self.tail_tol,
            root: RootConfig {
                disk_slack: self.disk_slack,
                cluster_tol: self.cluster_tol,
                ..RootConfig::default()
            },
            ..BuildConfig::default()
        }
    }
}

/// Everything one invocation computed, for machine consumption. Field order
/// is fixed and floats are pre-rounded to 12 significant digits, so the
/// serialized form is stable across runs.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<SummaryEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<RootEcho>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<TableRowEcho>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gf: Option<GfEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Vec<VerifyEcho>>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    fn bare(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            case: None,
            summary: None,
            roots: None,
            boundary: None,
            table: None,
            gf: None,
            verification: None,
            warnings: Vec::new(),
            error: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SummaryEcho {
    pub n: usize,
    pub d: i64,
    pub m: i64,
    pub mean_sn: f64,
    pub tail_error: f64,
}

#[derive(Debug, Serialize)]
pub struct RootEcho {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct BoundaryEcho {
    pub method: String,
    pub base: i64,
    pub values: Vec<f64>,
    pub balance_residual: f64,
    pub condition: f64,
}

#[derive(Debug, Serialize)]
pub struct TableRowEcho {
    pub x: i64,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct GfEcho {
    pub s_re: f64,
    pub s_im: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyEcho {
    pub x: i64,
    pub analytic: f64,
    pub dp: f64,
    pub mc: f64,
    pub mc_stderr: f64,
    pub pass: bool,
}

/// Process entry point used by the binary.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Runs one parsed invocation end to end.
pub fn execute(cli: &Cli) -> Result<()> {
    let command_name = cli.command.name();
    let outcome = load_and_run(cli);
    match outcome {
        Ok((stdout_text, report)) => {
            print!("{stdout_text}");
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            write_report(cli.json.as_deref(), &report)?;
            Ok(())
        }
        Err(e) => {
            let mut report = RunReport::bare(command_name);
            report.error = Some(e.name().to_string());
            write_report(cli.json.as_deref(), &report)?;
            Err(e)
        }
    }
}

fn load_and_run(cli: &Cli) -> Result<(String, RunReport)> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--config <PATH> is required".to_string()))?;
    let config = load_config(path)?;
    run_command(&cli.command, &config)
}

/// Reads and strictly parses a pattern config, with line/column diagnostics
/// on malformed input.
pub fn load_config(path: &Path) -> Result<PatternConfig> {
    let raw = fs::read_to_string(path).map_err(|e| {
        Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config(&raw)
}

pub fn parse_config(raw: &str) -> Result<PatternConfig> {
    let config: PatternConfig = serde_json::from_str(raw)
        .map_err(|e| Error::InvalidParameter(format!("config parse error: {e}")))?;
    if config.laws.is_empty() {
        return Err(Error::InvalidParameter(
            "config must list at least one law".to_string(),
        ));
    }
    Ok(config)
}

pub fn build_pattern(config: &PatternConfig) -> Result<CyclePattern> {
    let laws = config
        .laws
        .iter()
        .map(|law| law.build(config.tolerances.tail_tol))
        .collect::<Result<Vec<_>>>()?;
    CyclePattern::new(laws)
}

/// Dispatches one subcommand, returning the TSV text for standard output and
/// the full report.
pub fn run_command(command: &Command, config: &PatternConfig) -> Result<(String, RunReport)> {
    let pattern = build_pattern(config)?;
    let build_cfg = config.tolerances.build_config();
    let summary = pattern.summarize(build_cfg.tail_tol)?;
    let case = summary.classify()?;

    let mut report = RunReport::bare(command.name());
    report.case = Some(case.as_str().to_string());
    report.summary = Some(SummaryEcho {
        n: summary.n(),
        d: summary.d(),
        m: summary.m(),
        mean_sn: round_sig(summary.mean_sn()),
        tail_error: round_sig(summary.tail_error_total()),
    });
    if summary.tail_error_total() > 0.0 {
        report.warnings.push(format!(
            "combined tail truncation mass {}",
            fmt_sig(summary.tail_error_total())
        ));
    }
    match case {
        CaseLabel::ZeroFunction => report
            .warnings
            .push("limit function is identically zero: F∞ ≡ 0".to_string()),
        CaseLabel::DegenerateStep => report
            .warnings
            .push(format!("limit function is a unit step at {}", summary.m())),
        _ => {}
    }

    let mut out = String::new();
    match command {
        Command::Summary => {
            out.push_str("field\tvalue\n");
            out.push_str(&format!("n\t{}\n", summary.n()));
            out.push_str(&format!("d\t{}\n", summary.d()));
            out.push_str(&format!("m\t{}\n", summary.m()));
            out.push_str(&format!("mean_sn\t{}\n", fmt_sig(summary.mean_sn())));
            out.push_str(&format!(
                "tail_error\t{}\n",
                fmt_sig(summary.tail_error_total())
            ));
            out.push_str(&format!("case\t{}\n", case.as_str()));
        }
        Command::Roots => {
            let set = find_unit_roots(&summary, &build_cfg.root)?;
            push_roots(&mut report, &set);
            out.push_str("re\tim\tmultiplicity\tresidual\n");
            for root in set.roots() {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    fmt_sig(root.value.re),
                    fmt_sig(root.value.im),
                    root.multiplicity,
                    fmt_sig(root.residual)
                ));
            }
        }
        Command::Init => {
            let ld = LimitDistribution::build(&pattern, &build_cfg)?;
            push_distribution(&mut report, &ld);
            out.push_str("x\tF_inf\n");
            if let Some(boundary) = ld.boundary() {
                for (i, &v) in boundary.values.iter().enumerate() {
                    out.push_str(&format!("{}\t{}\n", boundary.base + i as i64, fmt_sig(v)));
                }
            }
        }
        Command::Cdf { from, to } => {
            check_range(*from, *to)?;
            let ld = LimitDistribution::build(&pattern, &build_cfg)?;
            push_distribution(&mut report, &ld);
            let mut rows = Vec::new();
            out.push_str("x\tF_inf\n");
            for x in *from..=*to {
                let v = ld.cdf(x)?;
                out.push_str(&format!("{x}\t{}\n", fmt_sig(v)));
                rows.push(TableRowEcho {
                    x,
                    value: round_sig(v),
                });
            }
            report.table = Some(rows);
        }
        Command::Pmf { from, to } => {
            check_range(*from, *to)?;
            let ld = LimitDistribution::build(&pattern, &build_cfg)?;
            push_distribution(&mut report, &ld);
            let mut rows = Vec::new();
            out.push_str("x\tf_inf\n");
            for x in *from..=*to {
                let v = ld.pmf_xi(x)?;
                out.push_str(&format!("{x}\t{}\n", fmt_sig(v)));
                rows.push(TableRowEcho {
                    x,
                    value: round_sig(v),
                });
            }
            report.table = Some(rows);
        }
        Command::Gf { s } => {
            let point = parse_complex(s)?;
            let ld = LimitDistribution::build(&pattern, &build_cfg)?;
            push_distribution(&mut report, &ld);
            let value = ld.xi_series(point)?;
            report.gf = Some(GfEcho {
                s_re: round_sig(point.re),
                s_im: round_sig(point.im),
                re: round_sig(value.re),
                im: round_sig(value.im),
            });
            out.push_str("s_re\ts_im\tre\tim\n");
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                fmt_sig(point.re),
                fmt_sig(point.im),
                fmt_sig(value.re),
                fmt_sig(value.im)
            ));
        }
        Command::Verify {
            points,
            trials,
            horizon,
            seed,
        } => {
            let xs = parse_points(points)?;
            let ld = LimitDistribution::build(&pattern, &build_cfg)?;
            push_distribution(&mut report, &ld);
            let defaults = VerifyConfig::default();
            let cfg = VerifyConfig {
                trials: trials.unwrap_or(defaults.trials),
                horizon: horizon.unwrap_or(defaults.horizon),
                seed: seed.unwrap_or(defaults.seed),
                dp_convergence_tol: config.tolerances.dp_convergence_tol,
                state_budget: defaults.state_budget,
            };
            let rows = verify(&ld, &xs, &cfg)?;
            out.push_str("x\tanalytic\tdp\tmc\tmc_stderr\tverdict\n");
            let mut echoes = Vec::new();
            for row in &rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    row.x,
                    fmt_sig(row.analytic),
                    fmt_sig(row.dp.estimate),
                    fmt_sig(row.mc.estimate),
                    fmt_sig(row.mc.stderr),
                    if row.pass { "PASS" } else { "FAIL" }
                ));
                echoes.push(VerifyEcho {
                    x: row.x,
                    analytic: round_sig(row.analytic),
                    dp: round_sig(row.dp.estimate),
                    mc: round_sig(row.mc.estimate),
                    mc_stderr: round_sig(row.mc.stderr),
                    pass: row.pass,
                });
            }
            report.verification = Some(echoes);
        }
    }
    Ok((out, report))
}

fn check_range(from: i64, to: i64) -> Result<()> {
    if from > to {
        return Err(Error::InvalidParameter(format!(
            "empty range: --from {from} exceeds --to {to}"
        )));
    }
    Ok(())
}

fn push_roots(report: &mut RunReport, set: &RootSet) {
    report.roots = Some(
        set.roots()
            .iter()
            .map(|root| RootEcho {
                re: round_sig(root.value.re),
                im: round_sig(root.value.im),
                multiplicity: root.multiplicity,
                residual: round_sig(root.residual),
            })
            .collect(),
    );
}

fn push_distribution(report: &mut RunReport, ld: &LimitDistribution) {
    if !ld.roots().is_empty() {
        push_roots(report, ld.roots());
    }
    if let Some(boundary) = ld.boundary() {
        report.boundary = Some(BoundaryEcho {
            method: boundary.method.as_str().to_string(),
            base: boundary.base,
            values: boundary.values.iter().map(|&v| round_sig(v)).collect(),
            balance_residual: round_sig(boundary.balance_residual),
            condition: round_sig(boundary.system_condition),
        });
        if boundary.system_condition > 1e8 {
            report.warnings.push(format!(
                "boundary system condition number {} is large; values may lose accuracy",
                fmt_sig(boundary.system_condition)
            ));
        }
    }
}

fn write_report(path: Option<&Path>, report: &RunReport) -> Result<()> {
    let Some(path) = path else {
        return Ok(());
    };
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InternalInconsistency(format!("report serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| {
        Error::InvalidParameter(format!("cannot write report {}: {e}", path.display()))
    })
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || {
        Error::InvalidParameter(format!(
            "cannot parse complex point {text:?}; expected RE,IM"
        ))
    };
    let mut parts = text.split(',');
    let re: f64 = parts
        .next()
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(bad)?;
    let im: f64 = match parts.next() {
        Some(t) => t.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn parse_points(text: &str) -> Result<Vec<i64>> {
    let points = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| {
            Error::InvalidParameter(format!(
                "cannot parse points {text:?}; expected comma-separated integers"
            ))
        })?;
    if points.is_empty() {
        return Err(Error::InvalidParameter("points list is empty".to_string()));
    }
    Ok(points)
}

/// Formats at 12 significant digits in fixed notation; round-trips through
/// `round_sig` exactly.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci[sci.find('e').map(|i| i + 1).unwrap_or(0)..]
        .parse()
        .unwrap_or(0);
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Rounds to 12 significant digits through a decimal representation, so
/// serialized reports do not leak noise past the printed precision.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}
