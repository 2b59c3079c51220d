//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 verification failure,
//! 4 I/O failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::dynamics::{
    closed_form_reference, evaluate, find_death, pipeline_lambda1, sweep, unit_grid, DeathPoint,
    Measure, Scenario, SweepRecord, DEFAULT_DEATH_GRID, DEFAULT_EPS_DEATH,
};
use crate::verify::{self, VerifyConfig};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const CSV_HEADER: &str = "scenario,alpha,gamma,concurrence,ip,ip_branch";

#[derive(Debug, Parser)]
#[command(
    name = "ipdecay",
    version,
    about = "Two-qubit decoherence: concurrence and interferometric power"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate both measures on a uniform (alpha, gamma) grid.
    Sweep(SweepArgs),
    /// Evaluate one (alpha, gamma) point and compare with printed closed forms.
    Point(PointArgs),
    /// Classify finite-gamma death against asymptotic decay per alpha.
    Death(DeathArgs),
    /// Run the invariant, oracle and closed-form suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 101, value_parser = parse_steps)]
    pub alpha_steps: usize,
    #[arg(long, default_value_t = 101, value_parser = parse_steps)]
    pub gamma_steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    #[arg(long, value_parser = parse_unit)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_unit)]
    pub gamma: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DeathArgs {
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    /// Repeat for several values; without it a uniform alpha grid is used.
    #[arg(long, value_parser = parse_unit)]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 21, value_parser = parse_steps)]
    pub alpha_steps: usize,
    #[arg(long, default_value_t = DEFAULT_EPS_DEATH)]
    pub eps_death: f64,
    /// Gamma samples before bisection.
    #[arg(long, default_value_t = DEFAULT_DEATH_GRID, value_parser = parse_steps)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Add a Kraus set whose completeness is broken by 1e-3.
    #[arg(long, hide = true)]
    pub tamper: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_steps(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 2 {
        Ok(v)
    } else {
        Err(format!("needs at least 2, got {v}"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("verification failed")]
    Verification,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Verification => EXIT_VERIFY,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

/// Fixed 12-decimal formatting with negative zero folded to zero.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// A JSON number carrying exactly the value printed by [`fmt_num`].
fn json_num(x: f64) -> Value {
    let v: f64 = fmt_num(x).parse().expect("formatted float parses");
    json!(v)
}

pub fn records_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.scenario,
            fmt_num(r.alpha),
            fmt_num(r.gamma),
            fmt_num(r.concurrence),
            fmt_num(r.ip),
            r.ip_branch
        ));
    }
    out
}

fn record_json(r: &SweepRecord) -> Value {
    let mut m = Map::new();
    m.insert("scenario".into(), json!(r.scenario.name()));
    m.insert("alpha".into(), json_num(r.alpha));
    m.insert("gamma".into(), json_num(r.gamma));
    m.insert("concurrence".into(), json_num(r.concurrence));
    m.insert("ip".into(), json_num(r.ip));
    m.insert("ip_branch".into(), json!(r.ip_branch));
    Value::Object(m)
}

pub fn records_json(records: &[SweepRecord]) -> String {
    let arr: Vec<Value> = records.iter().map(record_json).collect();
    let mut s = serde_json::to_string_pretty(&arr).expect("serialisable");
    s.push('\n');
    s
}

fn emit(output: &OutputArgs, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            }),
    }
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let records = sweep(args.scenario, args.alpha_steps, args.gamma_steps)?;
    let body = match args.output.format {
        Format::Csv => records_csv(&records),
        Format::Json => records_json(&records),
    };
    emit(&args.output, &body, stdout)
}

fn cmd_point(args: &PointArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (sc, a, g) = (args.scenario, args.alpha, args.gamma);
    let record = evaluate(sc, a, g)?;
    let cf = closed_form_reference(sc, a, g)?;
    let mut comparisons: Vec<(&str, f64, f64)> = Vec::new();
    if let Some(c) = cf.concurrence {
        comparisons.push(("concurrence", c, record.concurrence));
    }
    if let Some(ip) = cf.ip {
        comparisons.push(("ip", ip, record.ip));
    }
    if cf.lambda1.is_some() || cf.lambda1_q1.is_some() {
        let pipeline = pipeline_lambda1(sc, a, g)?;
        if let Some(l) = cf.lambda1 {
            comparisons.push(("lambda1", l, pipeline));
        }
        if let Some(l) = cf.lambda1_q1 {
            comparisons.push(("lambda1_q1_form", l, pipeline));
        }
    }

    let body = match args.output.format {
        Format::Csv => {
            let mut s = records_csv(&[record]);
            if comparisons.is_empty() {
                s.push_str("# no printed closed form for this scenario\n");
            }
            for (name, printed, pipeline) in &comparisons {
                let dev = printed - pipeline;
                let flag = if dev.abs() > 1e-8 { "  DISAGREES" } else { "" };
                s.push_str(&format!(
                    "# closed-form {name}: printed {} pipeline {} deviation {dev:+.3e}{flag}\n",
                    fmt_num(*printed),
                    fmt_num(*pipeline)
                ));
            }
            s
        }
        Format::Json => {
            let closed: Vec<Value> = comparisons
                .iter()
                .map(|(name, printed, pipeline)| {
                    json!({
                        "quantity": name,
                        "printed": json_num(*printed),
                        "pipeline": json_num(*pipeline),
                        "deviation": printed - pipeline,
                        "disagrees": (printed - pipeline).abs() > 1e-8,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "record": record_json(&record),
                "closed_form": closed,
            }))
            .expect("serialisable");
            s.push('\n');
            s
        }
    };
    emit(&args.output, &body, stdout)
}

fn death_cell(p: DeathPoint) -> Value {
    match p {
        DeathPoint::Finite(g) => json_num(g),
        DeathPoint::Asymptotic => json!("asymptotic"),
    }
}

fn cmd_death(args: &DeathArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let alphas = if args.alpha.is_empty() {
        unit_grid(args.alpha_steps)
    } else {
        args.alpha.clone()
    };
    let mut rows = Vec::with_capacity(alphas.len());
    for &a in &alphas {
        let c = find_death(
            args.scenario,
            a,
            Measure::Concurrence,
            args.eps_death,
            args.grid,
        )?;
        let ip = find_death(
            args.scenario,
            a,
            Measure::InterferometricPower,
            args.eps_death,
            args.grid,
        )?;
        rows.push((a, c, ip));
    }
    let body = match args.output.format {
        Format::Csv => {
            let mut s = String::from("alpha,gamma_star_concurrence,gamma_star_ip,min_ip_sampled\n");
            for (a, c, ip) in &rows {
                let gs = |p: DeathPoint| match p {
                    DeathPoint::Finite(g) => fmt_num(g),
                    DeathPoint::Asymptotic => "asymptotic".into(),
                };
                s.push_str(&format!(
                    "{},{},{},{:.6e}\n",
                    fmt_num(*a),
                    gs(c.gamma_star),
                    gs(ip.gamma_star),
                    ip.min_sampled
                ));
            }
            s
        }
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|(a, c, ip)| {
                    json!({
                        "alpha": json_num(*a),
                        "gamma_star_concurrence": death_cell(c.gamma_star),
                        "gamma_star_ip": death_cell(ip.gamma_star),
                        "min_ip_sampled": ip.min_sampled,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "scenario": args.scenario.name(),
                "eps_death": args.eps_death,
                "grid": args.grid,
                "rows": arr,
            }))
            .expect("serialisable");
            s.push('\n');
            s
        }
    };
    emit(&args.output, &body, stdout)
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut config = VerifyConfig {
        seed: args.seed,
        trials: args.trials,
        ..VerifyConfig::default()
    };
    if args.tamper {
        config.extra_channels.push(verify::tampered_channel(1e-3)?);
    }
    let report = verify::run(&config)?;
    let body = match args.output.format {
        Format::Csv => report.render(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("serialisable");
            s.push('\n');
            s
        }
    };
    emit(&args.output, &body, stdout)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Point(a) => cmd_point(a, stdout),
        Command::Death(a) => cmd_death(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(1.0), "1.000000000000");
        assert_eq!(fmt_num(0.0), "0.000000000000");
        assert_eq!(fmt_num(-0.0), "0.000000000000");
        assert_eq!(fmt_num(-1e-15), "0.000000000000");
        assert_eq!(fmt_num(0.875), "0.875000000000");
        assert_eq!(fmt_num(-0.25), "-0.250000000000");
    }

    #[test]
    fn argument_parsers() {
        assert!(parse_unit("0.5").is_ok());
        assert!(parse_unit("1.5").is_err());
        assert!(parse_unit("x").is_err());
        assert!(parse_steps("1").is_err());
        assert!(parse_scenario("dephasing+gad").is_ok());
        assert!(parse_scenario("phase").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
