//! `veritrig`: run the exact, fix-point and binary32 experiments from the
//! command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 precondition violation,
//! 3 verification failure (a bound, invariant or postcondition did not hold).

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use veritrig::fixtrig::{self, FixTrigError, PairedTrace};
use veritrig::floatrepro::{self, ReproError, ScanParams, ScanRow};
use veritrig::oracle::{self, AlgoResult, OracleError, Series, JSON_DECIMAL_DIGITS};
use veritrig::verify::{self, Suite, SuiteReport, VerifyOptions};
use veritrig::{parse_format, FixError, FixNum, Rat};

use config::Config;

/// Environment variable overriding the binary32 iteration cap.
pub const ITER_CAP_ENV: &str = "VERITRIG_ITER_CAP";

#[derive(Parser, Debug)]
#[command(name = "veritrig", version, about = "Verified Taylor-series trigonometry experiments")]
struct Cli {
    /// Output mode.
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,

    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Leibniz-series pi in exact arithmetic.
    Pi(PiArgs),
    /// Exact Taylor cosine.
    Cos(TrigArgs),
    /// Exact Taylor sine.
    Sin(TrigArgs),
    /// Fix-point cosine with its a-priori error bound.
    Fixcos(FixArgs),
    /// Fix-point sine with its a-priori error bound.
    Fixsin(FixArgs),
    /// Scan the naive binary32 cosine over a range of arguments.
    #[command(name = "repro-table1")]
    ReproTable1(ScanArgs),
    /// Cosine by the unbounded series, rounded to a decimal string.
    Golden(GoldenArgs),
    /// Run a seeded property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct PiArgs {
    /// Accuracy, as `p/q` or a decimal.
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Args, Debug)]
struct TrigArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// Series summed until the first term at most eps (any x).
    #[arg(long, conflicts_with = "zerone")]
    unbounded: bool,
    /// Range-restricted variant for |x| <= 1.
    #[arg(long)]
    zerone: bool,
}

#[derive(Args, Debug)]
struct FixArgs {
    /// Grid, e.g. `1/256:[-8,64]`.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Write the paired exact/fix-point trace here (JSON if the name ends in `.json`, else CSV).
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    max: Option<String>,
    #[arg(long)]
    step: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// Maximum loop iterations per argument.
    #[arg(long)]
    iteration_cap: Option<u64>,
}

#[derive(Args, Debug)]
struct GoldenArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// Fractional digits, rounded half away from zero.
    #[arg(long)]
    digits: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = |s: &str| s.parse::<Suite>())]
    suite: Option<Suite>,
    /// Samples per check, overriding each check's default.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Precondition(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Precondition(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        if e.is_verification_failure() {
            Failure::Verification(e.to_string())
        } else {
            Failure::Precondition(e.to_string())
        }
    }
}

impl From<FixTrigError> for Failure {
    fn from(e: FixTrigError) -> Self {
        if e.is_verification_failure() {
            Failure::Verification(e.to_string())
        } else {
            Failure::Precondition(e.to_string())
        }
    }
}

impl From<ReproError> for Failure {
    fn from(e: ReproError) -> Self {
        Failure::Precondition(e.to_string())
    }
}

type Run = Result<String, Failure>;

/// Resolved settings: flags first, then the config file.
struct Ctx {
    output: Output,
    config: Config,
}

impl Ctx {
    fn value(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.config.get(key).map(str::to_string))
    }

    fn required(&self, flag: &Option<String>, key: &str) -> Result<String, Failure> {
        self.value(flag, key).ok_or_else(|| Failure::Usage(format!("missing --{key}")))
    }

    fn rat(&self, flag: &Option<String>, key: &str) -> Result<Rat, Failure> {
        parse_rat(&self.required(flag, key)?, key)
    }

    fn rat_or(&self, flag: &Option<String>, key: &str, default: &str) -> Result<Rat, Failure> {
        parse_rat(&self.value(flag, key).unwrap_or_else(|| default.to_string()), key)
    }

    fn parsed<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .config
                .get(key)
                .map(|s| s.parse::<T>().map_err(|e| Failure::Usage(format!("invalid {key} {s:?}: {e}"))))
                .transpose(),
        }
    }
}

fn parse_rat(s: &str, key: &str) -> Result<Rat, Failure> {
    s.trim().parse::<Rat>().map_err(|e| Failure::Usage(format!("invalid --{key} {s:?}: {e}")))
}

/// Binary32 literal; `p/q` is accepted and converted through `f64`.
fn parse_f32(s: &str, key: &str) -> Result<f32, Failure> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f32>() {
        return Ok(v);
    }
    let r = parse_rat(s, key)?;
    Ok(r.to_f64() as f32)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("veritrig: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Run {
    let config = match &cli.config {
        Some(path) => Config::load(path).map_err(Failure::Usage)?,
        None => Config::default(),
    };
    let output = match cli.output {
        Some(o) => o,
        None => match config.get("output") {
            Some(s) => Output::from_str(s, true).map_err(|e| Failure::Usage(format!("invalid output {s:?}: {e}")))?,
            None => Output::Table,
        },
    };
    let ctx = Ctx { output, config };
    match &cli.command {
        Command::Pi(a) => pi(&ctx, a),
        Command::Cos(a) => trig(&ctx, a, Series::Cos),
        Command::Sin(a) => trig(&ctx, a, Series::Sin),
        Command::Fixcos(a) => fix(&ctx, a, Series::Cos),
        Command::Fixsin(a) => fix(&ctx, a, Series::Sin),
        Command::ReproTable1(a) => scan(&ctx, a),
        Command::Golden(a) => golden(&ctx, a),
        Command::Verify(a) => verify_suite(&ctx, a),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Renders `(key, value)` pairs as an aligned table or a one-row CSV.
fn render_pairs(output: Output, pairs: &[(&str, String)], json: impl FnOnce() -> String) -> String {
    match output {
        Output::Json => json(),
        Output::Csv => {
            let header: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
            let row: Vec<&str> = pairs.iter().map(|(_, v)| v.as_str()).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
        Output::Table => {
            let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            pairs.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
        }
    }
}

fn render_algo(output: Output, res: &AlgoResult) -> String {
    let j = res.to_json();
    let pairs = [
        ("value", j.value.to_string()),
        ("decimal", j.decimal.clone()),
        ("iterations", j.iterations.to_string()),
        ("bound", j.bound.to_string()),
    ];
    render_pairs(output, &pairs, || to_json(&j))
}

fn render_value(output: Output, value: &Rat) -> String {
    let decimal = value.to_decimal(JSON_DECIMAL_DIGITS);
    let pairs = [("value", value.to_string()), ("decimal", decimal.clone())];
    render_pairs(output, &pairs, || to_json(&json!({ "value": value, "decimal": decimal })))
}

fn pi(ctx: &Ctx, a: &PiArgs) -> Run {
    let eps = ctx.rat(&a.eps, "eps")?;
    Ok(render_algo(ctx.output, &oracle::pi_leibniz(&eps)?))
}

fn trig(ctx: &Ctx, a: &TrigArgs, series: Series) -> Run {
    let x = ctx.rat(&a.x, "x")?;
    let eps = ctx.rat(&a.eps, "eps")?;
    if a.unbounded {
        return Ok(render_value(ctx.output, &oracle::unbounded(series, &x, &eps)?));
    }
    let res = match (series, a.zerone) {
        (Series::Cos, false) => oracle::cos_taylor(&x, &eps),
        (Series::Cos, true) => oracle::cos_zerone(&x, &eps),
        (Series::Sin, false) => oracle::sin_taylor(&x, &eps),
        (Series::Sin, true) => oracle::sin_zerone(&x, &eps),
    }?;
    Ok(render_algo(ctx.output, &res))
}

fn fix_value(r: &Rat, format: &std::sync::Arc<veritrig::FixFormat>, key: &str) -> Result<FixNum, Failure> {
    let v = FixNum::from_rat(r, format).map_err(|e| match e {
        FixError::RangeOverflow { .. } => Failure::Precondition(format!("--{key}: {e}")),
        e => Failure::Usage(format!("--{key}: {e}")),
    })?;
    if v.to_rat() != *r {
        eprintln!("veritrig: --{key} {r} rounded to {} on the grid", v.to_rat());
    }
    Ok(v)
}

fn fix(ctx: &Ctx, a: &FixArgs, series: Series) -> Run {
    let literal = ctx.required(&a.format, "format")?;
    let format = parse_format(&literal).map_err(|e| Failure::Usage(format!("invalid --format {literal:?}: {e}")))?;
    let x = fix_value(&ctx.rat(&a.x, "x")?, &format, "x")?;
    let eps = fix_value(&ctx.rat(&a.eps, "eps")?, &format, "eps")?;
    let trace_path = a.trace.clone().or_else(|| ctx.config.get("trace").map(PathBuf::from));
    let res = match &trace_path {
        Some(path) => {
            let trace = fixtrig::paired_trace(series, &x, &eps)?;
            write_trace(path, &trace)?;
            trace.fixpoint
        }
        None => match series {
            Series::Cos => fixtrig::cos_fixpoint(&x, &eps)?,
            Series::Sin => fixtrig::sin_fixpoint(&x, &eps)?,
        },
    };
    let value = res.value.to_rat();
    let pairs = [
        ("value", value.to_string()),
        ("decimal", value.to_decimal(JSON_DECIMAL_DIGITS)),
        ("n", res.n.to_string()),
        ("bound", res.a_priori_bound.to_string()),
        ("observed_error", res.observed_error().to_decimal(JSON_DECIMAL_DIGITS)),
    ];
    Ok(render_pairs(ctx.output, &pairs, || to_json(&res.to_json())))
}

fn write_trace(path: &Path, trace: &PairedTrace) -> Result<(), Failure> {
    let body = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        to_json(&json!({ "records": trace.records, "final_delta": trace.final_delta }))
    } else {
        fixtrig::traces_to_csv(&trace.records)
    };
    fs::write(path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn iteration_cap(ctx: &Ctx, flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    if let Ok(s) = std::env::var(ITER_CAP_ENV) {
        return s.trim().parse().map_err(|e| Failure::Usage(format!("invalid {ITER_CAP_ENV} {s:?}: {e}")));
    }
    Ok(ctx.parsed(None, "iteration-cap")?.unwrap_or(floatrepro::DEFAULT_ITERATION_CAP))
}

fn scan(ctx: &Ctx, a: &ScanArgs) -> Run {
    let d = floatrepro::DEFAULT_SCAN;
    let get = |flag: &Option<String>, key: &str, default: f32| match ctx.value(flag, key) {
        Some(s) => parse_f32(&s, key),
        None => Ok(default),
    };
    let params = ScanParams {
        min: get(&a.min, "min", d.min)?,
        max: get(&a.max, "max", d.max)?,
        step: get(&a.step, "step", d.step)?,
        eps: get(&a.eps, "eps", d.eps)?,
    };
    let rows = floatrepro::scan_table(params, iteration_cap(ctx, a.iteration_cap)?)?;
    Ok(match ctx.output {
        Output::Table => floatrepro::rows_to_printf(&rows),
        Output::Csv => floatrepro::rows_to_csv(&rows),
        Output::Json => {
            let rows: Vec<_> = rows.iter().map(|&ScanRow { x, value }| json!({ "x": x, "value": value })).collect();
            to_json(&rows)
        }
    })
}

fn golden(ctx: &Ctx, a: &GoldenArgs) -> Run {
    let x = ctx.rat_or(&a.x, "x", "50")?;
    let eps = ctx.rat_or(&a.eps, "eps", "1/100000000")?;
    let digits = ctx.parsed(a.digits, "digits")?.unwrap_or(10);
    let value = oracle::cos_unbounded(&x, &eps)?;
    let decimal = value.to_decimal(digits);
    Ok(match ctx.output {
        Output::Table => format!("{decimal}\n"),
        output => render_pairs(output, &[("value", value.to_string()), ("decimal", decimal.clone())], || {
            to_json(&json!({ "value": value, "decimal": decimal }))
        }),
    })
}

fn verify_suite(ctx: &Ctx, a: &VerifyArgs) -> Run {
    let suite = ctx.parsed(a.suite, "suite")?.ok_or_else(|| Failure::Usage("missing --suite".into()))?;
    let options = VerifyOptions {
        seed: ctx.parsed(a.seed, "seed")?.unwrap_or(verify::DEFAULT_SEED),
        samples: ctx.parsed(a.samples, "samples")?,
    };
    let report = verify::run_suite(suite, &options);
    let out = render_report(ctx.output, &report);
    if report.passed() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Verification(format!(
            "{} violations in suite {} (seed {})",
            report.violations(),
            report.suite,
            report.seed
        )))
    }
}

fn render_report(output: Output, report: &SuiteReport) -> String {
    match output {
        Output::Json => to_json(report),
        Output::Csv => {
            let mut s = String::from("suite,seed,check,samples,passed,failed\n");
            for c in &report.checks {
                s += &format!("{},{},{},{},{},{}\n", report.suite, report.seed, c.name, c.samples, c.passed, c.failed);
            }
            s
        }
        Output::Table => {
            let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
            let mut s = format!("suite {} seed {}\n", report.suite, report.seed);
            s += &format!("{:<width$}  {:>7}  {:>7}  {:>7}\n", "check", "samples", "passed", "failed");
            for c in &report.checks {
                s += &format!("{:<width$}  {:>7}  {:>7}  {:>7}\n", c.name, c.samples, c.passed, c.failed);
                for f in &c.failures {
                    s += &format!("  sample {}: {}\n", f.index, f.detail);
                }
            }
            s += &format!("violations {}\n", report.violations());
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use veritrig::fixtrig::{BoundKind, Precondition};

    #[test]
    fn verification_failures_exit_3() {
        let bound = FixTrigError::BoundViolation { k: 1, bound: BoundKind::Headline, detail: String::new() };
        assert_eq!(Failure::from(bound).code(), 3);
        let inv = OracleError::InvariantViolation { algorithm: "cos_taylor", n: 1, clause: "c" };
        assert_eq!(Failure::from(inv.clone()).code(), 3);
        assert_eq!(Failure::from(FixTrigError::Oracle(inv)).code(), 3);
        let post = OracleError::PostconditionViolation { algorithm: "pi_leibniz", clause: "c" };
        assert_eq!(Failure::from(post).code(), 3);
    }

    #[test]
    fn precondition_failures_exit_2() {
        let pre = FixTrigError::PreconditionViolation(vec![Precondition::FormatMismatch]);
        assert_eq!(Failure::from(pre).code(), 2);
        assert_eq!(Failure::from(OracleError::NonPositiveEps(Rat::zero())).code(), 2);
        let cap = ReproError::IterationCapExceeded { x: 1.0, cap: 1 };
        assert_eq!(Failure::from(cap).code(), 2);
    }

    #[test]
    fn rationals_and_floats_parse() {
        assert_eq!(parse_rat("0.25", "x").unwrap(), Rat::frac(1, 4));
        assert_eq!(parse_f32("1/4", "x").unwrap(), 0.25);
        assert_eq!(parse_f32("1e-6", "eps").unwrap(), 1e-6);
        assert!(parse_rat("1/0", "x").is_err());
    }
}
