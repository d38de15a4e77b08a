mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

use diolab::certify::{Scenario, ScenarioParams, DEFAULT_RATIO_CEILING};
use diolab::exponents::DEFAULT_WINDOW_FRACTION;
use diolab::real_field::parse_rational;

use commands::Outcome;
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "diolab", version, about = "Minimal points, exponent estimates and certified bounds for (ξ, ξ², …, ξⁿ)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    #[serde(skip)]
    format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Precision budget in bits for evaluating ξ.
    #[arg(long = "precision-bits")]
    precision_bits: Option<u64>,
    /// Directory for staircase caches; overrides DIOLAB_CACHE_DIR.
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Staircase of minimal points.
    MinimalPoints(PointsArgs),
    /// Estimates of λ̂ and λ from the staircase, or of ω_k by height search.
    Estimate(EstimateArgs),
    /// Table of upper bounds for λ̂ₙ.
    Bounds(BoundsArgs),
    /// Run one certification scenario.
    Verify(VerifyArgs),
    /// Run the acceptance battery.
    Report(ReportArgs),
}

#[derive(Args, Debug, Serialize)]
struct PointsArgs {
    #[arg(long)]
    xi: String,
    #[arg(long)]
    n: usize,
    #[arg(long = "x0-max")]
    x0_max: u64,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct EstimateArgs {
    #[arg(long)]
    xi: String,
    /// Dimension for λ̂ and λ (needs --x0-max).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "x0-max")]
    x0_max: Option<u64>,
    /// Trailing window fraction for λ̂ and λ.
    #[arg(long, default_value_t = DEFAULT_WINDOW_FRACTION)]
    window: f64,
    /// Polynomial degree for ω_k.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated heights for ω_k (default: powers of two up to 1024).
    #[arg(long, value_delimiter = ',')]
    heights: Option<Vec<u64>>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    #[arg(long)]
    n: u32,
    /// Degree of the assumed ω_k.
    #[arg(long)]
    k: Option<u32>,
    /// Assumed value of ω_k, a rational such as 7/3 or 1.25.
    #[arg(long)]
    omega: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// wedge, threshold, rank, minkowski, minima, growth or nonvanishing.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    xi: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "x0-max")]
    x0_max: Option<u64>,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Scale of the convex body for the successive minima, a rational.
    #[arg(long = "Y", default_value = "10")]
    y: String,
    #[arg(long, default_value_t = DEFAULT_WINDOW_FRACTION)]
    window: f64,
    /// Ceiling for realized ratios in the empirical checks.
    #[arg(long, default_value_t = DEFAULT_RATIO_CEILING)]
    ceiling: f64,
    /// Growth exponent for growth and nonvanishing (default: estimated λ).
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    /// Comma-separated criteria to run (default: all).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<u32>>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

fn meta(command: &str, config: Value, format: Format, xi: Option<&str>, extra: Vec<(&'static str, Value)>) -> Value {
    let mut config = config;
    if let Value::Object(m) = &mut config {
        m.insert(
            "format".into(),
            json!(match format {
                Format::Json => "json",
                Format::Csv => "csv",
            }),
        );
    }
    let mut m = Map::new();
    m.insert("tool".into(), json!("diolab"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("xi".into(), xi.map_or(Value::Null, |s| json!(s)));
    m.insert("config".into(), config);
    for (k, v) in extra {
        m.insert(k.into(), v);
    }
    Value::Object(m)
}

fn setup_threads(n: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = n {
        if n == 0 {
            return Err(diolab::Error::InvalidArgument("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn finish(
    command: &str,
    config: &impl Serialize,
    common: &Common,
    xi: Option<&str>,
    outcome: Outcome,
) -> anyhow::Result<bool> {
    let config = serde_json::to_value(config)?;
    let meta = meta(command, config, common.format, xi, outcome.extra_meta);
    let bytes = output::render(&outcome.table, meta, common.format)?;
    output::emit(&bytes, common.out.as_deref())?;
    Ok(outcome.failed)
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    diolab::Error::InvalidArgument(msg.into()).into()
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::MinimalPoints(a) => {
            setup_threads(a.common.threads)?;
            let xi = commands::xi_from(&a.xi, a.common.precision_bits)?;
            let cache = commands::cache_dir(a.common.cache_dir.clone());
            let seq = commands::sequence(&xi, a.n, a.x0_max, cache.as_deref())?;
            let out = commands::minimal_points(&seq)?;
            finish("minimal-points", &a, &a.common, Some(&a.xi), out)
        }
        Command::Estimate(a) => {
            setup_threads(a.common.threads)?;
            let xi = commands::xi_from(&a.xi, a.common.precision_bits)?;
            let out = match (a.k, a.n) {
                (Some(k), None) => commands::estimate_omegas(&xi, k, a.heights.as_deref())?,
                (None, Some(n)) => {
                    let x0 = a.x0_max.ok_or_else(|| usage("--n needs --x0-max"))?;
                    let cache = commands::cache_dir(a.common.cache_dir.clone());
                    let seq = commands::sequence(&xi, n, x0, cache.as_deref())?;
                    commands::estimate_lambdas(&seq, a.window)?
                }
                _ => return Err(usage("give exactly one of --n (with --x0-max) or --k")),
            };
            finish("estimate", &a, &a.common, Some(&a.xi), out)
        }
        Command::Bounds(a) => {
            setup_threads(a.common.threads)?;
            let out = commands::bounds(a.n, a.k, a.omega.as_deref())?;
            finish("bounds", &a, &a.common, None, out)
        }
        Command::Verify(a) => {
            setup_threads(a.common.threads)?;
            let scenario: Scenario = a.scenario.parse()?;
            let xi = commands::xi_from(&a.xi, a.common.precision_bits)?;
            let y: BigRational = parse_rational(&a.y)?;
            let params = ScenarioParams {
                m: a.m,
                k: a.k,
                y,
                window: a.window,
                ratio_ceiling: a.ceiling,
                lambda: a.lambda,
            };
            let cache = commands::cache_dir(a.common.cache_dir.clone());
            let out = commands::verify(commands::VerifyInput {
                scenario,
                xi: &xi,
                n: a.n,
                x0_max: a.x0_max,
                cache: cache.as_deref(),
                params,
            })?;
            finish("verify", &a, &a.common, Some(&a.xi), out)
        }
        Command::Report(a) => {
            setup_threads(a.common.threads)?;
            let ids = a.criteria.clone().unwrap_or_else(|| (1..=6).collect());
            let out = commands::report(&ids)?;
            finish("report", &a, &a.common, None, out)
        }
    }
}

/// 1 for bad input, 2 for computation failures.
fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<diolab::Error>() {
        Some(
            diolab::Error::Parse(_)
            | diolab::Error::InvalidArgument(_)
            | diolab::Error::RationalXi(_)
            | diolab::Error::NonPositiveXi
            | diolab::Error::NoRootInInterval
            | diolab::Error::MultipleRoots(_)
            | diolab::Error::NotSquarefree
            | diolab::Error::CacheMismatch(_),
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
