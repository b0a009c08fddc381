//! Command-line front end for the relay-network rate library.
//!
//! Subcommands: `rate` (per-strategy rates as JSON), `sweep` (CSV over a
//! parameter grid), `probe` (asymptotic regime verdicts), `verify` (seeded
//! randomized invariant suites), and `threshold` (relay power needed to
//! reach a fraction of the cut-set bound).
//!
//! Exit codes: 0 success; 1 validation errors (bad flags, bad config, bad
//! parameters); 2 success with numerical non-convergence warnings; 3
//! verification failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use relaymesh::cf::ConstraintMode;
use relaymesh::config::NetworkConfig;
use relaymesh::experiment::{
    asymptotic_probe, evaluate_strategy, power_threshold, run_sweep, write_gnuplot_files,
    write_sweep_csv, AsymptoticVerdict, CaseId, ProbeThresholds, SweepSpec,
};
use relaymesh::rates::{RateResult, StrategyKind};
use relaymesh::{verify, PathLossModel, RelayNetwork};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERIC_WARNINGS: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

// ---------------------------------------------------------------------------
// Flags
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "relaymesh",
    version,
    about = "Achievable rates and cut-set bounds for Gaussian multiple-relay networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-strategy rates for a configured network, as JSON.
    Rate(RateArgs),
    /// Run the sweep described by the config's `sweep` block, writing CSV.
    Sweep(SweepArgs),
    /// Probe asymptotic regimes and classify the gap trajectories.
    Probe(ProbeArgs),
    /// Run the seeded randomized invariant suites.
    Verify(VerifyArgs),
    /// Find the relay power at which compress-and-forward reaches a target
    /// fraction of the cut-set bound.
    Threshold(ThresholdArgs),
}

/// Logarithm base for reported rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogBase {
    /// bits per channel use
    #[value(name = "2")]
    Two,
    /// nats per channel use
    #[value(name = "e")]
    E,
}

impl LogBase {
    /// Multiplier taking bits to the requested unit.
    fn factor(self) -> f64 {
        match self {
            LogBase::Two => 1.0,
            LogBase::E => std::f64::consts::LN_2,
        }
    }

    fn unit(self) -> &'static str {
        match self {
            LogBase::Two => "bits",
            LogBase::E => "nats",
        }
    }
}

#[derive(Args)]
struct RateArgs {
    /// Network config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Comma-separated strategies: cs, df, cf, cf_t2, mh, cinf.
    /// Default: all six for three-node networks, cf_t2 and cinf otherwise.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    strategies: Option<Vec<String>>,
    /// Routing quantifier for the general compress-and-forward optimizer.
    #[arg(long, default_value = "forall", value_name = "forall|exists")]
    mode: String,
    /// Report rates in this logarithm base.
    #[arg(long, value_enum, default_value = "2")]
    log_base: LogBase,
    /// Read config powers and noises as dB and echo power-like outputs in
    /// dB. Gains, grids, and geometry stay linear.
    #[arg(long)]
    db: bool,
    /// Relay-count cap for the constraint enumeration.
    #[arg(long, default_value_t = relaymesh::DEFAULT_RELAY_CAP, value_name = "N")]
    relay_cap: usize,
    /// Output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Network config (JSON) with a `sweep` block.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// CSV output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override the config's strategy list.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    strategies: Option<Vec<String>>,
    /// Override the config's constraint mode.
    #[arg(long, value_name = "forall|exists")]
    mode: Option<String>,
    /// Read config powers and noises as dB.
    #[arg(long)]
    db: bool,
    /// Also write two-column gnuplot files into this directory.
    #[arg(long, value_name = "DIR")]
    plot_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    /// Case id: 1a, 1b, 1c, 2..6 (simplified path loss) or 7, 8 (modified).
    /// All ten cases when absent.
    #[arg(long, value_name = "ID")]
    case: Option<String>,
    /// Path loss scale.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Path loss exponent (>= 2).
    #[arg(long, default_value_t = 2.0)]
    eta: f64,
    /// Gap below which a shrinking trajectory approaches the bound.
    #[arg(long, default_value_t = 1e-3)]
    approach: f64,
    /// Gap above which a settled trajectory is bounded away.
    #[arg(long, default_value_t = 1e-2)]
    floor: f64,
    /// Output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the deterministic draw generator.
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
    /// Randomized draws per suite.
    #[arg(long, default_value_t = verify::DEFAULT_DRAWS)]
    draws: usize,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Network config (JSON) built from collinear geometry.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Relay-destination distance to place the relay at.
    #[arg(long)]
    d23: f64,
    /// Target fraction of the cut-set bound, in (0, 1).
    #[arg(long)]
    target: f64,
    /// Read config powers and noises as dB; report the threshold in dB.
    #[arg(long)]
    db: bool,
    /// Output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Entry
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; they are not errors
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            };
        }
    };
    let outcome = match cli.command {
        Command::Rate(args) => cmd_rate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Probe(args) => cmd_probe(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Threshold(args) => cmd_threshold(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Applies `--db` input conversion: powers and noises only. Gains are
/// ratios with structural zero entries and grids/geometry are not powers,
/// so they stay linear by design.
fn convert_config_db(config: &mut NetworkConfig) {
    for p in &mut config.powers {
        *p = db_to_linear(*p);
    }
    for n in &mut config.noises {
        *n = db_to_linear(*n);
    }
}

fn load_config(path: &PathBuf, db: bool) -> Result<NetworkConfig> {
    let mut config = NetworkConfig::load(path)?;
    if db {
        convert_config_db(&mut config);
    }
    Ok(config)
}

fn parse_strategies(tags: &[String]) -> Result<Vec<StrategyKind>> {
    let parsed = tags
        .iter()
        .map(|t| StrategyKind::parse(t))
        .collect::<relaymesh::Result<Vec<_>>>()?;
    // canonical order, deduplicated
    Ok(StrategyKind::all()
        .into_iter()
        .filter(|s| parsed.contains(s))
        .collect())
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

/// Serializes a rate result, scaling the rate into the requested unit and
/// rendering quantization noises (possibly infinite) explicitly.
fn result_to_json(result: &RateResult, log_base: LogBase, db: bool) -> serde_json::Value {
    let mut scaled = result.clone();
    scaled.rate *= log_base.factor();
    let q = scaled.q.take();
    let mut value = serde_json::to_value(&scaled).expect("rate results serialize");
    if let Some(q) = q {
        let rendered: Vec<serde_json::Value> = q
            .iter()
            .map(|&x| {
                let y = if db { linear_to_db(x) } else { x };
                if y.is_finite() {
                    serde_json::json!(y)
                } else {
                    serde_json::json!("inf")
                }
            })
            .collect();
        value["q"] = serde_json::Value::Array(rendered);
    }
    value
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_rate(args: RateArgs) -> Result<ExitCode> {
    let mode = ConstraintMode::parse(&args.mode)?;
    let config = load_config(&args.config, args.db)?;
    let net = config.build_network()?;

    let strategies = match &args.strategies {
        Some(tags) => parse_strategies(tags)?,
        None if net.node_count() == 3 => StrategyKind::all().to_vec(),
        // only the size-generic quantities apply beyond one relay
        None => vec![
            StrategyKind::CompressForwardGeneral,
            StrategyKind::BroadcastCut,
        ],
    };

    let mut results = Vec::with_capacity(strategies.len());
    let mut converged = true;
    for strategy in strategies {
        let result = with_relay_cap(&net, strategy, mode, args.relay_cap)?;
        converged &= result.converged;
        results.push(result_to_json(&result, args.log_base, args.db));
    }

    let echo = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&x| if args.db { linear_to_db(x) } else { x })
            .collect()
    };
    let output = serde_json::json!({
        "units": if args.db { "db" } else { "linear" },
        "rate_unit": args.log_base.unit(),
        "node_count": net.node_count(),
        "powers": echo(net.powers()),
        "noises": echo(net.noises()),
        "results": results,
    });
    write_output(&args.out, &format!("{:#}\n", output))?;
    if !converged {
        eprintln!("warning: an iterative optimizer stopped on its sweep cap");
        return Ok(ExitCode::from(EXIT_NUMERIC_WARNINGS));
    }
    Ok(ExitCode::SUCCESS)
}

/// `evaluate_strategy`, but honoring a custom enumeration cap for the
/// general compress-and-forward optimizer.
fn with_relay_cap(
    net: &RelayNetwork,
    strategy: StrategyKind,
    mode: ConstraintMode,
    cap: usize,
) -> Result<RateResult> {
    if strategy == StrategyKind::CompressForwardGeneral {
        Ok(relaymesh::cf::optimize_cf_q(net, mode, cap)?)
    } else {
        Ok(evaluate_strategy(net, strategy, mode)?)
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let config = load_config(&args.config, args.db)?;
    let Some(mut spec): Option<SweepSpec> = config.build_sweep()? else {
        bail!(
            "{} has no `sweep` block; nothing to run",
            args.config.display()
        );
    };
    if let Some(tags) = &args.strategies {
        spec.strategies = parse_strategies(tags)?;
    }
    if let Some(mode) = &args.mode {
        spec.mode = ConstraintMode::parse(mode)?;
    }

    let rows = run_sweep(&spec)?;
    let converged = rows
        .iter()
        .flat_map(|r| &r.entries)
        .all(|e| e.result.converged);

    let mut csv = Vec::new();
    write_sweep_csv(&spec, &rows, &mut csv)?;
    write_output(&args.out, std::str::from_utf8(&csv).expect("CSV is UTF-8"))?;

    if let Some(dir) = &args.plot_dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))?;
        write_gnuplot_files(&spec, &rows, dir)?;
    }

    if !converged {
        eprintln!("warning: an iterative optimizer stopped on its sweep cap");
        return Ok(ExitCode::from(EXIT_NUMERIC_WARNINGS));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_probe(args: ProbeArgs) -> Result<ExitCode> {
    let thresholds = ProbeThresholds {
        approach: args.approach,
        floor: args.floor,
        ..ProbeThresholds::default()
    };
    let cases: Vec<CaseId> = match &args.case {
        Some(id) => vec![CaseId::parse(id)?],
        None => CaseId::ALL.to_vec(),
    };

    let mut verdicts: Vec<AsymptoticVerdict> = Vec::new();
    for case in cases {
        let model = match case.required_model() {
            "spl" => PathLossModel::Spl {
                kappa: args.kappa,
                eta: args.eta,
            },
            _ => PathLossModel::Mpl {
                kappa: args.kappa,
                eta: args.eta,
            },
        };
        verdicts.extend(asymptotic_probe(case, &model, &thresholds)?);
    }

    let output = serde_json::to_string_pretty(&verdicts).expect("verdicts serialize");
    write_output(&args.out, &format!("{output}\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    if args.draws == 0 {
        bail!("--draws must be at least 1");
    }
    println!(
        "# generator: {}  seed: {}  draws: {}",
        verify::GENERATOR_NAME,
        args.seed,
        args.draws
    );
    let reports = verify::run_all(args.seed, args.draws)?;
    let mut failed = 0usize;
    for report in &reports {
        if report.passed() {
            println!(
                "suite {:<20} PASS  ({} draws, worst margin {:+.3e})",
                report.name, report.draws, report.worst
            );
        } else {
            failed += 1;
            println!(
                "suite {:<20} FAIL  ({}/{} draws failed, worst margin {:+.3e})",
                report.name, report.failures, report.draws, report.worst
            );
            if let Some(detail) = &report.first_failure {
                println!("  first failure: {detail}");
            }
        }
    }
    println!("{}/{} suites passed", reports.len() - failed, reports.len());
    if failed > 0 {
        return Ok(ExitCode::from(EXIT_VERIFY_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_threshold(args: ThresholdArgs) -> Result<ExitCode> {
    let config = load_config(&args.config, args.db)?;
    let net = config.build_network()?;
    let p2 = power_threshold(&net, args.d23, args.target)?;
    let output = serde_json::json!({
        "units": if args.db { "db" } else { "linear" },
        "target": args.target,
        "d23": args.d23,
        "p2": if args.db { linear_to_db(p2) } else { p2 },
    });
    write_output(&args.out, &format!("{:#}\n", output))?;
    Ok(ExitCode::SUCCESS)
}
