#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use llob_core::portfolio_io::AlphaSetting;
use llob_core::{
    evaluate_strategies, optimize_portfolio, CorrelationMatrix, OptimizerConfig, PortfolioDocument,
    PortfolioSpec, ResultsFile, Strategy, StrategyResult,
};

const DEFAULT_DEADLINES: [f64; 9] = [100.0, 20.0, 15.0, 10.0, 7.5, 5.0, 3.0, 2.0, 1.0];

#[derive(Parser)]
#[command(
    name = "llob",
    version,
    about = "Portfolio liquidation horizons under latent-liquidity impact"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare naive, individual and portfolio strategies.
    Optimize(OptimizeArgs),
    /// Re-run all strategies with a uniform off-diagonal correlation.
    SweepCorrelation(SweepCorrelationArgs),
    /// Re-run the portfolio optimization under a list of deadlines.
    SweepDeadline(SweepDeadlineArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Portfolio document (JSON).
    portfolio: PathBuf,

    /// Risk tolerance in standard deviations of PnL; overrides the file.
    #[arg(long)]
    gamma: Option<f64>,

    /// Number or `auto` (6 / gamma^2); overrides the file.
    #[arg(long, value_parser = parse_alpha)]
    alpha_inf: Option<AlphaSetting>,

    /// Trading days per year for the volatility conversion; overrides the file.
    #[arg(long)]
    day_count: Option<u32>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Upper bound on every horizon, in days.
    #[arg(long, default_value_t = 100.0)]
    deadline: f64,

    /// Results document (JSON). Without it only the summary is printed.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepCorrelationArgs {
    #[command(flatten)]
    model: ModelArgs,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    from: f64,

    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    to: f64,

    #[arg(long, default_value_t = 0.1)]
    step: f64,

    #[arg(long, default_value_t = 100.0)]
    deadline: f64,

    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepDeadlineArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Comma-separated deadlines in days.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DEADLINES)]
    deadlines: Vec<f64>,

    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

enum Failure {
    Invalid(anyhow::Error),
    NotConverged(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

fn parse_alpha(s: &str) -> Result<AlphaSetting, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(AlphaSetting::Auto);
    }
    s.parse::<f64>()
        .map(AlphaSetting::Value)
        .map_err(|_| format!("expected a number or `auto`, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Optimize(args) => run_optimize(args),
        Command::SweepCorrelation(args) => run_sweep_correlation(args),
        Command::SweepDeadline(args) => run_sweep_deadline(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(model: &ModelArgs) -> Result<PortfolioSpec<f64>> {
    let file = File::open(&model.portfolio)
        .with_context(|| format!("cannot open {}", model.portfolio.display()))?;
    let mut doc = PortfolioDocument::parse(BufReader::new(file))
        .map_err(|e| anyhow!("{}: {} error: {e}", model.portfolio.display(), e.kind()))?;
    if let Some(gamma) = model.gamma {
        doc.gamma = gamma;
    }
    if let Some(alpha) = model.alpha_inf {
        doc.alpha_inf = alpha;
    }
    if let Some(day_count) = model.day_count {
        doc.day_count = day_count;
    }
    doc.to_spec()
        .map_err(|e| anyhow!("{}: {} error: {e}", model.portfolio.display(), e.kind()))
}

fn config_for(deadline: f64) -> Result<OptimizerConfig<f64>> {
    if !(deadline > 0.0) || !deadline.is_finite() {
        bail!("deadline must be positive, got {deadline}");
    }
    let config = OptimizerConfig::default().with_deadline(deadline);
    config.validate()?;
    Ok(config)
}

/// Total cost per unit of gross face amount.
fn per_unit(spec: &PortfolioSpec<f64>, cost: f64) -> f64 {
    let gross: f64 = spec.bonds().iter().map(|b| b.position().abs()).sum();
    if gross > 0.0 {
        cost / gross
    } else {
        0.0
    }
}

fn certified(r: &StrategyResult<f64>) -> bool {
    r.converged || r.stationary
}

fn run_optimize(args: OptimizeArgs) -> Result<(), Failure> {
    let spec = load(&args.model)?;
    let config = config_for(args.deadline)?;
    let results = evaluate_strategies(&spec, &config).map_err(anyhow::Error::from)?;

    if let Some(path) = &args.output {
        let file = ResultsFile::new(&spec, &config, &results).map_err(anyhow::Error::from)?;
        let mut buf = Vec::new();
        file.write(&mut buf).map_err(anyhow::Error::from)?;
        write_file(path, &buf)?;
    }

    let stdout = io::stdout();
    let mut out = stdout.lock();
    print_summary(&mut out, &spec, &results).context("cannot write summary")?;

    let portfolio = &results[2];
    if !certified(portfolio) {
        return Err(Failure::NotConverged(format!(
            "portfolio optimization did not converge in {} sweeps and failed the stationarity check",
            portfolio.iterations
        )));
    }
    Ok(())
}

fn print_summary<W: Write>(
    out: &mut W,
    spec: &PortfolioSpec<f64>,
    results: &[StrategyResult<f64>],
) -> io::Result<()> {
    writeln!(
        out,
        "{:<11} {:>14} {:>14} {:>14} {:>12} {:>10} {:>10} {:>9}",
        "strategy",
        "liq_cost",
        "direct_cost",
        "penalty",
        "cost/unit",
        "t_median",
        "t_max",
        "converged"
    )?;
    for r in results {
        writeln!(
            out,
            "{:<11} {:>14.6} {:>14.6} {:>14.6} {:>12.4e} {:>10.4} {:>10.4} {:>9}",
            r.strategy.as_str(),
            r.cost.total,
            r.cost.direct,
            r.cost.penalty,
            per_unit(spec, r.cost.total),
            r.t_median,
            r.t_max,
            certified(r)
        )?;
    }
    Ok(())
}

fn correlation_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() {
        bail!("correlation bounds must be finite");
    }
    if from == to {
        return Ok(vec![from]);
    }
    if !(step > 0.0) || !step.is_finite() {
        bail!("step must be positive, got {step}");
    }
    if to < from {
        bail!("--to ({to}) is below --from ({from})");
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    // rounding keeps grid values such as 0.3 free of accumulated error
    let round = |x: f64| (x * 1e12).round() / 1e12;
    Ok((0..=n).map(|k| round(from + k as f64 * step)).collect())
}

fn run_sweep_correlation(args: SweepCorrelationArgs) -> Result<(), Failure> {
    let spec = load(&args.model)?;
    let config = config_for(args.deadline)?;
    let grid = correlation_grid(args.from, args.to, args.step)?;

    let d = spec.len();
    let lower = if d > 1 { -1.0 / (d as f64 - 1.0) } else { -1.0 };
    for &c in &grid {
        if c < lower || c > 1.0 {
            return Err(anyhow!(
                "correlation {c} is outside the feasible range [{lower}, 1] for {d} assets \
                 (uniform correlation must be at least -1/(d-1))"
            )
            .into());
        }
    }

    let runs = grid
        .par_iter()
        .map(|&c| -> Result<(f64, Vec<StrategyResult<f64>>)> {
            let swept = spec
                .clone()
                .with_correlation(CorrelationMatrix::uniform(d, c)?)?;
            Ok((c, evaluate_strategies(&swept, &config)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "correlation",
        "strategy",
        "liq_cost",
        "direct_cost",
        "penalty",
        "cost_per_unit",
        "t_median",
        "t_max",
        "converged",
    ])
    .map_err(anyhow::Error::from)?;
    let mut failed = Vec::new();
    for (c, results) in &runs {
        for r in results {
            csv.write_record([
                c.to_string(),
                r.strategy.to_string(),
                r.cost.total.to_string(),
                r.cost.direct.to_string(),
                r.cost.penalty.to_string(),
                per_unit(&spec, r.cost.total).to_string(),
                r.t_median.to_string(),
                r.t_max.to_string(),
                certified(r).to_string(),
            ])
            .map_err(anyhow::Error::from)?;
            if r.strategy == Strategy::Portfolio && !certified(r) {
                failed.push(*c);
            }
        }
    }
    emit(csv, args.output.as_deref())?;
    if !failed.is_empty() {
        return Err(Failure::NotConverged(format!(
            "portfolio optimization not certified at correlation {failed:?}"
        )));
    }
    Ok(())
}

fn run_sweep_deadline(args: SweepDeadlineArgs) -> Result<(), Failure> {
    let spec = load(&args.model)?;
    if args.deadlines.is_empty() {
        return Err(anyhow!("at least one deadline is required").into());
    }
    let configs = args
        .deadlines
        .iter()
        .map(|&d| config_for(d))
        .collect::<Result<Vec<_>>>()?;

    let runs = configs
        .par_iter()
        .map(|config| optimize_portfolio(&spec, config).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;

    let longest =
        args.deadlines.iter().enumerate().fold(
            0,
            |best, (i, &d)| if d > args.deadlines[best] { i } else { best },
        );
    let reference = runs[longest].cost.total;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "deadline",
        "liq_cost",
        "direct_cost",
        "penalty",
        "cost_per_unit",
        "t_median",
        "t_max",
        "converged",
        "premium",
    ])
    .map_err(anyhow::Error::from)?;
    let mut failed = Vec::new();
    for (deadline, r) in args.deadlines.iter().zip(&runs) {
        csv.write_record([
            deadline.to_string(),
            r.cost.total.to_string(),
            r.cost.direct.to_string(),
            r.cost.penalty.to_string(),
            per_unit(&spec, r.cost.total).to_string(),
            r.t_median.to_string(),
            r.t_max.to_string(),
            certified(r).to_string(),
            (r.cost.total - reference).to_string(),
        ])
        .map_err(anyhow::Error::from)?;
        if !certified(r) {
            failed.push(*deadline);
        }
    }
    emit(csv, args.output.as_deref())?;
    if !failed.is_empty() {
        return Err(Failure::NotConverged(format!(
            "portfolio optimization not certified at deadline {failed:?}"
        )));
    }
    Ok(())
}

fn emit(csv: csv::Writer<Vec<u8>>, path: Option<&Path>) -> Result<()> {
    let bytes = csv
        .into_inner()
        .map_err(|e| anyhow!("cannot flush CSV: {e}"))?;
    match path {
        Some(path) => write_file(path, &bytes),
        None => io::stdout()
            .lock()
            .write_all(&bytes)
            .context("cannot write to stdout"),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        assert_eq!(
            correlation_grid(0.0, 0.9, 0.1).unwrap(),
            vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
        );
        assert_eq!(correlation_grid(0.4, 0.4, 0.0).unwrap(), vec![0.4]);
        assert!(correlation_grid(0.5, 0.1, 0.1).is_err());
        assert!(correlation_grid(0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn alpha_flag() {
        assert_eq!(parse_alpha("auto").unwrap(), AlphaSetting::Auto);
        assert_eq!(parse_alpha("2.5").unwrap(), AlphaSetting::Value(2.5));
        assert!(parse_alpha("lots").is_err());
    }
}
