use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lowmach_core::bounded::{
    assumption_a_check, neumann_modes, write_mode_catalog_csv, AssumptionA, CatalogRow, Geometry, GeometryKind,
};
use lowmach_lab::config::{ExperimentConfig, Scenario};
use lowmach_lab::scenarios::run_scenario;
use lowmach_lab::{LabError, Result};

/// Low Mach number laboratory: ε-sweeps, damping studies and self-checks.
#[derive(Debug, Parser)]
#[command(name = "lowmach", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random initial data (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for concurrent runs (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Fail on advisory checks as well as declared targets.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configuration as written.
    Run { config: PathBuf },
    /// Run an ε-sweep of at least three values and fit rates.
    Sweep { config: PathBuf },
    /// Print the Neumann mode catalog and the Assumption (A) scan.
    Modes {
        /// interval, channel or rectangle.
        geometry: String,
        #[arg(long, default_value_t = 10)]
        cutoff: usize,
        /// Shear viscosity used for the predicted damping column.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
    },
    /// Run the property suite.
    Check,
}

const DEFAULT_OUT: &str = "lowmach-out";

fn experiment(cli: &Cli, path: &Path, sweep: bool) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if sweep && cfg.scenario != Scenario::PropertySuite && cfg.eps_list.len() < 3 {
        return Err(LabError::config(format!("a sweep needs at least 3 eps values, got {}", cfg.eps_list.len())));
    }
    let out = cli.out.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let report = run_scenario(&cfg, cli.workers)?;
    report.write(&out)?;
    print!("{}", report.text());
    Ok(report.passed(cli.strict))
}

fn modes(cli: &Cli, geometry: &str, cutoff: usize, mu: f64) -> Result<bool> {
    let kind = GeometryKind::parse(geometry).map_err(|e| LabError::config(e.to_string()))?;
    if cutoff == 0 {
        return Err(LabError::config("--cutoff must be at least 1"));
    }
    let g = match kind {
        GeometryKind::Interval => Geometry::interval(32),
        GeometryKind::Channel => Geometry::channel(32, (2 * cutoff + 2).max(8)),
        GeometryKind::Rectangle => Geometry::rectangle(32),
    };
    let modes = neumann_modes(&g, cutoff)?;
    let rows: Vec<CatalogRow> = modes.iter().map(|m| CatalogRow::from_mode(m, mu)).collect();
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    std::fs::create_dir_all(&out)?;
    let path = out.join(format!("modes_{}.csv", kind.name()));
    write_mode_catalog_csv(&rows, &path)?;
    for r in &rows {
        println!(
            "{:>3} {:<12} lambda {:.6} class {} Re(i lambda_1) {:.6e}",
            r.index, r.label, r.lambda, r.class, r.re_lambda1
        );
    }
    let report = assumption_a_check(&g, &modes);
    let show = |a: &AssumptionA| match a {
        AssumptionA::Satisfied => "satisfied".to_string(),
        AssumptionA::Violated(v) => format!("violated by {}", v.join(" ")),
    };
    println!("assumption (A), constant trace per boundary component: {}", show(&report.per_component));
    println!("assumption (A), constant trace on the whole boundary: {}", show(&report.global));
    println!("catalog written to {}", path.display());
    Ok(!cli.strict || report.per_component.is_satisfied())
}

fn check(cli: &Cli) -> Result<bool> {
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let report = run_scenario(&ExperimentConfig::new(Scenario::PropertySuite), cli.workers)?;
    report.write(&out)?;
    print!("{}", report.text());
    Ok(report.passed(cli.strict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config } => experiment(&cli, config, false),
        Command::Sweep { config } => experiment(&cli, config, true),
        Command::Modes { geometry, cutoff, mu } => modes(&cli, geometry, *cutoff, *mu),
        Command::Check => check(&cli),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lowmach: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
