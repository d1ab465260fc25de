//! Command-line driver for the experiment pipeline. All heavy lifting
//! lives in the library; this binary parses arguments, loads the config
//! and dispatches to the matching stage.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rncep::pipeline::{
    load_inputs, run_experiment, stage_build_sets, stage_evaluate_file,
    stage_evaluate_point, stage_frontier, stage_parse, stage_solve, ExperimentConfig, Family,
    GridPoint, PipelineError,
};

#[derive(Parser)]
#[command(
    name = "rncep",
    about = "Robust network capacity expansion: build, solve and evaluate expansion plans from demand-scenario data",
    version
)]
struct Cli {
    /// Experiment config file (TOML).
    #[arg(long, global = true, default_value = "rncep.toml")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: parse, build sets, solve the grid, evaluate,
    /// and write the frontier CSV.
    Run,
    /// Ingest the network and scenarios; write the canonical scenario
    /// matrix and the train/eval split.
    Parse,
    /// Build the per-family uncertainty sets from the training split.
    BuildSets,
    /// Solve one grid point and dump the investment as JSON.
    Solve {
        /// Model family: discrete | stochastic | aarc (alias: polyhedral).
        #[arg(long)]
        model: String,
        /// Outsourcing penalty.
        #[arg(long)]
        sigma: f64,
        /// Blend factor (discrete family).
        #[arg(long)]
        lambda: Option<f64>,
        /// Hyperplane count (aarc family).
        #[arg(long)]
        hyperplanes: Option<usize>,
    },
    /// Evaluate an investment file (solution JSON or one value per line)
    /// on the evaluation split.
    Evaluate {
        #[arg(long)]
        investment: PathBuf,
    },
    /// Merge report JSON files into a frontier CSV (stdout, or --out).
    Frontier {
        /// Report files; defaults to every file under `<out>/reports/`.
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), PipelineError> {
    let cfg = ExperimentConfig::load(&cli.config)?;
    match cli.command {
        Command::Run => {
            let manifest = run_experiment(&cfg)?;
            println!(
                "solved {} grid points; frontier at {}",
                manifest.points.len(),
                cfg.output_dir.join("frontier.csv").display()
            );
        }
        Command::Parse => {
            let summary = stage_parse(&cfg)?;
            println!(
                "{} nodes, {} arcs; {} scenarios x {} commodities -> {} train / {} eval",
                summary.nodes,
                summary.arcs,
                summary.scenarios,
                summary.commodities,
                summary.train_scenarios,
                summary.eval_scenarios
            );
        }
        Command::BuildSets => {
            for fam in stage_build_sets(&cfg)? {
                println!(
                    "{}: {} commodities, coverage {:.4}",
                    fam.family.tag(),
                    fam.commodities,
                    fam.coverage
                );
            }
        }
        Command::Solve { model, sigma, lambda, hyperplanes } => {
            let family = Family::parse(&model)?;
            let point = match family {
                Family::Discrete => GridPoint {
                    family,
                    sigma,
                    lambda: Some(lambda.ok_or_else(|| {
                        PipelineError::Config("--lambda is required for the discrete family".into())
                    })?),
                    hyperplanes: None,
                },
                Family::Stochastic => GridPoint { family, sigma, lambda: None, hyperplanes: None },
                Family::Aarc => GridPoint {
                    family,
                    sigma,
                    lambda: None,
                    hyperplanes: Some(hyperplanes.ok_or_else(|| {
                        PipelineError::Config(
                            "--hyperplanes is required for the aarc family".into(),
                        )
                    })?),
                },
            };
            let (net, _) = load_inputs(&cfg)?;
            let dump = stage_solve(&cfg, &net, &point)?;
            println!(
                "{}: objective {}, investment cost {} ({} iterations)",
                point.tag(),
                dump.objective,
                dump.invest_cost,
                dump.iterations
            );
            let report = stage_evaluate_point(&cfg, &net, &point, &dump)?;
            println!(
                "out-of-sample: mean {} max {} cvar10 {} std {}",
                report.metrics.mean, report.metrics.max, report.metrics.cvar, report.metrics.std
            );
        }
        Command::Evaluate { investment } => {
            let report = stage_evaluate_file(&cfg, &investment)?;
            println!(
                "invest cost {}: mean {} max {} cvar10 {} std {}",
                report.invest_cost,
                report.metrics.mean,
                report.metrics.max,
                report.metrics.cvar,
                report.metrics.std
            );
        }
        Command::Frontier { mut reports, out } => {
            if reports.is_empty() {
                let dir = cfg.output_dir.join("reports");
                if dir.is_dir() {
                    for entry in std::fs::read_dir(&dir)
                        .map_err(|e| PipelineError::Io { path: dir.display().to_string(), source: e })?
                    {
                        let entry = entry.map_err(|e| PipelineError::Io {
                            path: dir.display().to_string(),
                            source: e,
                        })?;
                        if entry.path().extension().is_some_and(|x| x == "json") {
                            reports.push(entry.path());
                        }
                    }
                    reports.sort();
                }
            }
            let csv = stage_frontier(&reports)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &csv).map_err(|e| PipelineError::Io {
                        path: path.display().to_string(),
                        source: e,
                    })?;
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}
