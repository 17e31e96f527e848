//! `minifab`: enumerate, simulate, analyze and evaluate the MiniFab
//! benchmark scenarios.

mod analyze;
mod evaluate;
mod scenarios;
mod series;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use minifab::factory::{
    enumerate_scenarios_with, BENCHMARK_HORIZON, BENCHMARK_STAGES, DEFAULT_MASTER_SEED,
};

use crate::evaluate::{EvaluateArgs, Model};
use crate::scenarios::{Filter, ScenarioFile};

#[derive(Debug, Parser)]
#[command(
    name = "minifab",
    version,
    about = "MiniFab benchmark dataset generation and analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the benchmark scenario list as TOML.
    Enumerate {
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed expanded into per-scenario seeds.
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        /// Keep scenarios matching key=value (repair, pattern, pa, pb, tw, index, id). Repeatable.
        #[arg(long = "filter", value_name = "KEY=VALUE")]
        filters: Vec<Filter>,
        #[arg(long, default_value_t = BENCHMARK_STAGES)]
        stages: u32,
        /// Simulated horizon in minutes.
        #[arg(long, default_value_t = BENCHMARK_HORIZON)]
        horizon: u32,
    },
    /// Run every scenario of a scenario file and export its dataset.
    Simulate {
        scenario_file: PathBuf,
        #[arg(long, env = "MINIFAB_OUT")]
        out: PathBuf,
        /// Scenarios simulated in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Extract features from a simulated dataset and run PCA on them.
    Analyze {
        dataset_dir: PathBuf,
        #[arg(long, env = "MINIFAB_OUT")]
        out: PathBuf,
        /// Principal components written to the loadings and scores tables.
        #[arg(long)]
        components: Option<usize>,
    },
    /// Forecast one exported series and score the predictions.
    Evaluate {
        series_file: PathBuf,
        #[arg(long, env = "MINIFAB_OUT")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Model::Ar)]
        model: Model,
        #[arg(long, default_value_t = 10)]
        lookback: usize,
        /// Fraction of the series used for training.
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        #[arg(long, default_value = analyze::SERIES_COLUMN)]
        column: String,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Enumerate {
            out,
            seed,
            filters,
            stages,
            horizon,
        } => {
            let started = Instant::now();
            let configs: Vec<_> = enumerate_scenarios_with(seed, stages, horizon)
                .into_iter()
                .filter(|c| filters.iter().all(|f| f.matches(c)))
                .collect();
            let text = ScenarioFile::new(seed, &configs).to_toml()?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    eprintln!(
                        "wrote {} scenarios to {} in {:.2?}",
                        configs.len(),
                        path.display(),
                        started.elapsed()
                    );
                }
                None => print!("{text}"),
            }
        }
        Command::Simulate {
            scenario_file,
            out,
            jobs,
        } => {
            let manifest = simulate::simulate(&scenario_file, &out, jobs)?;
            println!("{}", out.join(simulate::MANIFEST_FILE).display());
            eprintln!("scenario digest {}", manifest.scenario_digest);
        }
        Command::Analyze {
            dataset_dir,
            out,
            components,
        } => {
            let analysis = analyze::analyze(&dataset_dir, &out, components)?;
            let ratios = analysis.pca.explained_variance_ratio();
            println!(
                "{} feature rows written to {}",
                analysis.features.len(),
                out.display()
            );
            for (i, (l, r)) in analysis.pca.eigenvalues.iter().zip(ratios).enumerate() {
                println!("PC{} eigenvalue={l:.6} explained={:.2}%", i + 1, 100.0 * r);
            }
        }
        Command::Evaluate {
            series_file,
            out,
            model,
            lookback,
            split,
            column,
        } => {
            let report = evaluate::evaluate(&EvaluateArgs {
                series: &series_file,
                column: &column,
                model,
                lookback,
                split,
                out: &out,
            })?;
            println!("{}", evaluate::summary(model, &report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
