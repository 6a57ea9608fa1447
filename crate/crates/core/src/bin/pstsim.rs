use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pstsim::harness::{self, ConfigFile, Metric, Overrides};
use pstsim::Error;

#[derive(Parser)]
#[command(
    name = "pstsim",
    version,
    about = "Noisy perfect-state-transfer sweeps and their mitigation"
)]
struct Cli {
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Number of grid points in the time window (overrides the config).
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Worker threads for the sweep; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment or suite config.
    Run { config: PathBuf },
    /// Compare two runs (directories or series CSV files).
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        #[arg(long)]
        metric: Metric,
    },
    /// Fit and apply the mitigation model to a stored run.
    Mitigate { run: PathBuf },
}

fn execute(cli: Cli) -> pstsim::Result<serde_json::Value> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::InvalidInput("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let overrides = Overrides {
        out_dir: cli.out_dir.clone(),
        grid_points: cli.grid_points,
    };
    Ok(match cli.command {
        Command::Run { config } => match harness::load_config(&config)? {
            ConfigFile::Experiment(mut exp) => {
                exp.apply(&overrides);
                exp.validate()?;
                let out = harness::run_experiment(&exp)?;
                serde_json::json!({ "directory": out.directory, "summary": out.summary })
            }
            ConfigFile::Suite(mut suite) => {
                suite.apply(&overrides);
                let out = harness::run_suite(&suite)?;
                serde_json::json!({ "directory": out.directory, "summary": out.summary })
            }
        },
        Command::Compare {
            run_a,
            run_b,
            metric,
        } => {
            let report = harness::compare_runs(&run_a, &run_b, metric)?;
            if let Some(dir) = &cli.out_dir {
                let bytes = serde_json::to_vec_pretty(&report)?;
                harness::write_atomic(&dir.join("compare.json"), &bytes)?;
            }
            serde_json::to_value(report)?
        }
        Command::Mitigate { run } => {
            let options = harness::stored_mitigation_options(&run)?;
            let m = harness::mitigate_run(&run, &options, cli.out_dir.as_deref())?;
            serde_json::json!({ "fit": m.fit, "clamp_events": m.clamp_events, "unmitigatable": m.unmitigatable })
        }
    })
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({
                "error": { "kind": e.kind(), "field": e.field(), "message": e.to_string() }
            });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
