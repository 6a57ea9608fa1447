//! Run a JSON experiment or suite config and write its outputs.
//!
//! ```text
//! cargo run --release --example run_config -- configs/exp2.json /tmp/pst-out
//! ```
//!
//! With no arguments, runs the bundled noiseless experiment on a coarse
//! grid into a temporary directory and lists the files written.

use pstsim::harness::{load_config, run_experiment_in, run_suite_in, ConfigFile, Overrides};
use std::path::PathBuf;

fn main() -> pstsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/exp1.json"));
    let scratch = tempfile::tempdir().expect("temporary directory");
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| scratch.path().to_path_buf());
    let overrides = Overrides {
        out_dir: None,
        grid_points: Some(41),
    };

    let dirs = match load_config(&config)? {
        ConfigFile::Experiment(mut e) => {
            e.apply(&overrides);
            let run = run_experiment_in(&e, &out)?;
            println!("{}", serde_json::to_string_pretty(&run.summary)?);
            vec![run.directory]
        }
        ConfigFile::Suite(mut s) => {
            s.apply(&overrides);
            let suite = run_suite_in(&s, &out)?;
            suite.runs.iter().map(|r| r.directory.clone()).collect()
        }
    };
    for dir in dirs {
        let mut files: Vec<_> = std::fs::read_dir(&dir)
            .map_err(|e| pstsim::Error::Io {
                path: dir.clone(),
                source: e,
            })?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name())
            .collect();
        files.sort();
        println!("{}: {:?}", dir.display(), files);
    }
    Ok(())
}
