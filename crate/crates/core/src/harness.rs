//! Config-driven experiment runner and run-directory tooling.
//!
//! A run directory holds:
//!
//! | file | contents |
//! |---|---|
//! | `config.json` | the resolved experiment config |
//! | `series.csv` | `n_steps,t_model,fidelity` for every depth and grid time |
//! | `sweep.csv` | `n_steps,hitting_time,peak_fidelity` per depth |
//! | `summary.json` | headline numbers |
//! | `fit.json` | fitted mitigation parameters (mitigation enabled) |
//! | `rescaled_series.csv`, `mitigated_series.csv`, `mitigated_sweep.csv` | corrected data (mitigation enabled) |
//!
//! Every file is written to a temporary sibling first and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    delta_fidelity, delta_hitting, dynamics_error, dynamics_error_resampled, uniform_grid,
    SweepResult, TransferRecord,
};
use crate::channels::ChannelSpec;
use crate::error::{Error, Result};
use crate::gates::GateDurations;
use crate::mitigation::{
    mitigate, C1Intercept, FitResult, FitWindow, Mitigated, MitigationOptions,
};
use crate::simulator::{
    ChainSpec, Crosstalk, CrosstalkMode, Decoherence, DecoherencePlacement, NoiseModel,
    TransferSetup, DEFAULT_ANGLE_SCALE,
};

pub const SERIES_FILE: &str = "series.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const CONFIG_FILE: &str = "config.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FIT_FILE: &str = "fit.json";
pub const RESCALED_SERIES_FILE: &str = "rescaled_series.csv";
pub const MITIGATED_SERIES_FILE: &str = "mitigated_series.csv";
pub const MITIGATED_SWEEP_FILE: &str = "mitigated_sweep.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n_qubits: usize,
    /// Explicit couplings `J_1..J_{n-1}` in model-frequency units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
    /// Scale `C` of the perfect-transfer couplings `C·√(i(n-i))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeWindow {
    pub t_min_model: f64,
    pub t_max_model: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthRange {
    pub n_min: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoherenceConfig {
    pub t1_us: f64,
    pub t2_us: f64,
    #[serde(default)]
    pub placement: DecoherencePlacement,
}

/// Exactly one of the two fields must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkConfig {
    /// Spread over each Trotter step so that one step accumulates `ζ·Δt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_model: Option<f64>,
    /// Accumulates `ζ·τ` over every layer of wall-clock duration `τ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_rad_per_us: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationsConfig {
    pub l1q_ns: f64,
    pub l2q_ns: f64,
}

impl Default for DurationsConfig {
    fn default() -> Self {
        Self {
            l1q_ns: 35.5,
            l2q_ns: 340.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_error_1q: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_error_2q: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoherence: Option<DecoherenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosstalk: Option<CrosstalkConfig>,
    #[serde(default)]
    pub durations: DurationsConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub window: FitWindow,
    #[serde(default)]
    pub c1_intercept: C1Intercept,
}

impl MitigationConfig {
    pub fn options(&self) -> MitigationOptions {
        MitigationOptions {
            window: self.window,
            c1_intercept: self.c1_intercept,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: None,
            formats: default_formats(),
        }
    }
}

fn default_angle_scale() -> f64 {
    DEFAULT_ANGLE_SCALE
}

/// One transfer experiment: a depth sweep of fidelity series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub label: String,
    pub chain: ChainConfig,
    pub time_window: TimeWindow,
    pub depths: DepthRange,
    /// Block angle is `angle_scale · J · Δt`.
    #[serde(default = "default_angle_scale")]
    pub angle_scale: f64,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub mitigation: MitigationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    DeltaFidelity,
    DeltaHitting,
    DynamicsError,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta_fidelity" => Ok(Metric::DeltaFidelity),
            "delta_hitting" => Ok(Metric::DeltaHitting),
            "dynamics_error" => Ok(Metric::DynamicsError),
            other => Err(Error::input(format!(
                "unknown metric `{other}` (expected delta_fidelity, delta_hitting or dynamics_error)"
            ))),
        }
    }
}

/// A comparison between two runs of a suite, referenced by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub a: String,
    pub b: String,
    pub metric: Metric,
}

/// Several experiments sharing an output directory, plus comparisons between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    pub runs: Vec<ExperimentConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<ComparisonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_directory: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigFile {
    Experiment(ExperimentConfig),
    Suite(SuiteConfig),
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub grid_points: Option<usize>,
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn at(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn relabel(field: String, err: Error) -> Error {
    match err {
        Error::InvalidInput(m) | Error::Contract(m) => Error::Config { field, message: m },
        other => other,
    }
}

impl ExperimentConfig {
    fn check(&self, prefix: &str) -> Result<()> {
        if self.label.is_empty() || self.label.contains(['/', '\\']) || self.label.starts_with('.')
        {
            return Err(Error::config(
                at(prefix, "label"),
                "must be a non-empty plain file name",
            ));
        }
        self.chain_spec_at(prefix)?;
        let w = &self.time_window;
        if !(w.t_min_model.is_finite() && w.t_max_model.is_finite() && w.t_min_model >= 0.0) {
            return Err(Error::config(
                at(prefix, "time_window.t_min_model"),
                "times must be finite and non-negative",
            ));
        }
        if !(w.t_max_model > w.t_min_model) {
            return Err(Error::config(
                at(prefix, "time_window.t_max_model"),
                "must exceed t_min_model",
            ));
        }
        if w.grid_points < 2 {
            return Err(Error::config(
                at(prefix, "time_window.grid_points"),
                "at least two points are required",
            ));
        }
        if self.depths.n_min < 1 {
            return Err(Error::config(
                at(prefix, "depths.n_min"),
                "must be at least 1",
            ));
        }
        if self.depths.n_max < self.depths.n_min {
            return Err(Error::config(
                at(prefix, "depths.n_max"),
                "must be at least n_min",
            ));
        }
        positive(&at(prefix, "angle_scale"), self.angle_scale)?;
        self.noise_model_at(prefix)?;
        let win = &self.mitigation.window;
        if self.mitigation.enabled {
            if win.n_max.is_some_and(|m| m < win.n_min) {
                return Err(Error::config(
                    at(prefix, "mitigation.window.n_max"),
                    "must be at least n_min",
                ));
            }
            let usable = (self.depths.n_min..=self.depths.n_max)
                .filter(|n| win.contains(*n))
                .count();
            if usable < 3 {
                return Err(Error::config(
                    at(prefix, "mitigation.window"),
                    format!("only {usable} swept depth(s) fall inside the fit window; at least 3 are needed"),
                ));
            }
        }
        if self.output.formats.is_empty() {
            return Err(Error::config(
                at(prefix, "output.formats"),
                "at least one format is required",
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check("")
    }

    fn chain_spec_at(&self, prefix: &str) -> Result<ChainSpec> {
        let c = &self.chain;
        let field = |f: &str| at(prefix, &format!("chain.{f}"));
        if c.n_qubits < 2 || c.n_qubits > 8 {
            return Err(Error::config(
                field("n_qubits"),
                format!("must be between 2 and 8, got {}", c.n_qubits),
            ));
        }
        match (&c.couplings, c.coupling_scale) {
            (Some(js), None) => {
                if js.len() != c.n_qubits - 1 {
                    return Err(Error::config(
                        field("couplings"),
                        format!("expected {} value(s), got {}", c.n_qubits - 1, js.len()),
                    ));
                }
                ChainSpec::from_couplings(js.clone()).map_err(|e| relabel(field("couplings"), e))
            }
            (None, Some(scale)) => ChainSpec::perfect_transfer(c.n_qubits, scale)
                .map_err(|e| relabel(field("coupling_scale"), e)),
            _ => Err(Error::config(
                at(prefix, "chain"),
                "set exactly one of `couplings` and `coupling_scale`",
            )),
        }
    }

    pub fn chain_spec(&self) -> Result<ChainSpec> {
        self.chain_spec_at("")
    }

    fn noise_model_at(&self, prefix: &str) -> Result<NoiseModel> {
        let n = &self.noise;
        let field = |f: &str| at(prefix, &format!("noise.{f}"));
        let durations = GateDurations::new(
            positive(&field("durations.l1q_ns"), n.durations.l1q_ns)? * 1e-9,
            positive(&field("durations.l2q_ns"), n.durations.l2q_ns)? * 1e-9,
        )?;
        for (name, spec, arity) in [
            ("gate_error_1q", &n.gate_error_1q, 1),
            ("gate_error_2q", &n.gate_error_2q, 2),
        ] {
            if let Some(spec) = spec {
                if !spec.is_gate_error() || spec.arity() != arity {
                    return Err(Error::config(
                        field(name),
                        format!("expected a {arity}-qubit gate-error channel"),
                    ));
                }
                spec.kraus().map_err(|e| relabel(field(name), e))?;
            }
        }
        let decoherence = match &n.decoherence {
            Some(d) => {
                let t1 = positive(&field("decoherence.t1_us"), d.t1_us)? * 1e-6;
                let t2 = positive(&field("decoherence.t2_us"), d.t2_us)? * 1e-6;
                crate::channels::check_coherence_times(t1, t2)
                    .map_err(|e| relabel(field("decoherence.t2_us"), e))?;
                Some(Decoherence {
                    t1,
                    t2,
                    placement: d.placement,
                })
            }
            None => None,
        };
        let crosstalk = match &n.crosstalk {
            Some(x) => {
                let (zeta, mode) = match (x.zeta_model, x.zeta_rad_per_us) {
                    (Some(z), None) => (z, CrosstalkMode::Model),
                    (None, Some(z)) => (z * 1e6, CrosstalkMode::Physical),
                    _ => {
                        return Err(Error::config(
                            field("crosstalk"),
                            "set exactly one of `zeta_model` and `zeta_rad_per_us`",
                        ))
                    }
                };
                if !zeta.is_finite() {
                    return Err(Error::config(
                        field("crosstalk"),
                        "crosstalk constant must be finite",
                    ));
                }
                Some(Crosstalk { zeta, mode })
            }
            None => None,
        };
        Ok(NoiseModel {
            gate_error_1q: n.gate_error_1q,
            gate_error_2q: n.gate_error_2q,
            crosstalk,
            decoherence,
            durations,
        })
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        self.noise_model_at("")
    }

    pub fn setup(&self) -> Result<TransferSetup> {
        self.validate()?;
        Ok(TransferSetup::new(self.chain_spec()?, self.noise_model()?)
            .with_angle_scale(self.angle_scale))
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        let w = &self.time_window;
        uniform_grid(w.t_min_model, w.t_max_model, w.grid_points)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(points) = overrides.grid_points {
            self.time_window.grid_points = points;
        }
        if let Some(dir) = &overrides.out_dir {
            self.output.directory = Some(dir.clone());
        }
    }

    fn has(&self, format: OutputFormat) -> bool {
        self.output.formats.contains(&format)
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs.is_empty() {
            return Err(Error::config("runs", "a suite needs at least one run"));
        }
        for (i, run) in self.runs.iter().enumerate() {
            run.check(&format!("runs[{i}]"))?;
            if self.runs[..i].iter().any(|r| r.label == run.label) {
                return Err(Error::config(
                    format!("runs[{i}].label"),
                    format!("duplicate label `{}`", run.label),
                ));
            }
        }
        for (i, c) in self.comparisons.iter().enumerate() {
            for (side, label) in [("a", &c.a), ("b", &c.b)] {
                if !self.runs.iter().any(|r| &r.label == label) {
                    return Err(Error::config(
                        format!("comparisons[{i}].{side}"),
                        format!("no run labelled `{label}`"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        for run in &mut self.runs {
            if let Some(points) = overrides.grid_points {
                run.time_window.grid_points = points;
            }
        }
        if let Some(dir) = &overrides.out_dir {
            self.output_directory = Some(dir.clone());
        }
    }
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            field: if path == "." {
                "(document)".into()
            } else {
                path
            },
            message: e.into_inner().to_string(),
        }
    })
}

/// Parse an experiment or suite config; suites are recognised by a `runs` key.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let value: serde_json::Value = parse_json(text)?;
    let config = if value.get("runs").is_some() {
        let suite: SuiteConfig = parse_json(text)?;
        suite.validate()?;
        ConfigFile::Suite(suite)
    } else {
        let exp: ExperimentConfig = parse_json(text)?;
        exp.validate()?;
        ConfigFile::Experiment(exp)
    };
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Write `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

#[derive(Debug, Serialize, Deserialize)]
struct SeriesRow {
    n_steps: usize,
    t_model: f64,
    fidelity: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SweepRow {
    n_steps: usize,
    hitting_time: f64,
    peak_fidelity: f64,
}

fn csv_bytes<R: Serialize>(rows: impl Iterator<Item = R>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner()
        .map_err(|e| Error::input(format!("csv buffer: {e}")))
}

/// Series CSV with header `n_steps,t_model,fidelity`.
pub fn series_csv(sweep: &SweepResult) -> Result<Vec<u8>> {
    csv_bytes(sweep.records.iter().flat_map(|r| {
        r.t_grid.iter().zip(&r.fidelity).map(|(&t, &f)| SeriesRow {
            n_steps: r.n_steps,
            t_model: t,
            fidelity: f,
        })
    }))
}

/// Sweep CSV with header `n_steps,hitting_time,peak_fidelity`.
pub fn sweep_csv(sweep: &SweepResult) -> Result<Vec<u8>> {
    csv_bytes(sweep.records.iter().map(|r| SweepRow {
        n_steps: r.n_steps,
        hitting_time: r.hitting_time,
        peak_fidelity: r.peak_fidelity,
    }))
}

/// Rebuild a sweep from a series CSV; rows of one depth must be contiguous.
pub fn read_series_csv(path: &Path, label: &str) -> Result<SweepResult> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    if headers != vec!["n_steps", "t_model", "fidelity"] {
        return Err(Error::input(format!(
            "{} does not have the series header n_steps,t_model,fidelity",
            path.display()
        )));
    }
    let mut records = Vec::new();
    let mut current: Option<(usize, Vec<f64>, Vec<f64>)> = None;
    for row in reader.deserialize::<SeriesRow>() {
        let row = row?;
        match &mut current {
            Some((n, ts, fs)) if *n == row.n_steps => {
                ts.push(row.t_model);
                fs.push(row.fidelity);
            }
            _ => {
                if let Some((n, ts, fs)) = current.take() {
                    records.push(TransferRecord::new(n, ts, fs)?);
                }
                current = Some((row.n_steps, vec![row.t_model], vec![row.fidelity]));
            }
        }
    }
    if let Some((n, ts, fs)) = current {
        records.push(TransferRecord::new(n, ts, fs)?);
    }
    if records.is_empty() {
        return Err(Error::input(format!("{} has no rows", path.display())));
    }
    SweepResult::new(label, records)
}

/// Resolve a run directory or a series CSV path to the series file.
fn series_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(SERIES_FILE)
    } else {
        path.to_path_buf()
    }
}

fn run_label(path: &Path) -> String {
    let p = if path.is_dir() {
        path
    } else {
        path.parent().unwrap_or(path)
    };
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn load_run(path: &Path) -> Result<SweepResult> {
    let label = match path.is_dir() {
        true => run_label(path),
        false => format!(
            "{}/{}",
            run_label(path),
            path.file_stem()
                .map(|s| s.to_string_lossy())
                .unwrap_or_default()
        ),
    };
    read_series_csv(&series_path(path), &label)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub n_qubits: usize,
    pub couplings: Vec<f64>,
    pub depths: [usize; 2],
    pub grid_points: usize,
    pub step_wall_clock_us: f64,
    pub deepest_peak_fidelity: f64,
    pub deepest_hitting_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamp_events: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unmitigatable: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub directory: PathBuf,
    pub sweep: SweepResult,
    pub mitigated: Option<Mitigated>,
    pub summary: RunSummary,
}

/// Simulate the configured sweep, without writing anything.
pub fn simulate_experiment(config: &ExperimentConfig) -> Result<SweepResult> {
    let setup = config.setup()?;
    setup.sweep(
        &config.label,
        &config.grid()?,
        config.depths.n_min..=config.depths.n_max,
    )
}

fn write_mitigation(dir: &Path, m: &Mitigated, csv: bool, json: bool) -> Result<()> {
    if json {
        write_json(&dir.join(FIT_FILE), &m.fit)?;
    }
    if csv {
        write_atomic(&dir.join(RESCALED_SERIES_FILE), &series_csv(&m.rescaled)?)?;
        write_atomic(&dir.join(MITIGATED_SERIES_FILE), &series_csv(&m.shifted)?)?;
        write_atomic(&dir.join(MITIGATED_SWEEP_FILE), &sweep_csv(&m.shifted)?)?;
    }
    Ok(())
}

/// Run one experiment and write its artifacts into `directory`.
pub fn run_experiment_in(config: &ExperimentConfig, directory: &Path) -> Result<RunOutcome> {
    let sweep = simulate_experiment(config)?;
    let mitigated = match config.mitigation.enabled {
        true => Some(mitigate(&sweep, &config.mitigation.options())?),
        false => None,
    };
    let setup = config.setup()?;
    let deepest = sweep.deepest().expect("depth range is non-empty");
    let summary = RunSummary {
        label: config.label.clone(),
        n_qubits: setup.chain.n_qubits(),
        couplings: setup.chain.couplings().to_vec(),
        depths: [config.depths.n_min, config.depths.n_max],
        grid_points: config.time_window.grid_points,
        step_wall_clock_us: setup.circuit(0.0, 1)?.step_wall_clock * 1e6,
        deepest_peak_fidelity: deepest.peak_fidelity,
        deepest_hitting_time: deepest.hitting_time,
        fit: mitigated.as_ref().map(|m| m.fit.clone()),
        clamp_events: mitigated.as_ref().map(|m| m.clamp_events),
        unmitigatable: mitigated.as_ref().map(|m| m.unmitigatable.clone()),
    };

    let (csv, json) = (
        config.has(OutputFormat::Csv),
        config.has(OutputFormat::Json),
    );
    fs::create_dir_all(directory).map_err(|e| Error::io(directory, e))?;
    write_json(&directory.join(CONFIG_FILE), config)?;
    if csv {
        write_atomic(&directory.join(SERIES_FILE), &series_csv(&sweep)?)?;
        write_atomic(&directory.join(SWEEP_FILE), &sweep_csv(&sweep)?)?;
    }
    if json {
        write_json(&directory.join(SUMMARY_FILE), &summary)?;
    }
    if let Some(m) = &mitigated {
        write_mitigation(directory, m, csv, json)?;
    }
    Ok(RunOutcome {
        directory: directory.to_path_buf(),
        sweep,
        mitigated,
        summary,
    })
}

/// Run one experiment into its configured directory (default `out/<label>`).
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    let dir = config
        .output
        .directory
        .clone()
        .unwrap_or_else(|| Path::new("out").join(&config.label));
    run_experiment_in(config, &dir)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub a: String,
    pub b: String,
    pub metric: Metric,
    /// The metric itself; for `dynamics_error`, the mean over depths.
    pub value: f64,
    /// Per-depth values (`dynamics_error` only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_depth: Vec<(usize, f64)>,
}

/// Compare two sweeps; `a` is the reference for `dynamics_error`.
pub fn compare_sweeps(a: &SweepResult, b: &SweepResult, metric: Metric) -> Result<CompareReport> {
    if a.depths() != b.depths() {
        return Err(Error::Comparison(format!(
            "`{}` and `{}` cover different depths",
            a.label, b.label
        )));
    }
    let mut per_depth = Vec::new();
    let value = match metric {
        Metric::DeltaFidelity => delta_fidelity(a, b)?,
        Metric::DeltaHitting => delta_hitting(a, b)?,
        Metric::DynamicsError => {
            for (ra, rb) in a.records.iter().zip(&b.records) {
                let e = if ra.t_grid == rb.t_grid {
                    dynamics_error(&ra.fidelity, &rb.fidelity)?
                } else {
                    let lo = rb.t_grid[0];
                    let hi = rb.t_grid[rb.t_grid.len() - 1];
                    if hi < ra.t_grid[0] || lo > ra.t_grid[ra.t_grid.len() - 1] {
                        return Err(Error::Comparison(format!(
                            "time windows of `{}` and `{}` do not overlap at N = {}",
                            a.label, b.label, ra.n_steps
                        )));
                    }
                    dynamics_error_resampled(&ra.t_grid, &ra.fidelity, &rb.t_grid, &rb.fidelity)?
                };
                per_depth.push((ra.n_steps, e));
            }
            per_depth.iter().map(|(_, e)| e).sum::<f64>() / per_depth.len() as f64
        }
    };
    Ok(CompareReport {
        a: a.label.clone(),
        b: b.label.clone(),
        metric,
        value,
        per_depth,
    })
}

/// Compare two run directories (or series CSV files).
pub fn compare_runs(a: &Path, b: &Path, metric: Metric) -> Result<CompareReport> {
    compare_sweeps(&load_run(a)?, &load_run(b)?, metric)
}

/// Mitigate a stored run and write the corrected data into `out_dir`
/// (default: the run directory itself).
pub fn mitigate_run(
    run: &Path,
    options: &MitigationOptions,
    out_dir: Option<&Path>,
) -> Result<Mitigated> {
    let sweep = load_run(run)?;
    let m = mitigate(&sweep, options)?;
    let dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None if run.is_dir() => run.to_path_buf(),
        None => run
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    write_mitigation(&dir, &m, true, true)?;
    Ok(m)
}

/// Mitigation options stored in a run's `config.json`, or the defaults.
pub fn stored_mitigation_options(run: &Path) -> Result<MitigationOptions> {
    let path = if run.is_dir() {
        run.join(CONFIG_FILE)
    } else {
        return Ok(MitigationOptions::default());
    };
    if !path.exists() {
        return Ok(MitigationOptions::default());
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let config: ExperimentConfig = parse_json(&text)?;
    Ok(config.mitigation.options())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub runs: Vec<RunSummary>,
    pub comparisons: Vec<CompareReport>,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub directory: PathBuf,
    pub runs: Vec<RunOutcome>,
    pub summary: SuiteSummary,
}

impl SuiteOutcome {
    pub fn run(&self, label: &str) -> Option<&RunOutcome> {
        self.runs.iter().find(|r| r.summary.label == label)
    }
}

/// Run every experiment of a suite into `<dir>/<label>` and evaluate the comparisons.
pub fn run_suite_in(suite: &SuiteConfig, directory: &Path) -> Result<SuiteOutcome> {
    suite.validate()?;
    let runs = suite
        .runs
        .iter()
        .map(|r| run_experiment_in(r, &directory.join(&r.label)))
        .collect::<Result<Vec<_>>>()?;
    let sweep = |label: &str| {
        &runs
            .iter()
            .find(|r| r.summary.label == label)
            .expect("validated label")
            .sweep
    };
    let comparisons = suite
        .comparisons
        .iter()
        .map(|c| compare_sweeps(sweep(&c.a), sweep(&c.b), c.metric))
        .collect::<Result<Vec<_>>>()?;
    let summary = SuiteSummary {
        suite: suite.suite.clone(),
        runs: runs.iter().map(|r| r.summary.clone()).collect(),
        comparisons,
    };
    write_json(&directory.join(SUMMARY_FILE), &summary)?;
    Ok(SuiteOutcome {
        directory: directory.to_path_buf(),
        runs,
        summary,
    })
}

pub fn run_suite(suite: &SuiteConfig) -> Result<SuiteOutcome> {
    let dir = suite
        .output_directory
        .clone()
        .unwrap_or_else(|| Path::new("out").join(&suite.suite));
    run_suite_in(suite, &dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
            "label": "tiny",
            "chain": {"n_qubits": 2, "couplings": [2.0]},
            "time_window": {"t_min_model": 0.0, "t_max_model": 1.0, "grid_points": 5},
            "depths": {"n_min": 1, "n_max": 8},
            "noise": {"gate_error_1q": {"kind": "depolarizing1q", "q": 0.001}},
            "mitigation": {"enabled": true}
        }"#
    }

    fn experiment(text: &str) -> ExperimentConfig {
        match parse_config(text).unwrap() {
            ConfigFile::Experiment(e) => e,
            ConfigFile::Suite(_) => panic!("expected an experiment"),
        }
    }

    fn config_error(text: &str) -> String {
        match parse_config(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn config_round_trips() {
        let cfg = experiment(minimal());
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(experiment(&text), cfg);
        assert_eq!(cfg.angle_scale, DEFAULT_ANGLE_SCALE);
        assert_eq!(cfg.noise.durations, DurationsConfig::default());
    }

    #[test]
    fn errors_name_the_offending_field() {
        let swap = |from: &str, to: &str| minimal().replace(from, to);
        assert_eq!(
            config_error(&swap("\"t_max_model\": 1.0", "\"t_max_model\": 0.0")),
            "time_window.t_max_model"
        );
        assert_eq!(
            config_error(&swap("\"n_max\": 8", "\"n_max\": 0")),
            "depths.n_max"
        );
        assert_eq!(
            config_error(&swap("[2.0]", "[2.0, 1.0]")),
            "chain.couplings"
        );
        assert_eq!(
            config_error(&swap("\"q\": 0.001", "\"q\": 2.0")),
            "noise.gate_error_1q"
        );
        assert_eq!(
            config_error(&swap("\"grid_points\": 5", "\"grid_points\": \"many\"")),
            "time_window.grid_points"
        );
        assert_eq!(config_error(&swap("\"label\"", "\"lable\"")), "lable");
        assert_eq!(
            config_error(&swap(
                "\"enabled\": true",
                "\"enabled\": true, \"alpha\": 1"
            )),
            "mitigation.alpha"
        );
        assert_eq!(
            config_error(&swap("\"n_max\": 8", "\"n_max\": 7")),
            "mitigation.window"
        );
    }

    #[test]
    fn crosstalk_needs_exactly_one_unit() {
        let text = minimal().replace(
            "\"noise\": {",
            "\"noise\": {\"crosstalk\": {\"zeta_model\": 0.01, \"zeta_rad_per_us\": 0.01},",
        );
        assert_eq!(config_error(&text), "noise.crosstalk");
        let text = minimal().replace(
            "\"noise\": {",
            "\"noise\": {\"crosstalk\": {\"zeta_rad_per_us\": 0.02},",
        );
        let noise = experiment(&text).noise_model().unwrap();
        assert_eq!(
            noise.crosstalk,
            Some(Crosstalk {
                zeta: 2e4,
                mode: CrosstalkMode::Physical
            })
        );
    }

    #[test]
    fn units_are_converted_to_seconds() {
        let text = minimal().replace(
            "\"noise\": {",
            "\"noise\": {\"decoherence\": {\"t1_us\": 80, \"t2_us\": 140}, \"durations\": {\"l1q_ns\": 20, \"l2q_ns\": 200},",
        );
        let noise = experiment(&text).noise_model().unwrap();
        let d = noise.decoherence.unwrap();
        assert!((d.t1 - 80e-6).abs() < 1e-18 && (d.t2 - 140e-6).abs() < 1e-18);
        assert!((noise.durations.two_qubit - 200e-9).abs() < 1e-21);
    }

    #[test]
    fn suite_rejects_unknown_and_duplicate_labels() {
        let run = minimal();
        let dup = format!(r#"{{"suite": "s", "runs": [{run}, {run}]}}"#);
        assert_eq!(config_error(&dup), "runs[1].label");
        let missing = format!(
            r#"{{"suite": "s", "runs": [{run}], "comparisons": [{{"a": "tiny", "b": "nope", "metric": "delta_fidelity"}}]}}"#
        );
        assert_eq!(config_error(&missing), "comparisons[0].b");
    }

    #[test]
    fn csv_round_trip_and_atomic_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = experiment(minimal());
        let out = run_experiment_in(&cfg, dir.path()).unwrap();
        let series = fs::read_to_string(dir.path().join(SERIES_FILE)).unwrap();
        assert!(series.starts_with("n_steps,t_model,fidelity\n"));
        let sweep = fs::read_to_string(dir.path().join(SWEEP_FILE)).unwrap();
        assert!(sweep.starts_with("n_steps,hitting_time,peak_fidelity\n"));
        assert_eq!(sweep.lines().count(), 9);
        let back = load_run(dir.path()).unwrap();
        assert_eq!(back.records, out.sweep.records);
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .filter(|n| n.starts_with(".tmp"))
            .collect();
        assert!(leftovers.is_empty(), "{leftovers:?}");
        assert!(dir.path().join(FIT_FILE).exists());
    }

    #[test]
    fn compare_rejects_mismatched_depths() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = experiment(minimal());
        let mut shorter = cfg.clone();
        shorter.depths.n_max = 7;
        shorter.mitigation.enabled = false;
        let a = run_experiment_in(&cfg, &dir.path().join("a")).unwrap();
        let b = run_experiment_in(&shorter, &dir.path().join("b")).unwrap();
        assert!(matches!(
            compare_sweeps(&a.sweep, &b.sweep, Metric::DeltaFidelity),
            Err(Error::Comparison(_))
        ));
        let same = compare_runs(
            &dir.path().join("a"),
            &dir.path().join("a"),
            Metric::DynamicsError,
        )
        .unwrap();
        assert_eq!(same.value, 0.0);
        assert!(same.per_depth.iter().all(|(_, e)| *e == 0.0));
    }

    #[test]
    fn metric_names_parse() {
        assert_eq!(
            "delta_hitting".parse::<Metric>().unwrap(),
            Metric::DeltaHitting
        );
        assert!("fidelity".parse::<Metric>().is_err());
    }
}
