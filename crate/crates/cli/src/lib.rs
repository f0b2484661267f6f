//! Configuration loading, scenario orchestration and report output for the
//! `uiwd` command.
//!
//! A run writes three files to the output directory:
//!
//! * `trajectory.csv`: one row per (agent, period).
//! * `summary.txt`: `key = value` lines; the header echoes every defaulted
//!   config key, then one block per requested metric.
//! * `probes.json`: probe reports (an empty array when probes were not requested).
//!
//! Exit categories: 0 success, 2 configuration, 3 numeric failure, 4 output I/O.

pub mod config;
pub mod demo;
mod summary;

use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;
use uiwd_core::diagnostics::write_reports_json;
use uiwd_core::{
    probe_nonadditive, probe_nonmonotonic, probe_recursive, sweep_wealth, PeriodContext,
    ProbeReport, Trajectory, Violation,
};

pub use config::{load_config, parse_config, LoadedConfig};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const PROBES_FILE: &str = "probes.json";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read config {path}: {message}")]
    ConfigRead { path: String, message: String },

    #[error("config parse error in {path}: {message}")]
    ConfigParse { path: String, message: String },

    #[error("config validation failed: {}", list(.0))]
    Validation(Vec<Violation>),

    #[error("numeric failure: {0}")]
    Numeric(uiwd_core::Error),

    #[error("output error: {0}")]
    Output(String),
}

fn list(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::ConfigRead { .. }
            | RunError::ConfigParse { .. }
            | RunError::Validation(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Output(_) => 4,
        }
    }

    pub fn category(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            3 => "numeric",
            _ => "io",
        }
    }
}

impl From<uiwd_core::Error> for RunError {
    fn from(e: uiwd_core::Error) -> Self {
        match e {
            uiwd_core::Error::Invalid(v) => RunError::Validation(v),
            uiwd_core::Error::Export(m) => RunError::Output(m),
            other => RunError::Numeric(other),
        }
    }
}

fn io_err(path: &Path, e: impl fmt::Display) -> RunError {
    RunError::Output(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Rates,
    Mrijs,
    Eis,
    SavingsUtility,
    Probes,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Rates,
        Metric::Mrijs,
        Metric::Eis,
        Metric::SavingsUtility,
        Metric::Probes,
    ];

    /// Requested when `--metrics` is not given. EIS needs long series, so it is opt-in.
    pub const DEFAULT: [Metric; 4] = [
        Metric::Rates,
        Metric::Mrijs,
        Metric::SavingsUtility,
        Metric::Probes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Rates => "rates",
            Metric::Mrijs => "mrijs",
            Metric::Eis => "eis",
            Metric::SavingsUtility => "savings-utility",
            Metric::Probes => "probes",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Metric::ALL.iter().map(|m| m.name()).collect();
                format!(
                    "unknown metric `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub metrics: Vec<Metric>,
    pub seed: Option<u64>,
    /// Contiguous folds for the EIS subsample dispersion.
    pub eis_folds: usize,
}

impl RunManifest {
    pub fn new(config: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunManifest {
            config: config.into(),
            out_dir: out_dir.into(),
            metrics: Metric::DEFAULT.to_vec(),
            seed: None,
            eis_folds: 4,
        }
    }

    pub fn wants(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }

    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.metrics.is_empty() {
            v.push(Violation::new(
                "metrics",
                "at least one metric must be requested",
            ));
        }
        if self.eis_folds < 2 {
            v.push(Violation::new("folds", "must be ≥ 2"));
        }
        v
    }
}

/// Files written by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trajectory: PathBuf,
    pub summary: PathBuf,
    pub probes: PathBuf,
}

/// Loads the config named by `manifest` and applies its seed override.
pub fn load_for(manifest_config: &Path, seed: Option<u64>) -> Result<LoadedConfig, RunError> {
    let mut loaded = load_config(manifest_config)?;
    if let Some(seed) = seed {
        loaded.scenario.seed = seed;
        loaded.defaulted.retain(|(k, _)| k != "seed");
    }
    Ok(loaded)
}

/// Executes a manifest end to end. Identical manifests produce byte-identical files.
pub fn run(manifest: &RunManifest) -> Result<RunOutcome, RunError> {
    let violations = manifest.violations();
    if !violations.is_empty() {
        return Err(RunError::Validation(violations));
    }
    let mut loaded = load_for(&manifest.config, manifest.seed)?;

    if manifest.wants(Metric::Eis) {
        let needed = uiwd_core::eis::MIN_OBS * manifest.eis_folds + 1;
        if loaded.scenario.n_periods < needed {
            return Err(RunError::Validation(vec![Violation::new(
                "periods",
                format!(
                    "eis with {} folds needs at least {needed} periods (series too short), got {}",
                    manifest.eis_folds, loaded.scenario.n_periods
                ),
            )]));
        }
    }
    if manifest.wants(Metric::Rates) || manifest.wants(Metric::Mrijs) {
        loaded.scenario.record_rates = true;
    }

    let trajectory = uiwd_core::run_scenario(&loaded.scenario)?;
    let probes = if manifest.wants(Metric::Probes) {
        run_probes(&loaded, &trajectory)?
    } else {
        Vec::new()
    };
    let summary = summary::render(manifest, &loaded, &trajectory, &probes)?;

    let outcome = prepare_out_dir(&manifest.out_dir)?;
    write_file(&outcome.trajectory, |w| trajectory.write_csv(w))?;
    fs::write(&outcome.summary, summary).map_err(|e| io_err(&outcome.summary, e))?;
    write_file(&outcome.probes, |w| write_reports_json(&probes, w))?;
    Ok(outcome)
}

/// Runs the scenario and only the probes; writes `probes.json`.
pub fn run_probe_only(
    config: &Path,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<(PathBuf, Vec<ProbeReport>), RunError> {
    let loaded = load_for(config, seed)?;
    let trajectory = uiwd_core::run_scenario(&loaded.scenario)?;
    let probes = run_probes(&loaded, &trajectory)?;
    let outcome = prepare_out_dir(out_dir)?;
    write_file(&outcome.probes, |w| write_reports_json(&probes, w))?;
    Ok((outcome.probes, probes))
}

/// The three probes, evaluated at the first agent's final state.
pub fn run_probes(
    loaded: &LoadedConfig,
    trajectory: &Trajectory,
) -> Result<Vec<ProbeReport>, RunError> {
    let last = trajectory
        .agent(0)
        .last()
        .expect("scenarios have at least one period");
    let state = last.state();
    let ctx = PeriodContext::from_state(&state);
    let policy = &loaded.scenario.policy;

    let nonadditive = probe_nonadditive(
        policy,
        &state,
        &ctx,
        loaded.probes.samples,
        loaded.scenario.seed,
    )?;
    let recursive = probe_recursive(policy, &state, &ctx, loaded.probes.perturbation)?;

    let sweep = &loaded.sweep;
    let w_max = sweep.w_max.unwrap_or(2.0 * state.wealth.period);
    let mut sweep_ctx = ctx.clone();
    sweep_ctx.shocks = sweep.shocks.clone();
    let curve = sweep_wealth(policy, &state, &sweep_ctx, sweep.w_min, w_max, sweep.steps)?;
    let nonmonotonic = probe_nonmonotonic(&curve)?;

    Ok(vec![nonmonotonic, nonadditive, recursive])
}

fn prepare_out_dir(dir: &Path) -> Result<RunOutcome, RunError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    Ok(RunOutcome {
        trajectory: dir.join(TRAJECTORY_FILE),
        summary: dir.join(SUMMARY_FILE),
        probes: dir.join(PROBES_FILE),
    })
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<fs::File>) -> uiwd_core::Result<()>,
) -> Result<(), RunError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(|e| io_err(path, e))?;
    std::io::Write::flush(&mut w).map_err(|e| io_err(path, e))
}
