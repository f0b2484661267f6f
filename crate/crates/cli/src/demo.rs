//! EIS demonstration: the same estimator applied to data with a known EIS
//! (CRRA Euler-equation oracle) and to consumption generated by the six-factor
//! allocation recursion.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use uiwd_core::{crra_euler_oracle, estimate_eis, EisEstimate};

use crate::config::parse_config;
use crate::summary::agent_eis;
use crate::{io_err, load_for, LoadedConfig, RunError};

/// Shipped demonstration scenario.
pub const DEMO_SCENARIO: &str = include_str!("../fixtures/eis_demo.toml");

/// The allocation-generated EIS counts as unstable when the fold dispersion
/// exceeds this fraction of `|point|`.
pub const INSTABILITY_THRESHOLD: f64 = 0.5;

pub const ORACLE_GAMMAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const ORACLE_BETA: f64 = 0.98;
pub const ORACLE_NOISE_SD: f64 = 0.005;

pub const DEMO_FILE: &str = "eis_demo.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub gamma: f64,
    pub true_eis: f64,
    pub estimate: EisEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EisDemoReport {
    pub seed: u64,
    pub folds: usize,
    pub oracle: Vec<OracleRow>,
    pub uiwd: EisEstimate,
}

impl EisDemoReport {
    pub fn unstable(&self) -> bool {
        self.uiwd.subsample_dispersion > INSTABILITY_THRESHOLD * self.uiwd.point.abs()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# uiwd EIS demonstration");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "folds = {}", self.folds);
        let _ = writeln!(s, "threshold = {INSTABILITY_THRESHOLD}");
        for row in &self.oracle {
            let e = &row.estimate;
            let _ = writeln!(s, "\n[oracle.gamma_{}]", row.gamma);
            let _ = writeln!(s, "true_eis = {}", row.true_eis);
            let _ = writeln!(s, "point = {}", e.point);
            let _ = writeln!(s, "stderr = {}", e.stderr);
            let _ = writeln!(
                s,
                "relative_error = {}",
                (e.point - row.true_eis).abs() / row.true_eis
            );
            let _ = writeln!(s, "relative_dispersion = {}", e.relative_dispersion());
        }
        let e = &self.uiwd;
        let _ = writeln!(s, "\n[uiwd]");
        let _ = writeln!(s, "point = {}", e.point);
        let _ = writeln!(s, "stderr = {}", e.stderr);
        let _ = writeln!(s, "subsample_dispersion = {}", e.subsample_dispersion);
        let _ = writeln!(s, "relative_dispersion = {}", e.relative_dispersion());
        let folds: Vec<String> = e.fold_points.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "fold_points = [{}]", folds.join(", "));
        let _ = writeln!(s, "n_obs = {}", e.n_obs);
        let _ = writeln!(s, "unstable = {}", self.unstable());
        s
    }
}

pub fn demo_config() -> LoadedConfig {
    parse_config(DEMO_SCENARIO).expect("shipped demo scenario is valid")
}

/// Runs the scenario, estimates EIS from the first agent's consumption, and
/// estimates it again from oracle data built on the same gross-rate path.
pub fn eis_demo(loaded: &LoadedConfig, folds: usize) -> Result<EisDemoReport, RunError> {
    let trajectory = uiwd_core::run_scenario(&loaded.scenario)?;
    let uiwd = agent_eis(&trajectory, 0, folds)?;
    let rates = trajectory.gross_returns()[1..].to_vec();
    let oracle = ORACLE_GAMMAS
        .iter()
        .map(|&gamma| {
            let growth = crra_euler_oracle(
                gamma,
                ORACLE_BETA,
                &rates,
                ORACLE_NOISE_SD,
                loaded.scenario.seed,
            )?;
            Ok(OracleRow {
                gamma,
                true_eis: 1.0 / gamma,
                estimate: estimate_eis(&growth, &rates, folds)?,
            })
        })
        .collect::<uiwd_core::Result<Vec<_>>>()?;
    Ok(EisDemoReport {
        seed: loaded.scenario.seed,
        folds,
        oracle,
        uiwd,
    })
}

/// `eis-demo` verb: uses the shipped scenario unless a config is given.
pub fn run_eis_demo(
    config: Option<&Path>,
    out_dir: &Path,
    seed: Option<u64>,
    folds: usize,
) -> Result<(PathBuf, EisDemoReport), RunError> {
    let loaded = match config {
        Some(path) => load_for(path, seed)?,
        None => {
            let mut c = demo_config();
            if let Some(seed) = seed {
                c.scenario.seed = seed;
            }
            c
        }
    };
    let report = eis_demo(&loaded, folds)?;
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let path = out_dir.join(DEMO_FILE);
    fs::write(&path, report.render()).map_err(|e| io_err(&path, e))?;
    Ok((path, report))
}
