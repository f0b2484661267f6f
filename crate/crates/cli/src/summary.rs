use std::fmt::Write;

use uiwd_core::eis::{estimate_eis, log_growth, EisEstimate};
use uiwd_core::substitution::average_rates;
use uiwd_core::{savings_utility, FactorId, ProbeReport, ProfilePath, Trajectory};

use crate::{LoadedConfig, Metric, RunError, RunManifest};

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Consumption-growth EIS for one agent, regressed on the gross return of the
/// period each growth observation ends in.
pub fn agent_eis(
    trajectory: &Trajectory,
    agent: usize,
    folds: usize,
) -> uiwd_core::Result<EisEstimate> {
    let consumption = trajectory.quantity_series(agent, FactorId::Consumption);
    let growth = log_growth(&consumption)?;
    let gross = trajectory.gross_returns();
    estimate_eis(&growth, &gross[1..], folds)
}

fn fmt_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(f64::to_string).collect();
    format!("[{}]", items.join(", "))
}

pub(crate) fn render(
    manifest: &RunManifest,
    loaded: &LoadedConfig,
    trajectory: &Trajectory,
    probes: &[ProbeReport],
) -> Result<String, RunError> {
    let mut s = String::new();
    let sc = &loaded.scenario;
    let metrics: Vec<&str> = manifest.metrics.iter().map(|m| m.name()).collect();

    // Writing to a String cannot fail.
    let _ = writeln!(s, "# uiwd metrics summary");
    let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "seed = {}", sc.seed);
    let _ = writeln!(s, "agents = {}", sc.n_agents);
    let _ = writeln!(s, "periods = {}", sc.n_periods);
    let _ = writeln!(s, "metrics = {}", metrics.join(","));
    for (key, value) in &loaded.defaulted {
        let _ = writeln!(s, "default.{key} = {value}");
    }

    if manifest.wants(Metric::Rates) {
        let _ = writeln!(s, "\n[rates]");
        for agent in 0..trajectory.n_agents {
            let recs = trajectory.agent(agent);
            let rates: Vec<_> = recs.iter().filter_map(|r| r.rates).collect();
            if let Some(mean) = average_rates(&rates) {
                let mean_mrijs = rates.iter().map(|r| r.mrijs).sum::<f64>() / rates.len() as f64;
                for (name, v) in [
                    ("c_star", mean.c_star),
                    ("l_star", mean.l_star),
                    ("t_star", mean.t_star),
                    ("i_star", mean.i_star),
                    ("b_star", mean.b_star),
                    ("h_star", mean.h_star),
                ] {
                    let _ = writeln!(s, "agent.{agent}.{name} = {v}");
                }
                let _ = writeln!(s, "agent.{agent}.mean_mrijs = {mean_mrijs}");
            }
        }
    }

    if manifest.wants(Metric::Mrijs) {
        let mut values: Vec<f64> = trajectory
            .records
            .iter()
            .filter_map(|r| r.rates.map(|x| x.mrijs))
            .collect();
        values.sort_by(f64::total_cmp);
        let _ = writeln!(s, "\n[mrijs]");
        let _ = writeln!(s, "count = {}", values.len());
        if !values.is_empty() {
            for (name, q) in [
                ("min", 0.0),
                ("p05", 0.05),
                ("p25", 0.25),
                ("p50", 0.5),
                ("p75", 0.75),
                ("p95", 0.95),
                ("max", 1.0),
            ] {
                let _ = writeln!(s, "{name} = {}", quantile(&values, q));
            }
        }
    }

    if manifest.wants(Metric::Eis) {
        let _ = writeln!(s, "\n[eis]");
        let _ = writeln!(s, "regressor = log gross return (wealth.returns)");
        let _ = writeln!(s, "folds = {}", manifest.eis_folds);
        for agent in 0..trajectory.n_agents {
            let e = agent_eis(trajectory, agent, manifest.eis_folds)?;
            let _ = writeln!(s, "agent.{agent}.point = {}", e.point);
            let _ = writeln!(s, "agent.{agent}.stderr = {}", e.stderr);
            let _ = writeln!(
                s,
                "agent.{agent}.subsample_dispersion = {}",
                e.subsample_dispersion
            );
            let _ = writeln!(
                s,
                "agent.{agent}.relative_dispersion = {}",
                e.relative_dispersion()
            );
            let _ = writeln!(s, "agent.{agent}.n_obs = {}", e.n_obs);
            let _ = writeln!(
                s,
                "agent.{agent}.fold_points = {}",
                fmt_list(&e.fold_points)
            );
        }
    }

    if manifest.wants(Metric::SavingsUtility) {
        let sv = &loaded.savings;
        let path = ProfilePath::linear(
            sv.horizon_years,
            sv.discount_rate,
            sv.intervals,
            sv.start,
            sv.end,
        )?;
        let _ = writeln!(s, "\n[savings-utility]");
        let _ = writeln!(s, "horizon_years = {}", sv.horizon_years);
        let _ = writeln!(s, "discount_rate = {}", sv.discount_rate);
        let _ = writeln!(s, "intervals = {}", sv.intervals);
        let _ = writeln!(s, "integral = {}", path.integral());
        let _ = writeln!(s, "utility = {}", savings_utility(&path));
    }

    if manifest.wants(Metric::Probes) {
        let _ = writeln!(s, "\n[probes]");
        for p in probes {
            let _ = writeln!(s, "{}.passed = {}", p.name, p.passed);
            let _ = writeln!(s, "{}.evidence = {}", p.name, p.evidence);
        }
    }
    Ok(s)
}
