//! Scenario file format (TOML). Unknown keys anywhere are errors. Every key is
//! optional; each one left out is filled with its default and reported in
//! [`LoadedConfig::defaulted`].
//!
//! ```toml
//! agents = 4
//! periods = 120
//! seed = 7
//! record_rates = false
//! rate_window = 1
//!
//! [policy]
//! base_weights = [0.3, 0.1, 0.2, 0.15, 0.1, 0.15]
//! persistence = { a = 0.5, b = 0.5, d = 0.5, e = 0.5, j = 0.5, k = 0.5 }
//! regret_weight = 1.0
//! curvature = [2.0, 2.0, 2.0, 2.0, 2.0, 2.0]
//! signed = false
//!
//! [bump]
//! relative_step = 1e-4
//! scheme = "central"
//!
//! [wealth]
//! initial = { kind = "lognormal", mu = 6.0, sigma = 0.5 }   # or { kind = "uniform", low, high }
//! investable_fraction = 1.0
//! period_fraction = 0.1
//! growth = 0.0
//! credit_returns = false
//! returns = { kind = "normal", mean = 0.03, sd = 0.02 }
//!
//! [prices]                     # one path per factor price: c, t, i, l, b, h
//! c = { kind = "constant", value = 1.0 }
//! i = { kind = "drift", start = 1.0, rate = 0.01 }
//! h = { kind = "series", values = [1.0, 1.1, 1.2] }
//!
//! [[shocks]]
//! kind = "income_loss"         # income_loss | layoff | health_event | price_jump
//! target = "wealth"            # wealth, or a factor name for price_jump
//! magnitude = -0.5
//! period = 3
//!
//! [savings]                    # linear ramp of each PV component over the horizon
//! horizon_years = 30.0
//! discount_rate = 0.03
//! intervals = 1000
//! start = { pv_savings = 0.02 }
//! end = { pv_savings = 0.01, pv_inflation = 0.005 }
//!
//! [sweep]                      # wealth sweep for the non-monotonicity probe
//! w_min = 0.0
//! w_max = 200.0                # default: twice the first agent's final period wealth
//! steps = 41
//! shocks = [{ kind = "layoff", target = "wealth", magnitude = -0.4, period = 20 }]
//!
//! [probes]
//! samples = 64
//! perturbation = 1.0
//! ```

use std::fmt::Debug;
use std::path::Path;

use serde::Deserialize;
use uiwd_core::scenario::{PathSpec, WealthDistribution, WealthModel};
use uiwd_core::{
    AllocationPolicy, BumpSpec, FactorId, PvComponents, RecursionCoefficients, ScenarioConfig,
    Scheme, Shock, Violation, FACTOR_COUNT,
};

use crate::RunError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    agents: Option<usize>,
    periods: Option<usize>,
    seed: Option<u64>,
    record_rates: Option<bool>,
    rate_window: Option<usize>,
    policy: Option<RawPolicy>,
    bump: Option<RawBump>,
    wealth: Option<RawWealth>,
    prices: Option<RawPrices>,
    shocks: Option<Vec<Shock>>,
    savings: Option<RawSavings>,
    sweep: Option<RawSweep>,
    probes: Option<RawProbes>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    base_weights: Option<[f64; FACTOR_COUNT]>,
    persistence: Option<RawPersistence>,
    regret_weight: Option<f64>,
    curvature: Option<[f64; FACTOR_COUNT]>,
    signed: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPersistence {
    a: Option<f64>,
    b: Option<f64>,
    d: Option<f64>,
    e: Option<f64>,
    j: Option<f64>,
    k: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBump {
    relative_step: Option<f64>,
    scheme: Option<Scheme>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWealth {
    initial: Option<WealthDistribution>,
    investable_fraction: Option<f64>,
    period_fraction: Option<f64>,
    growth: Option<f64>,
    credit_returns: Option<bool>,
    returns: Option<PathSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrices {
    c: Option<PathSpec>,
    t: Option<PathSpec>,
    i: Option<PathSpec>,
    l: Option<PathSpec>,
    b: Option<PathSpec>,
    h: Option<PathSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSavings {
    horizon_years: Option<f64>,
    discount_rate: Option<f64>,
    intervals: Option<usize>,
    start: Option<RawPv>,
    end: Option<RawPv>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPv {
    #[serde(default)]
    pv_savings: f64,
    #[serde(default)]
    pv_expected_uncovered: f64,
    #[serde(default)]
    pv_unexpected: f64,
    #[serde(default)]
    pv_inflation: f64,
    #[serde(default)]
    instability_regret: f64,
    #[serde(default)]
    pv_home_equity: f64,
    #[serde(default)]
    pv_gov_support: f64,
    #[serde(default)]
    pv_insurance: f64,
}

impl From<RawPv> for PvComponents {
    fn from(r: RawPv) -> Self {
        PvComponents {
            pv_savings: r.pv_savings,
            pv_expected_uncovered: r.pv_expected_uncovered,
            pv_unexpected: r.pv_unexpected,
            pv_inflation: r.pv_inflation,
            instability_regret: r.instability_regret,
            pv_home_equity: r.pv_home_equity,
            pv_gov_support: r.pv_gov_support,
            pv_insurance: r.pv_insurance,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    w_min: Option<f64>,
    w_max: Option<f64>,
    steps: Option<usize>,
    shocks: Option<Vec<Shock>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbes {
    samples: Option<usize>,
    perturbation: Option<f64>,
}

/// Savings profile ramping linearly from `start` to `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SavingsSpec {
    pub horizon_years: f64,
    pub discount_rate: f64,
    pub intervals: usize,
    pub start: PvComponents,
    pub end: PvComponents,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub w_min: f64,
    /// `None`: twice the probed state's period wealth.
    pub w_max: Option<f64>,
    pub steps: usize,
    pub shocks: Vec<Shock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub samples: usize,
    pub perturbation: f64,
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub scenario: ScenarioConfig,
    pub savings: SavingsSpec,
    pub sweep: SweepSpec,
    pub probes: ProbeSpec,
    /// `(key path, value)` for every key that was not in the file.
    pub defaulted: Vec<(String, String)>,
}

struct Defaults(Vec<(String, String)>);

impl Defaults {
    fn take<T: Debug>(&mut self, value: Option<T>, path: &str, default: T) -> T {
        match value {
            Some(v) => v,
            None => {
                self.0.push((path.to_string(), format!("{default:?}")));
                default
            }
        }
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::ConfigRead {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text).map_err(|e| match e {
        RunError::ConfigParse { message, .. } => RunError::ConfigParse {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })
}

/// Parses and validates scenario text.
pub fn parse_config(text: &str) -> Result<LoadedConfig, RunError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| RunError::ConfigParse {
        path: "<inline>".into(),
        message: e.to_string(),
    })?;
    let loaded = resolve(raw);
    let mut v = loaded.scenario.violations();
    v.extend(loaded.extra_violations());
    if v.is_empty() {
        Ok(loaded)
    } else {
        Err(RunError::Validation(v))
    }
}

fn resolve(raw: RawConfig) -> LoadedConfig {
    let mut d = Defaults(Vec::new());
    let base = ScenarioConfig::default();

    let policy = {
        let p = raw.policy.unwrap_or_default();
        let dp = AllocationPolicy::default();
        let pers = p.persistence.unwrap_or_default();
        let dpers = RecursionCoefficients::default();
        AllocationPolicy {
            base_weights: d.take(p.base_weights, "policy.base_weights", dp.base_weights),
            persistence: RecursionCoefficients {
                a: d.take(pers.a, "policy.persistence.a", dpers.a),
                b: d.take(pers.b, "policy.persistence.b", dpers.b),
                d: d.take(pers.d, "policy.persistence.d", dpers.d),
                e: d.take(pers.e, "policy.persistence.e", dpers.e),
                j: d.take(pers.j, "policy.persistence.j", dpers.j),
                k: d.take(pers.k, "policy.persistence.k", dpers.k),
            },
            regret_weight: d.take(p.regret_weight, "policy.regret_weight", dp.regret_weight),
            curvature: d.take(p.curvature, "policy.curvature", dp.curvature),
            signed: d.take(p.signed, "policy.signed", dp.signed),
        }
    };

    let bump = {
        let b = raw.bump.unwrap_or_default();
        BumpSpec {
            relative_step: d.take(
                b.relative_step,
                "bump.relative_step",
                base.bump.relative_step,
            ),
            scheme: d.take(b.scheme, "bump.scheme", base.bump.scheme),
        }
    };

    let wealth = {
        let w = raw.wealth.unwrap_or_default();
        let dw = WealthModel::default();
        WealthModel {
            initial: d.take(w.initial, "wealth.initial", dw.initial),
            investable_fraction: d.take(
                w.investable_fraction,
                "wealth.investable_fraction",
                dw.investable_fraction,
            ),
            period_fraction: d.take(
                w.period_fraction,
                "wealth.period_fraction",
                dw.period_fraction,
            ),
            growth: d.take(w.growth, "wealth.growth", dw.growth),
            credit_returns: d.take(w.credit_returns, "wealth.credit_returns", dw.credit_returns),
            returns: d.take(w.returns, "wealth.returns", dw.returns),
        }
    };

    let prices = {
        let p = raw.prices.unwrap_or_default();
        let given = [p.c, p.t, p.i, p.l, p.b, p.h];
        let mut out: [PathSpec; FACTOR_COUNT] = base.prices.clone();
        for (f, spec) in FactorId::ALL.into_iter().zip(given) {
            out[f.index()] = d.take(
                spec,
                &format!("prices.{}", f.price_symbol()),
                base.prices[f.index()].clone(),
            );
        }
        out
    };

    let scenario = ScenarioConfig {
        n_agents: d.take(raw.agents, "agents", base.n_agents),
        n_periods: d.take(raw.periods, "periods", base.n_periods),
        seed: d.take(raw.seed, "seed", base.seed),
        record_rates: d.take(raw.record_rates, "record_rates", base.record_rates),
        rate_window: d.take(raw.rate_window, "rate_window", base.rate_window),
        policy,
        bump,
        wealth,
        prices,
        shocks: d.take(raw.shocks, "shocks", Vec::new()),
    };

    let savings = {
        let s = raw.savings.unwrap_or_default();
        SavingsSpec {
            horizon_years: d.take(s.horizon_years, "savings.horizon_years", 30.0),
            discount_rate: d.take(s.discount_rate, "savings.discount_rate", 0.03),
            intervals: d.take(
                s.intervals,
                "savings.intervals",
                uiwd_core::savings::DEFAULT_INTERVALS,
            ),
            start: d.take(
                s.start.map(Into::into),
                "savings.start",
                PvComponents::default(),
            ),
            end: d.take(
                s.end.map(Into::into),
                "savings.end",
                PvComponents::default(),
            ),
        }
    };

    let sweep = {
        let s = raw.sweep.unwrap_or_default();
        SweepSpec {
            w_min: d.take(s.w_min, "sweep.w_min", 0.0),
            w_max: match s.w_max {
                Some(v) => Some(v),
                None => {
                    d.0.push(("sweep.w_max".into(), "2 × probed period wealth".into()));
                    None
                }
            },
            steps: d.take(s.steps, "sweep.steps", 41),
            shocks: d.take(s.shocks, "sweep.shocks", Vec::new()),
        }
    };

    let probes = {
        let p = raw.probes.unwrap_or_default();
        ProbeSpec {
            samples: d.take(p.samples, "probes.samples", 64),
            perturbation: d.take(p.perturbation, "probes.perturbation", 1.0),
        }
    };

    LoadedConfig {
        scenario,
        savings,
        sweep,
        probes,
        defaulted: d.0,
    }
}

impl LoadedConfig {
    fn extra_violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let s = &self.savings;
        if !(s.horizon_years.is_finite() && s.horizon_years > 0.0) {
            v.push(Violation::new("savings.horizon_years", "must be > 0"));
        }
        if s.intervals < 4 {
            v.push(Violation::new("savings.intervals", "must be ≥ 4"));
        }
        if !(s.start.is_finite() && s.end.is_finite()) {
            v.push(Violation::new("savings", "components must be finite"));
        }
        let sw = &self.sweep;
        if sw.steps < 3 {
            v.push(Violation::new("sweep.steps", "steps ≥ 3"));
        }
        if let Some(max) = sw.w_max {
            if max.is_nan() || max <= sw.w_min {
                v.push(Violation::new("sweep.w_max", "w_min < w_max"));
            }
        }
        for (i, s) in sw.shocks.iter().enumerate() {
            v.extend(s.violations(&format!("sweep.shocks[{i}]")));
        }
        if self.probes.samples < 1 {
            v.push(Violation::new("probes.samples", "must be ≥ 1"));
        }
        if !(self.probes.perturbation.is_finite() && self.probes.perturbation >= 0.0) {
            v.push(Violation::new("probes.perturbation", "must be ≥ 0"));
        }
        v
    }
}
