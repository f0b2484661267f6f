//! Multi-agent, multi-period simulation.
//!
//! Agents never interact: each one runs the allocation recursion against the
//! same exogenous market (price and return paths). Periods are numbered from 1;
//! period 0 is the pre-sample state with nothing allocated.
//!
//! Wealth each period:
//!
//! ```text
//! W_1     = initial draw
//! W_{t+1} = W_t · (1 + growth) [+ r_{t+1} · x_t · i_t   when credit_returns]
//! investable = investable_fraction · W_t
//! w_t        = period_fraction · investable
//! ```
//!
//! Shocks scheduled for period `t` hit the state after wealth and prices are set
//! and before the policy allocates; they last for that period only, except that
//! a health event's hit to Total Wealth carries into the wealth path.
//!
//! # Random streams
//!
//! One root seed. Market paths draw from ChaCha8 stream `u64::MAX`, agent `k`
//! from stream `k`, all keyed by the root seed. Results are independent of
//! thread scheduling and of how many agents run alongside.

use std::fmt;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{step_recursion, AllocationPolicy, PeriodContext, Policy};
use crate::domain::{
    AgentState, AllocationVector, FactorId, SubstitutionRates, UnitPrices, Violation, Wealth,
    FACTOR_COUNT,
};
use crate::error::{Error, Result};
use crate::substitution::{all_rates, average_rates, BumpSpec};

const MARKET_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockKind {
    IncomeLoss,
    PriceJump,
    HealthEvent,
    Layoff,
}

impl ShockKind {
    pub fn name(self) -> &'static str {
        match self {
            ShockKind::IncomeLoss => "income_loss",
            ShockKind::PriceJump => "price_jump",
            ShockKind::HealthEvent => "health_event",
            ShockKind::Layoff => "layoff",
        }
    }
}

/// What a shock acts on: the agent's wealth or one factor's price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ShockTarget {
    Wealth,
    Factor(FactorId),
}

impl TryFrom<String> for ShockTarget {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        if s == "wealth" {
            return Ok(ShockTarget::Wealth);
        }
        FactorId::from_name(&s)
            .map(ShockTarget::Factor)
            .ok_or_else(|| format!("unknown shock target `{s}` (expected wealth or a factor name)"))
    }
}

impl From<ShockTarget> for String {
    fn from(t: ShockTarget) -> String {
        t.to_string()
    }
}

impl fmt::Display for ShockTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShockTarget::Wealth => f.write_str("wealth"),
            ShockTarget::Factor(id) => f.write_str(id.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shock {
    pub kind: ShockKind,
    pub target: ShockTarget,
    /// Relative size; `-0.5` halves the target.
    pub magnitude: f64,
    pub period: u64,
}

impl Shock {
    pub fn violations(&self, path: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.magnitude.is_finite() && self.magnitude > -1.0) {
            out.push(Violation::new(
                format!("{path}.magnitude"),
                "magnitude > -1",
            ));
        }
        match (self.kind, self.target) {
            (ShockKind::PriceJump, ShockTarget::Wealth) => out.push(Violation::new(
                format!("{path}.target"),
                "price_jump must target a factor",
            )),
            (ShockKind::PriceJump, ShockTarget::Factor(_)) => {}
            (_, ShockTarget::Factor(_)) => out.push(Violation::new(
                format!("{path}.target"),
                format!("{} must target wealth", self.kind.name()),
            )),
            _ => {}
        }
        out
    }
}

/// Applies one shock to a state.
///
/// * `income_loss`, `layoff`: period wealth × (1 + m); if that lifts it above
///   investable wealth, investable (and if needed total) wealth rise to match.
/// * `price_jump`: the target factor's price × (1 + m).
/// * `health_event`: total, investable and period wealth × (1 + m), and `|m|`
///   is added to regret memory.
///
/// The caller decides which period a shock belongs to; the state's
/// `period_index` is not checked.
pub fn apply_shock(state: &AgentState, shock: &Shock) -> AgentState {
    let mut out = state.clone();
    let scale = 1.0 + shock.magnitude;
    match (shock.kind, shock.target) {
        (ShockKind::IncomeLoss | ShockKind::Layoff, _) => {
            let w = &mut out.wealth;
            w.period *= scale;
            if w.period > w.investable {
                w.investable = w.period;
                w.total = w.total.max(w.investable);
            }
        }
        (ShockKind::PriceJump, ShockTarget::Factor(f)) => {
            out.prices[f] *= scale;
        }
        (ShockKind::PriceJump, ShockTarget::Wealth) => {}
        (ShockKind::HealthEvent, _) => {
            out.wealth.total *= scale;
            out.wealth.investable *= scale;
            out.wealth.period *= scale;
            out.regret_memory += shock.magnitude.abs();
        }
    }
    if out != *state {
        out.budget_closed = false;
    }
    out
}

/// A per-period series, indexed from period 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    Constant {
        value: f64,
    },
    /// `start · (1 + rate)^(t − 1)`
    Drift {
        start: f64,
        rate: f64,
    },
    /// Explicit values; must cover every period.
    Series {
        values: Vec<f64>,
    },
    /// Independent normal draws from the market stream.
    Normal {
        mean: f64,
        sd: f64,
    },
}

impl PathSpec {
    pub fn constant(value: f64) -> Self {
        PathSpec::Constant { value }
    }

    pub fn violations(&self, path: &str, n_periods: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let finite = |v: f64| v.is_finite();
        match self {
            PathSpec::Constant { value } => {
                if !finite(*value) {
                    out.push(Violation::new(format!("{path}.value"), "must be finite"));
                }
            }
            PathSpec::Drift { start, rate } => {
                if !finite(*start) {
                    out.push(Violation::new(format!("{path}.start"), "must be finite"));
                }
                if !(finite(*rate) && *rate > -1.0) {
                    out.push(Violation::new(format!("{path}.rate"), "rate > -1"));
                }
            }
            PathSpec::Series { values } => {
                if values.len() < n_periods {
                    out.push(Violation::new(
                        format!("{path}.values"),
                        format!("needs {n_periods} values, got {}", values.len()),
                    ));
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    out.push(Violation::new(
                        format!("{path}.values[{i}]"),
                        "must be finite",
                    ));
                }
            }
            PathSpec::Normal { mean, sd } => {
                if !finite(*mean) {
                    out.push(Violation::new(format!("{path}.mean"), "must be finite"));
                }
                if !(finite(*sd) && *sd >= 0.0) {
                    out.push(Violation::new(format!("{path}.sd"), "sd ≥ 0"));
                }
            }
        }
        out
    }

    /// Values for periods `1..=n`.
    pub fn realize(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        Ok(match self {
            PathSpec::Constant { value } => vec![*value; n],
            PathSpec::Drift { start, rate } => (0..n)
                .map(|t| start * (1.0 + rate).powi(t as i32))
                .collect(),
            PathSpec::Series { values } => values[..n].to_vec(),
            PathSpec::Normal { mean, sd } => {
                let dist = Normal::new(*mean, *sd).map_err(|e| Error::Numeric(e.to_string()))?;
                (0..n).map(|_| dist.sample(rng)).collect()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WealthDistribution {
    Uniform { low: f64, high: f64 },
    Lognormal { mu: f64, sigma: f64 },
}

impl WealthDistribution {
    pub fn fixed(value: f64) -> Self {
        WealthDistribution::Uniform {
            low: value,
            high: value,
        }
    }

    fn violations(&self, path: &str) -> Vec<Violation> {
        match self {
            WealthDistribution::Uniform { low, high } => {
                if low.is_finite() && high.is_finite() && 0.0 <= *low && low <= high {
                    vec![]
                } else {
                    vec![Violation::new(path, "uniform needs 0 ≤ low ≤ high")]
                }
            }
            WealthDistribution::Lognormal { mu, sigma } => {
                if mu.is_finite() && sigma.is_finite() && *sigma >= 0.0 {
                    vec![]
                } else {
                    vec![Violation::new(
                        path,
                        "lognormal needs finite mu and sigma ≥ 0",
                    )]
                }
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let numeric = |e: &dyn fmt::Display| Error::Numeric(e.to_string());
        Ok(match self {
            WealthDistribution::Uniform { low, high } if low == high => *low,
            WealthDistribution::Uniform { low, high } => Uniform::new_inclusive(*low, *high)
                .map_err(|e| numeric(&e))?
                .sample(rng),
            WealthDistribution::Lognormal { mu, sigma } => LogNormal::new(*mu, *sigma)
                .map_err(|e| numeric(&e))?
                .sample(rng),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WealthModel {
    pub initial: WealthDistribution,
    pub investable_fraction: f64,
    pub period_fraction: f64,
    /// Per-period growth of Total Wealth.
    pub growth: f64,
    /// Credit investment returns to Total Wealth (off by default).
    pub credit_returns: bool,
    /// Net return per period on the Investment factor.
    pub returns: PathSpec,
}

impl Default for WealthModel {
    fn default() -> Self {
        WealthModel {
            initial: WealthDistribution::fixed(100.0),
            investable_fraction: 1.0,
            period_fraction: 1.0,
            growth: 0.0,
            credit_returns: false,
            returns: PathSpec::constant(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_agents: usize,
    pub n_periods: usize,
    pub policy: AllocationPolicy,
    pub wealth: WealthModel,
    /// One path per factor, in factor order.
    pub prices: [PathSpec; FACTOR_COUNT],
    pub shocks: Vec<Shock>,
    pub seed: u64,
    /// Compute substitution rates and MRIJS for every record.
    pub record_rates: bool,
    /// Number of trailing periods averaged into each recorded rate.
    pub rate_window: usize,
    pub bump: BumpSpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_agents: 1,
            n_periods: 1,
            policy: AllocationPolicy::default(),
            wealth: WealthModel::default(),
            prices: std::array::from_fn(|_| PathSpec::constant(1.0)),
            shocks: Vec::new(),
            seed: 0,
            record_rates: false,
            rate_window: 1,
            bump: BumpSpec::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n_agents < 1 {
            out.push(Violation::new("agents", "must be ≥ 1"));
        }
        if self.n_periods < 1 {
            out.push(Violation::new("periods", "must be ≥ 1"));
        }
        out.extend(self.policy.violations());
        let w = &self.wealth;
        out.extend(w.initial.violations("wealth.initial"));
        if !(w.investable_fraction > 0.0 && w.investable_fraction <= 1.0) {
            out.push(Violation::new(
                "wealth.investable_fraction",
                "must lie in (0, 1]",
            ));
        }
        if !(w.period_fraction >= 0.0 && w.period_fraction <= 1.0) {
            out.push(Violation::new(
                "wealth.period_fraction",
                "must lie in [0, 1]",
            ));
        }
        if !(w.growth.is_finite() && w.growth > -1.0) {
            out.push(Violation::new("wealth.growth", "growth > -1"));
        }
        out.extend(w.returns.violations("wealth.returns", self.n_periods));
        for f in FactorId::ALL {
            out.extend(
                self.prices[f.index()]
                    .violations(&format!("prices.{}", f.price_symbol()), self.n_periods),
            );
        }
        for (i, s) in self.shocks.iter().enumerate() {
            out.extend(s.violations(&format!("shocks[{i}]")));
        }
        if self.rate_window < 1 {
            out.push(Violation::new("rate_window", "must be ≥ 1"));
        }
        out.extend(self.bump.violations());
        out
    }
}

/// Exogenous paths shared by every agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    /// `prices[t - 1]` are the prices in period `t`.
    pub prices: Vec<UnitPrices>,
    /// `returns[t - 1]` is the net return credited at the start of period `t`.
    pub returns: Vec<f64>,
}

impl Market {
    pub fn realize(config: &ScenarioConfig) -> Result<Market> {
        let n = config.n_periods;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(MARKET_STREAM);
        let mut columns = Vec::with_capacity(FACTOR_COUNT);
        for spec in &config.prices {
            columns.push(spec.realize(n, &mut rng)?);
        }
        let returns = config.wealth.returns.realize(n, &mut rng)?;
        let mut prices = Vec::with_capacity(n);
        for t in 0..n {
            let p = UnitPrices(std::array::from_fn(|f| columns[f][t]));
            if let Some(v) = p.violations().first() {
                return Err(Error::Numeric(format!("period {}: {v}", t + 1)));
            }
            prices.push(p);
        }
        if let Some(t) = returns.iter().position(|r| r.is_nan() || *r <= -1.0) {
            return Err(Error::Numeric(format!(
                "period {}: return {} is not > -1",
                t + 1,
                returns[t]
            )));
        }
        Ok(Market { prices, returns })
    }
}

/// One agent in one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub agent_id: usize,
    pub period: u64,
    pub wealth: Wealth,
    pub prices: UnitPrices,
    pub alloc: AllocationVector,
    pub prior_alloc: AllocationVector,
    pub regret_memory: f64,
    pub rates: Option<SubstitutionRates>,
}

impl Record {
    /// The budget-closed agent state this record was taken from.
    pub fn state(&self) -> AgentState {
        AgentState {
            wealth: self.wealth,
            prices: self.prices,
            current_alloc: self.alloc,
            prior_alloc: self.prior_alloc,
            regret_memory: self.regret_memory,
            period_index: self.period,
            budget_closed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n_agents: usize,
    pub n_periods: usize,
    /// Agent-major, then period order.
    pub records: Vec<Record>,
    /// Net return per period (shared market path).
    pub returns: Vec<f64>,
}

pub const TRAJECTORY_COLUMNS: [&str; 18] = [
    "agent_id",
    "period",
    "wealth_total",
    "wealth_period",
    "price_c",
    "price_t",
    "price_i",
    "price_l",
    "price_b",
    "price_h",
    "q_v",
    "q_y",
    "q_x",
    "q_z",
    "q_s",
    "q_r",
    "regret",
    "mrijs",
];

impl Trajectory {
    pub fn agent(&self, agent_id: usize) -> &[Record] {
        let n = self.n_periods;
        &self.records[agent_id * n..(agent_id + 1) * n]
    }

    pub fn quantity_series(&self, agent_id: usize, factor: FactorId) -> Vec<f64> {
        self.agent(agent_id)
            .iter()
            .map(|r| r.alloc[factor])
            .collect()
    }

    pub fn gross_returns(&self) -> Vec<f64> {
        self.returns.iter().map(|r| 1.0 + r).collect()
    }

    /// Delimited export, one row per (agent, period), header first.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let export = |e: csv::Error| Error::Export(e.to_string());
        w.write_record(TRAJECTORY_COLUMNS).map_err(export)?;
        for r in &self.records {
            let mut row = Vec::with_capacity(TRAJECTORY_COLUMNS.len());
            row.push(r.agent_id.to_string());
            row.push(r.period.to_string());
            row.push(r.wealth.total.to_string());
            row.push(r.wealth.period.to_string());
            row.extend(r.prices.as_array().iter().map(f64::to_string));
            row.extend(r.alloc.as_array().iter().map(f64::to_string));
            row.push(r.regret_memory.to_string());
            row.push(r.rates.map(|x| x.mrijs.to_string()).unwrap_or_default());
            w.write_record(&row).map_err(export)?;
        }
        w.flush().map_err(|e| Error::Export(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Parallel,
    Sequential,
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<Trajectory> {
    run_scenario_with(config, Schedule::Parallel)
}

pub fn run_scenario_with(config: &ScenarioConfig, schedule: Schedule) -> Result<Trajectory> {
    Error::check(config.violations())?;
    let market = Market::realize(config)?;
    let per_agent: Vec<Vec<Record>> = match schedule {
        Schedule::Parallel => (0..config.n_agents)
            .into_par_iter()
            .map(|a| simulate_agent(config, &market, a))
            .collect::<Result<_>>()?,
        Schedule::Sequential => (0..config.n_agents)
            .map(|a| simulate_agent(config, &market, a))
            .collect::<Result<_>>()?,
    };
    Ok(Trajectory {
        n_agents: config.n_agents,
        n_periods: config.n_periods,
        records: per_agent.into_iter().flatten().collect(),
        returns: market.returns,
    })
}

fn wealth_for(model: &WealthModel, total: f64) -> Wealth {
    let investable = model.investable_fraction * total;
    Wealth::new(total, investable, model.period_fraction * investable)
}

/// Runs one agent through every period. Depends only on the config, the
/// market and the agent's own random stream.
pub fn simulate_agent(
    config: &ScenarioConfig,
    market: &Market,
    agent_id: usize,
) -> Result<Vec<Record>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(agent_id as u64);
    let model = &config.wealth;
    let initial = model.initial.sample(&mut rng)?;

    let mut state = AgentState::initial(wealth_for(model, initial), market.prices[0]);
    let mut window: Vec<SubstitutionRates> = Vec::new();
    let mut records = Vec::with_capacity(config.n_periods);

    for t in 1..=config.n_periods {
        let total = if t == 1 {
            initial
        } else {
            let credit = if model.credit_returns {
                market.returns[t - 1]
                    * state.current_alloc[FactorId::Investment]
                    * state.prices[FactorId::Investment]
            } else {
                0.0
            };
            (state.wealth.total * (1.0 + model.growth) + credit).max(0.0)
        };

        let mut staged = AgentState {
            wealth: wealth_for(model, total),
            prices: market.prices[t - 1],
            period_index: t as u64,
            ..state.clone()
        };
        for shock in config.shocks.iter().filter(|s| s.period == t as u64) {
            staged = apply_shock(&staged, shock);
        }
        let prev = AgentState {
            regret_memory: staged.regret_memory,
            ..state
        };
        state = step_recursion(&config.policy, &prev, staged.wealth, staged.prices)?;

        let rates = if config.record_rates {
            let ctx = PeriodContext::from_state(&state);
            window.push(all_rates(&config.policy, &state, &ctx, &config.bump)?);
            if window.len() > config.rate_window {
                window.remove(0);
            }
            average_rates(&window)
        } else {
            None
        };

        records.push(Record {
            agent_id,
            period: state.period_index,
            wealth: state.wealth,
            prices: state.prices,
            alloc: state.current_alloc,
            prior_alloc: state.prior_alloc,
            regret_memory: state.regret_memory,
            rates,
        });
    }
    Ok(records)
}

/// Evaluates a policy over evenly spaced period-wealth values, everything
/// else fixed.
///
/// Shocks carried by `ctx` act as thresholds along the sweep: a shock whose
/// `period` is `k` hits every point with index `k` or later (points are
/// numbered from 0). Each point is reported at its nominal wealth.
pub fn sweep_wealth<P: Policy + ?Sized>(
    policy: &P,
    state: &AgentState,
    ctx: &PeriodContext,
    w_min: f64,
    w_max: f64,
    steps: usize,
) -> Result<Vec<(f64, AllocationVector)>> {
    let mut v = Vec::new();
    if !(w_min.is_finite() && w_max.is_finite() && w_min < w_max) {
        v.push(Violation::new("sweep", "w_min < w_max"));
    }
    if steps < 3 {
        v.push(Violation::new("sweep.steps", "steps ≥ 3"));
    }
    Error::check(v)?;

    (0..steps)
        .map(|k| {
            let w = w_min + (w_max - w_min) * k as f64 / (steps - 1) as f64;
            let mut point = AgentState {
                wealth: Wealth {
                    period: w,
                    ..state.wealth
                },
                prices: ctx.prices,
                ..state.clone()
            };
            for shock in ctx.shocks.iter().filter(|s| s.period <= k as u64) {
                point = apply_shock(&point, shock);
            }
            let point_ctx = PeriodContext::new(point.prices, point.wealth.period);
            Ok((w, policy.allocate(&point, &point_ctx)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::FixedSharePolicy;

    fn income_loss(m: f64, period: u64) -> Shock {
        Shock {
            kind: ShockKind::IncomeLoss,
            target: ShockTarget::Wealth,
            magnitude: m,
            period,
        }
    }

    fn base_state() -> AgentState {
        AgentState::initial(Wealth::all(100.0), UnitPrices::splat(2.0))
    }

    #[test]
    fn zero_shock_is_identity() {
        let s = base_state();
        for kind in [
            ShockKind::IncomeLoss,
            ShockKind::Layoff,
            ShockKind::HealthEvent,
        ] {
            let shock = Shock {
                kind,
                ..income_loss(0.0, 0)
            };
            assert_eq!(apply_shock(&s, &shock), s);
        }
        let jump = Shock {
            kind: ShockKind::PriceJump,
            target: ShockTarget::Factor(FactorId::Housing),
            magnitude: 0.0,
            period: 0,
        };
        assert_eq!(apply_shock(&s, &jump), s);
    }

    #[test]
    fn income_loss_halves_period_wealth() {
        let out = apply_shock(&base_state(), &income_loss(-0.5, 0));
        assert_eq!(out.wealth.period, 50.0);
        assert_eq!(out.wealth.total, 100.0);
    }

    #[test]
    fn price_jump_doubles_housing() {
        let jump = Shock {
            kind: ShockKind::PriceJump,
            target: ShockTarget::Factor(FactorId::Housing),
            magnitude: 1.0,
            period: 0,
        };
        let out = apply_shock(&base_state(), &jump);
        assert_eq!(out.prices[FactorId::Housing], 4.0);
        assert_eq!(out.prices[FactorId::Consumption], 2.0);
    }

    #[test]
    fn health_event_hits_wealth_and_regret() {
        let shock = Shock {
            kind: ShockKind::HealthEvent,
            ..income_loss(-0.2, 0)
        };
        let out = apply_shock(&base_state(), &shock);
        assert_eq!(out.wealth, Wealth::all(80.0));
        assert_eq!(out.regret_memory, 0.2);
    }

    #[test]
    fn windfall_keeps_wealth_ordering() {
        let mut s = base_state();
        s.wealth = Wealth::new(100.0, 80.0, 60.0);
        let out = apply_shock(&s, &income_loss(1.0, 0));
        assert_eq!(out.wealth.period, 120.0);
        assert!(out.wealth.violations().is_empty());
    }

    #[test]
    fn shock_validation() {
        assert_eq!(
            income_loss(-1.5, 1).violations("shocks[0]")[0].message,
            "magnitude > -1"
        );
        let bad = Shock {
            kind: ShockKind::PriceJump,
            ..income_loss(0.1, 1)
        };
        assert_eq!(bad.violations("s").len(), 1);
        let target: ShockTarget = "housing".to_string().try_into().unwrap();
        assert_eq!(target, ShockTarget::Factor(FactorId::Housing));
        assert!(ShockTarget::try_from("roof".to_string()).is_err());
    }

    #[test]
    fn single_symmetric_record() {
        let config = ScenarioConfig {
            policy: AllocationPolicy::memoryless(2.0),
            wealth: WealthModel {
                initial: WealthDistribution::fixed(60.0),
                ..WealthModel::default()
            },
            ..ScenarioConfig::default()
        };
        let t = run_scenario(&config).unwrap();
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.records[0].period, 1);
        for (_, q) in t.records[0].alloc.iter() {
            assert!((q - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_config_lists_fields() {
        let config = ScenarioConfig {
            n_agents: 0,
            shocks: vec![income_loss(-2.0, 1)],
            ..ScenarioConfig::default()
        };
        match run_scenario(&config) {
            Err(Error::Invalid(v)) => {
                let fields: Vec<_> = v.iter().map(|x| x.field.as_str()).collect();
                assert!(fields.contains(&"agents"));
                assert!(fields.contains(&"shocks[0].magnitude"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_series_rejected() {
        let mut config = ScenarioConfig {
            n_periods: 3,
            ..ScenarioConfig::default()
        };
        config.prices[0] = PathSpec::Series {
            values: vec![1.0, 1.0],
        };
        assert!(config
            .violations()
            .iter()
            .any(|v| v.field == "prices.c.values"));
    }

    #[test]
    fn negative_price_draw_is_numeric_failure() {
        let mut config = ScenarioConfig {
            n_periods: 50,
            ..ScenarioConfig::default()
        };
        config.prices[1] = PathSpec::Normal { mean: 0.0, sd: 1.0 };
        assert!(matches!(run_scenario(&config), Err(Error::Numeric(_))));
    }

    #[test]
    fn drift_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v = PathSpec::Drift {
            start: 2.0,
            rate: 0.5,
        }
        .realize(3, &mut rng)
        .unwrap();
        assert_eq!(v, vec![2.0, 3.0, 4.5]);
    }

    #[test]
    fn sweep_point_count_and_linearity() {
        let policy = FixedSharePolicy::uniform();
        let s = base_state();
        let ctx = PeriodContext::new(UnitPrices::splat(1.0), 10.0);
        let curve = sweep_wealth(&policy, &s, &ctx, 0.0, 60.0, 3).unwrap();
        assert_eq!(curve.len(), 3);
        let curve = sweep_wealth(&policy, &s, &ctx, 0.0, 60.0, 7).unwrap();
        let d: Vec<f64> = curve.windows(2).map(|w| w[1].1.v() - w[0].1.v()).collect();
        for x in &d {
            assert!((x - d[0]).abs() < 1e-12);
        }
        assert!(sweep_wealth(&policy, &s, &ctx, 5.0, 5.0, 3).is_err());
        assert!(sweep_wealth(&policy, &s, &ctx, 0.0, 5.0, 2).is_err());
    }

    #[test]
    fn sweep_shock_applies_from_its_index() {
        let policy = FixedSharePolicy::uniform();
        let mut ctx = PeriodContext::new(UnitPrices::splat(1.0), 10.0);
        ctx.shocks.push(Shock {
            kind: ShockKind::Layoff,
            ..income_loss(-0.5, 2)
        });
        let curve = sweep_wealth(&policy, &base_state(), &ctx, 6.0, 30.0, 5).unwrap();
        let v: Vec<f64> = curve.iter().map(|(_, a)| a.v()).collect();
        assert_eq!(v, vec![1.0, 2.0, 1.5, 2.0, 2.5]);
    }
}
