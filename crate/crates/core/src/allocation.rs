//! Budget identity, residual solves and the reference allocation policy.
//!
//! # Reference policy
//!
//! Each period the agent splits period wealth `w` into spending shares and
//! converts shares into quantities at current unit prices. For factor `f`
//! with base weight `β_f`, persistence coefficient `π_f` and curvature `κ_f`:
//!
//! ```text
//! σ_f      = p_f·q⁻_f / Σ_g p_g·q⁻_g             prior spending share at today's prices
//!                                               (negative spending clipped to 0 unless `signed`;
//!                                               σ = β when the prior basket costs nothing)
//! damp     = 1 / (1 + regret_weight · regret_memory)
//! anchor_f = β_f + π_f · damp · (σ_f − β_f)      persistence blend, eroded by regret
//! u        = |w| / W_T                           fraction of Total Wealth spent this period (0 if W_T = 0)
//! m_f      = (1 + 6·β_f·u)^(1 − κ_f)             diminishing-returns term
//! score_f  = anchor_f · m_f                      (clipped at 0 unless `signed`)
//! share_f  = score_f / Σ_g score_g               (β when the scores sum to zero)
//! q_f      = share_f · w / p_f
//! ```
//!
//! Because the shares sum to one, `Σ p_f q_f = w` up to rounding: every
//! allocation the policy emits is budget-closed. With `κ ≡ 1` the shares do not
//! depend on `w` and the policy is linear in period wealth; any other curvature
//! together with non-uniform base weights makes it non-additive. Persistence
//! makes it depend on the previous allocation, and `u` makes it depend on
//! Total Wealth.

use serde::{Deserialize, Serialize};

use crate::domain::{
    AgentState, AllocationVector, FactorId, RecursionCoefficients, UnitPrices, Violation, Wealth,
    FACTOR_COUNT,
};
use crate::error::{Error, Result};
use crate::scenario::Shock;

/// Anything that maps a state and a period's market conditions to an allocation.
pub trait Policy: Sync {
    fn allocate(&self, state: &AgentState, ctx: &PeriodContext) -> Result<AllocationVector>;
}

impl<P: Policy + ?Sized> Policy for &P {
    fn allocate(&self, state: &AgentState, ctx: &PeriodContext) -> Result<AllocationVector> {
        (**self).allocate(state, ctx)
    }
}

/// Market conditions for one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodContext {
    pub prices: UnitPrices,
    /// `w_t`, the wealth to allocate this period.
    pub period_wealth: f64,
    #[serde(default)]
    pub shocks: Vec<Shock>,
}

impl PeriodContext {
    pub fn new(prices: UnitPrices, period_wealth: f64) -> Self {
        PeriodContext {
            prices,
            period_wealth,
            shocks: Vec::new(),
        }
    }

    pub fn with_wealth(&self, period_wealth: f64) -> Self {
        PeriodContext {
            period_wealth,
            ..self.clone()
        }
    }

    /// Context matching the state's own prices and period wealth.
    pub fn from_state(state: &AgentState) -> Self {
        PeriodContext::new(state.prices, state.wealth.period)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.prices.violations();
        if !self.period_wealth.is_finite() {
            out.push(Violation::new(
                "PeriodContext.period_wealth",
                "must be finite",
            ));
        }
        out
    }
}

/// `v·c + y·t + x·i + z·l + s·b + r·h`.
pub fn allocation_cost(alloc: &AllocationVector, prices: &UnitPrices) -> f64 {
    FactorId::ALL.iter().map(|&f| alloc[f] * prices[f]).sum()
}

/// Quantity of `target` that makes `alloc` spend exactly `wealth_period`,
/// holding the other five quantities fixed.
pub fn budget_residual(
    target: FactorId,
    wealth_period: f64,
    prices: &UnitPrices,
    alloc: &AllocationVector,
) -> Result<f64> {
    let price = prices[target];
    if !(price.is_finite() && price > 0.0) {
        return Err(Error::DegenerateBudget(target));
    }
    let others: f64 = FactorId::ALL
        .iter()
        .filter(|&&f| f != target)
        .map(|&f| alloc[f] * prices[f])
        .sum();
    Ok((wealth_period - others) / price)
}

/// Price-weighted squared gap between two allocations, normalised by the
/// wealth the ex-post best allocation spends (by 1 when that is zero).
/// Zero exactly when the allocations coincide.
pub fn regret_penalty(
    chosen: &AllocationVector,
    best_expost: &AllocationVector,
    prices: &UnitPrices,
) -> f64 {
    let gap: f64 = FactorId::ALL
        .iter()
        .map(|&f| prices[f] * (chosen[f] - best_expost[f]).powi(2))
        .sum();
    let wealth = allocation_cost(best_expost, prices).abs();
    let norm = if wealth > 0.0 { wealth } else { 1.0 };
    gap / norm
}

/// The reference regret-augmented allocation policy (see module docs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPolicy {
    /// Target spending shares, non-negative and summing to 1.
    pub base_weights: [f64; FACTOR_COUNT],
    pub persistence: RecursionCoefficients,
    /// Utility-units per regret-unit.
    pub regret_weight: f64,
    pub curvature: [f64; FACTOR_COUNT],
    /// Allow negative shares (borrowing / deferral). Off by default.
    #[serde(default)]
    pub signed: bool,
}

impl Default for AllocationPolicy {
    fn default() -> Self {
        AllocationPolicy {
            base_weights: [1.0 / FACTOR_COUNT as f64; FACTOR_COUNT],
            persistence: RecursionCoefficients::default(),
            regret_weight: 1.0,
            curvature: [2.0; FACTOR_COUNT],
            signed: false,
        }
    }
}

impl AllocationPolicy {
    /// Uniform, memoryless, regret-free policy with the given curvature.
    pub fn memoryless(curvature: f64) -> Self {
        AllocationPolicy {
            persistence: RecursionCoefficients::uniform(0.0),
            regret_weight: 0.0,
            curvature: [curvature; FACTOR_COUNT],
            ..AllocationPolicy::default()
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut sum = 0.0;
        for f in FactorId::ALL {
            let w = self.base_weights[f.index()];
            if !(w.is_finite() && w >= 0.0) {
                out.push(Violation::new(
                    format!("policy.base_weights.{f}"),
                    "must be ≥ 0",
                ));
            }
            sum += w;
            let k = self.curvature[f.index()];
            if !(k.is_finite() && k > 0.0) {
                out.push(Violation::new(
                    format!("policy.curvature.{f}"),
                    "must be > 0",
                ));
            }
        }
        if (sum - 1.0).abs() > 1e-12 {
            out.push(Violation::new("policy.base_weights", "must sum to 1"));
        }
        out.extend(self.persistence.violations());
        if !(self.regret_weight.is_finite() && self.regret_weight >= 0.0) {
            out.push(Violation::new("policy.regret_weight", "must be ≥ 0"));
        }
        out
    }

    /// The allocation the agent would pick with no persistence and no regret:
    /// base shares of period wealth. Serves as the ex-post benchmark for regret.
    pub fn target_allocation(&self, ctx: &PeriodContext) -> AllocationVector {
        let mut out = AllocationVector::ZERO;
        for f in FactorId::ALL {
            out[f] = self.base_weights[f.index()] * ctx.period_wealth / ctx.prices[f];
        }
        out
    }

    fn prior_shares(&self, prior: &AllocationVector, prices: &UnitPrices) -> [f64; FACTOR_COUNT] {
        let spend = FactorId::ALL.map(|f| {
            let s = prior[f] * prices[f];
            if self.signed {
                s
            } else {
                s.max(0.0)
            }
        });
        let total: f64 = spend.iter().sum();
        let usable = if self.signed {
            total.abs() > f64::EPSILON
        } else {
            total > 0.0
        };
        if usable && total.is_finite() {
            spend.map(|s| s / total)
        } else {
            self.base_weights
        }
    }

    /// Normalised spending shares for this period.
    pub fn shares(&self, state: &AgentState, ctx: &PeriodContext) -> [f64; FACTOR_COUNT] {
        let prior = self.prior_shares(&state.prior_alloc, &ctx.prices);
        let damp = 1.0 / (1.0 + self.regret_weight * state.regret_memory);
        let total = state.wealth.total;
        let spent = if total > 0.0 {
            ctx.period_wealth.abs() / total
        } else {
            0.0
        };

        let mut scores = [0.0; FACTOR_COUNT];
        for f in FactorId::ALL {
            let i = f.index();
            let base = self.base_weights[i];
            let anchor = base + self.persistence.for_factor(f) * damp * (prior[i] - base);
            let intensity = 1.0 + FACTOR_COUNT as f64 * base * spent;
            let score = anchor * intensity.powf(1.0 - self.curvature[i]);
            scores[i] = if self.signed { score } else { score.max(0.0) };
        }

        let sum: f64 = scores.iter().sum();
        let usable = if self.signed {
            sum.abs() > f64::EPSILON
        } else {
            sum > 0.0
        };
        if usable && sum.is_finite() {
            scores.map(|s| s / sum)
        } else {
            self.base_weights
        }
    }
}

impl Policy for AllocationPolicy {
    fn allocate(&self, state: &AgentState, ctx: &PeriodContext) -> Result<AllocationVector> {
        apply_policy(self, state, ctx)
    }
}

/// Runs the reference policy for one period.
pub fn apply_policy(
    policy: &AllocationPolicy,
    state: &AgentState,
    ctx: &PeriodContext,
) -> Result<AllocationVector> {
    let mut violations = policy.violations();
    violations.extend(ctx.violations());
    Error::check(violations)?;

    let shares = policy.shares(state, ctx);
    let mut out = AllocationVector::ZERO;
    for f in FactorId::ALL {
        out[f] = shares[f.index()] * ctx.period_wealth / ctx.prices[f];
    }
    Ok(out)
}

/// Advances the recursion one period: the old allocation becomes the prior,
/// the policy picks the new one under `next_wealth`/`next_prices`, and the
/// regret of that pick against the undistorted target is added to memory.
pub fn step_recursion(
    policy: &AllocationPolicy,
    state: &AgentState,
    next_wealth: Wealth,
    next_prices: UnitPrices,
) -> Result<AgentState> {
    let mut next = AgentState {
        wealth: next_wealth,
        prices: next_prices,
        current_alloc: AllocationVector::ZERO,
        prior_alloc: state.current_alloc,
        regret_memory: state.regret_memory,
        period_index: state.period_index + 1,
        budget_closed: false,
    };
    let ctx = PeriodContext::new(next_prices, next_wealth.period);
    let alloc = apply_policy(policy, &next, &ctx)?;
    let best = policy.target_allocation(&ctx);
    next.regret_memory += regret_penalty(&alloc, &best, &next_prices);
    next.current_alloc = alloc;
    next.budget_closed = true;
    Ok(next)
}

/// Fixed spending shares regardless of history: linear in period wealth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSharePolicy {
    pub shares: [f64; FACTOR_COUNT],
}

impl FixedSharePolicy {
    pub fn uniform() -> Self {
        FixedSharePolicy {
            shares: [1.0 / FACTOR_COUNT as f64; FACTOR_COUNT],
        }
    }
}

impl Policy for FixedSharePolicy {
    fn allocate(&self, _state: &AgentState, ctx: &PeriodContext) -> Result<AllocationVector> {
        Error::check(ctx.violations())?;
        let mut out = AllocationVector::ZERO;
        for f in FactorId::ALL {
            out[f] = self.shares[f.index()] * ctx.period_wealth / ctx.prices[f];
        }
        Ok(out)
    }
}
