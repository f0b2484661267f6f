//! Marginal rates of substitution between factors and the joint index (MRIJS).
//!
//! For a target factor with quantity `q`, the rate is
//!
//! ```text
//! rate = ∂q/∂w − Σ_{j ≠ target} ∂q/∂q_j
//! ```
//!
//! Policies are black boxes, so every derivative is a finite difference:
//!
//! * `∂q/∂w` bumps the period wealth by `h = relative_step · max(1, |w|)` and
//!   re-applies the policy.
//! * `∂q/∂q_j` raises factor `j` by `h_j = relative_step · max(1, |q_j|)`
//!   units while wealth stays fixed. Those units are paid for at `j`'s price,
//!   so the policy is re-applied with `p_j · h_j` less wealth to allocate and
//!   the induced change in `q` is measured.

use serde::{Deserialize, Serialize};

use crate::allocation::{PeriodContext, Policy};
use crate::domain::{
    AgentState, AllocationVector, FactorId, SubstitutionRates, Violation, FACTOR_COUNT,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Central,
    Forward,
}

/// Finite-difference step configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub relative_step: f64,
    pub scheme: Scheme,
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec {
            relative_step: 1e-4,
            scheme: Scheme::Central,
        }
    }
}

impl BumpSpec {
    pub fn central(relative_step: f64) -> Self {
        BumpSpec {
            relative_step,
            scheme: Scheme::Central,
        }
    }

    pub fn forward(relative_step: f64) -> Self {
        BumpSpec {
            relative_step,
            scheme: Scheme::Forward,
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        if self.relative_step > 0.0 && self.relative_step < 0.1 {
            Vec::new()
        } else {
            vec![Violation::new(
                "BumpSpec.relative_step",
                "relative_step ∈ (0, 0.1)",
            )]
        }
    }
}

/// All first derivatives of the policy's allocation at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivities {
    /// `wealth[f] = ∂q_f/∂w`
    pub wealth: [f64; FACTOR_COUNT],
    /// `cross[j][f] = ∂q_f/∂q_j` (diagonal unused, left at zero)
    pub cross: [[f64; FACTOR_COUNT]; FACTOR_COUNT],
}

impl Sensitivities {
    pub fn rate(&self, target: FactorId) -> f64 {
        let t = target.index();
        let mut rate = self.wealth[t];
        for j in FactorId::ALL {
            if j != target {
                rate -= self.cross[j.index()][t];
            }
        }
        rate
    }
}

fn check_point(state: &AgentState, bump: &BumpSpec) -> Result<()> {
    Error::check(bump.violations())?;
    if !state.is_budget_closed() {
        return Err(Error::NotBudgetClosed {
            cost: crate::allocation::allocation_cost(&state.current_alloc, &state.prices),
            period_wealth: state.wealth.period,
        });
    }
    Ok(())
}

/// Finite-difference derivatives of every quantity with respect to period
/// wealth and to every other quantity.
pub fn sensitivities<P: Policy + ?Sized>(
    policy: &P,
    state: &AgentState,
    ctx: &PeriodContext,
    bump: &BumpSpec,
) -> Result<Sensitivities> {
    check_point(state, bump)?;
    let w = ctx.period_wealth;
    let eval = |wealth: f64| -> Result<AllocationVector> {
        policy.allocate(state, &ctx.with_wealth(wealth))
    };
    let base = match bump.scheme {
        Scheme::Forward => Some(eval(w)?),
        Scheme::Central => None,
    };

    // d(allocation) for a wealth shift of `+shift` divided by `step`.
    let slope = |shift: f64, step: f64| -> Result<[f64; FACTOR_COUNT]> {
        let up = eval(w + shift)?;
        let (down, span) = match &base {
            Some(b) => (*b, step),
            None => (eval(w - shift)?, 2.0 * step),
        };
        Ok(FactorId::ALL.map(|f| (up[f] - down[f]) / span))
    };

    let h = bump.relative_step * w.abs().max(1.0);
    let wealth = slope(h, h)?;

    let mut cross = [[0.0; FACTOR_COUNT]; FACTOR_COUNT];
    for j in FactorId::ALL {
        let hj = bump.relative_step * state.current_alloc[j].abs().max(1.0);
        // Buying hj more units of j leaves p_j·hj less wealth for the policy.
        let d = slope(-ctx.prices[j] * hj, hj)?;
        cross[j.index()] = d;
    }
    Ok(Sensitivities { wealth, cross })
}

/// Rate of substitution of `factor` with respect to the other five.
pub fn marginal_rate<P: Policy + ?Sized>(
    factor: FactorId,
    policy: &P,
    state: &AgentState,
    ctx: &PeriodContext,
    bump: &BumpSpec,
) -> Result<f64> {
    Ok(sensitivities(policy, state, ctx, bump)?.rate(factor))
}

/// All six rates plus MRIJS.
pub fn all_rates<P: Policy + ?Sized>(
    policy: &P,
    state: &AgentState,
    ctx: &PeriodContext,
    bump: &BumpSpec,
) -> Result<SubstitutionRates> {
    let s = sensitivities(policy, state, ctx, bump)?;
    Ok(SubstitutionRates::from_factor_rates(
        FactorId::ALL.map(|f| s.rate(f)),
    ))
}

/// Arithmetic mean of per-period rates, with MRIJS recomputed from the mean
/// rates. `None` for an empty window.
pub fn average_rates(window: &[SubstitutionRates]) -> Option<SubstitutionRates> {
    if window.is_empty() {
        return None;
    }
    let n = window.len() as f64;
    let mut acc = [0.0; FACTOR_COUNT];
    for r in window {
        for (a, v) in acc.iter_mut().zip(r.factor_rates()) {
            *a += v;
        }
    }
    Some(SubstitutionRates::from_factor_rates(acc.map(|a| a / n)))
}
