//! Shared fixtures for the criterion benchmarks.

use uiwd_core::{
    AgentState, AllocationPolicy, AllocationVector, PathSpec, PeriodContext, ScenarioConfig,
    UnitPrices, Wealth, WealthDistribution, WealthModel,
};

pub fn skewed_policy() -> AllocationPolicy {
    AllocationPolicy {
        base_weights: [0.3, 0.1, 0.2, 0.15, 0.1, 0.15],
        ..AllocationPolicy::default()
    }
}

/// Budget-closed state with a non-trivial prior allocation.
pub fn closed_state() -> (AgentState, PeriodContext) {
    let prices = UnitPrices::new(1.0, 1.2, 0.8, 1.0, 2.0, 1.5);
    let policy = skewed_policy();
    let mut state = AgentState::initial(Wealth::new(500.0, 400.0, 60.0), prices);
    state.prior_alloc = AllocationVector::new(20.0, 5.0, 10.0, 8.0, 2.0, 6.0);
    let ctx = PeriodContext::from_state(&state);
    state.current_alloc = uiwd_core::apply_policy(&policy, &state, &ctx).expect("valid fixture");
    state.budget_closed = true;
    (state, ctx)
}

pub fn scenario(n_agents: usize, n_periods: usize, record_rates: bool) -> ScenarioConfig {
    let mut config = ScenarioConfig {
        n_agents,
        n_periods,
        policy: skewed_policy(),
        wealth: WealthModel {
            initial: WealthDistribution::Lognormal {
                mu: 6.0,
                sigma: 0.5,
            },
            period_fraction: 0.1,
            growth: 0.01,
            ..WealthModel::default()
        },
        record_rates,
        seed: 7,
        ..ScenarioConfig::default()
    };
    config.prices[2] = PathSpec::Drift {
        start: 1.0,
        rate: 0.002,
    };
    config
}
