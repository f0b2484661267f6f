//! Periodic allocation of finite wealth across six factors (Consumption,
//! Taxes, Investment, Leisure, Intangibles, Housing), with substitution
//! metrics, an EIS estimator, the savings-utility integral, a multi-agent
//! scenario simulator and property probes.

pub mod allocation;
pub mod diagnostics;
pub mod domain;
pub mod eis;
pub mod error;
pub mod savings;
pub mod scenario;
pub mod substitution;

pub use allocation::{
    allocation_cost, apply_policy, budget_residual, regret_penalty, step_recursion,
    AllocationPolicy, FixedSharePolicy, PeriodContext, Policy,
};
pub use diagnostics::{
    probe_nonadditive, probe_nonmonotonic, probe_recursive, ProbeReport, Witness,
};
pub use domain::{
    closure_tolerance, mrijs_from_sum, validate_state, AgentState, AllocationVector, FactorId,
    RecursionCoefficients, SubstitutionRates, UnitPrices, Violation, Wealth, FACTOR_COUNT,
};
pub use eis::{crra_euler_oracle, estimate_eis, EisEstimate};
pub use error::{Error, Result};
pub use savings::{integrand, savings_utility, ProfilePath, PvComponents, SavingsProfile};
pub use scenario::{
    apply_shock, run_scenario, run_scenario_with, sweep_wealth, PathSpec, ScenarioConfig, Schedule,
    Shock, ShockKind, ShockTarget, Trajectory, WealthDistribution, WealthModel,
};
pub use substitution::{all_rates, marginal_rate, BumpSpec, Scheme};
