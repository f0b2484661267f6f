use thiserror::Error;

use crate::domain::{FactorId, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The target factor's unit price is zero (or not positive), so the budget cannot be solved for it.
    #[error("degenerate budget: unit price of {0} must be > 0")]
    DegenerateBudget(FactorId),

    #[error("state is not budget-closed: allocation cost {cost} vs period wealth {period_wealth}")]
    NotBudgetClosed { cost: f64, period_wealth: f64 },

    #[error("invalid input: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Zero variance in the regressor: the slope (and hence the EIS) is not identified.
    #[error("EIS unidentified: {0}")]
    Unidentified(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("export failed: {0}")]
    Export(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid(vec![Violation::new(field, message)])
    }

    /// Returns `Err(Error::Invalid)` when the list is non-empty.
    pub fn check(violations: Vec<Violation>) -> Result<()> {
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(violations))
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
