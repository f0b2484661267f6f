//! Constructive probes for three structural properties of an allocation
//! process: non-monotonicity in wealth, non-additivity in wealth, and
//! dependence on the previous period's allocation. Each probe passes by
//! exhibiting a witness and records enough input to re-derive its evidence.
//!
//! Exported reports are JSON arrays of objects with fields `name`, `passed`,
//! `evidence`, `threshold` and `witnesses`; each witness carries a `kind` tag.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::{AllocationPolicy, PeriodContext, Policy};
use crate::domain::{AgentState, AllocationVector, FactorId};
use crate::error::{Error, Result};

pub const NONMONOTONIC: &str = "nonmonotonic";
pub const NONADDITIVE: &str = "nonadditive";
pub const RECURSIVE: &str = "recursive";

/// Smallest additivity gap that counts as non-additive.
pub const ADDITIVITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// First differences of `factor` along the curve change sign at `indices`
    /// (index of the second difference in each flipping pair).
    SignChange {
        factor: FactorId,
        sign_changes: usize,
        indices: Vec<usize>,
    },
    /// `|alloc(w1) + alloc(w2) − alloc(w1 + w2)|` is largest in `factor`.
    AdditivityGap {
        w1: f64,
        w2: f64,
        factor: FactorId,
        gap: f64,
    },
    /// Raising the prior quantity of `perturbed` moved the allocation by `change`
    /// (max over coordinates).
    PriorDependence {
        perturbed: FactorId,
        perturbation: f64,
        change: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub name: String,
    pub passed: bool,
    pub evidence: f64,
    /// Evidence must exceed this for the probe to pass. The recursion probe on
    /// a memoryless policy is the exception: it passes when evidence is zero.
    pub threshold: f64,
    pub witnesses: Vec<Witness>,
}

pub fn write_reports_json<W: Write>(reports: &[ProbeReport], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, reports).map_err(|e| Error::Export(e.to_string()))?;
    writeln!(out).map_err(|e| Error::Export(e.to_string()))
}

/// Sign changes in the first differences of a series. Differences within
/// `1e-12 · max|value|` of zero are treated as flat and skipped.
pub fn sign_changes(values: &[f64]) -> Vec<usize> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    let mut out = Vec::new();
    let mut last_sign = 0.0;
    for (i, w) in values.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d.abs() <= tol {
            continue;
        }
        let sign = d.signum();
        if last_sign != 0.0 && sign != last_sign {
            out.push(i);
        }
        last_sign = sign;
    }
    out
}

/// Counts sign changes of each quantity's first differences along a wealth curve.
pub fn probe_nonmonotonic(curve: &[(f64, AllocationVector)]) -> Result<ProbeReport> {
    if curve.len() < 3 {
        return Err(Error::invalid("curve", "needs at least 3 points"));
    }
    let mut witnesses = Vec::new();
    let mut evidence = 0usize;
    for f in FactorId::ALL {
        let series: Vec<f64> = curve.iter().map(|(_, a)| a[f]).collect();
        let indices = sign_changes(&series);
        evidence = evidence.max(indices.len());
        if !indices.is_empty() {
            witnesses.push(Witness::SignChange {
                factor: f,
                sign_changes: indices.len(),
                indices,
            });
        }
    }
    Ok(ProbeReport {
        name: NONMONOTONIC.into(),
        passed: evidence >= 1,
        evidence: evidence as f64,
        threshold: 0.0,
        witnesses,
    })
}

/// Largest coordinate of `|alloc(w1) + alloc(w2) − alloc(w1 + w2)|`.
pub fn additivity_gap<P: Policy + ?Sized>(
    policy: &P,
    state: &AgentState,
    ctx: &PeriodContext,
    w1: f64,
    w2: f64,
) -> Result<(FactorId, f64)> {
    let a = policy.allocate(state, &ctx.with_wealth(w1))?;
    let b = policy.allocate(state, &ctx.with_wealth(w2))?;
    let c = policy.allocate(state, &ctx.with_wealth(w1 + w2))?;
    let mut best = (FactorId::Consumption, 0.0);
    for f in FactorId::ALL {
        let gap = (a[f] + b[f] - c[f]).abs();
        if gap > best.1 {
            best = (f, gap);
        }
    }
    Ok(best)
}

/// Draws `samples` wealth pairs uniformly from `[0, w)²`, where `w` is the
/// context's period wealth, and reports the largest additivity gap.
pub fn probe_nonadditive<P: Policy + ?Sized>(
    policy: &P,
    state: &AgentState,
    ctx: &PeriodContext,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if samples < 1 {
        return Err(Error::invalid("samples", "must be ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = ctx.period_wealth;
    let mut best: Option<Witness> = None;
    let mut evidence = -1.0;
    for _ in 0..samples {
        let w1 = rng.random::<f64>() * scale;
        let w2 = rng.random::<f64>() * scale;
        let (factor, gap) = additivity_gap(policy, state, ctx, w1, w2)?;
        if gap > evidence {
            evidence = gap;
            best = Some(Witness::AdditivityGap {
                w1,
                w2,
                factor,
                gap,
            });
        }
    }
    Ok(ProbeReport {
        name: NONADDITIVE.into(),
        passed: evidence > ADDITIVITY_THRESHOLD,
        evidence,
        threshold: ADDITIVITY_THRESHOLD,
        witnesses: best.into_iter().collect(),
    })
}

/// Max coordinate change after raising `prior_alloc[perturbed]` by `perturbation`.
pub fn prior_dependence<P: Policy + ?Sized>(
    policy: &P,
    state: &AgentState,
    ctx: &PeriodContext,
    perturbed: FactorId,
    perturbation: f64,
) -> Result<f64> {
    let base = policy.allocate(state, ctx)?;
    let mut moved = state.clone();
    moved.prior_alloc[perturbed] += perturbation;
    Ok(policy.allocate(&moved, ctx)?.max_abs_diff(&base))
}

/// Perturbs each prior quantity in turn. Passes when the allocation reacts
/// and the policy has persistence, or stays put and the policy is memoryless.
pub fn probe_recursive(
    policy: &AllocationPolicy,
    state: &AgentState,
    ctx: &PeriodContext,
    perturbation: f64,
) -> Result<ProbeReport> {
    if !state.is_budget_closed() {
        return Err(Error::NotBudgetClosed {
            cost: crate::allocation::allocation_cost(&state.current_alloc, &state.prices),
            period_wealth: state.wealth.period,
        });
    }
    if !(perturbation.is_finite() && perturbation >= 0.0) {
        return Err(Error::invalid("perturbation", "must be ≥ 0"));
    }
    let mut evidence = 0.0;
    let mut best = None;
    for f in FactorId::ALL {
        let change = prior_dependence(policy, state, ctx, f, perturbation)?;
        if change > evidence {
            evidence = change;
            best = Some(Witness::PriorDependence {
                perturbed: f,
                perturbation,
                change,
            });
        }
    }
    let passed = if policy.persistence.is_memoryless() {
        evidence == 0.0
    } else {
        evidence > 0.0
    };
    Ok(ProbeReport {
        name: RECURSIVE.into(),
        passed,
        evidence,
        threshold: 0.0,
        witnesses: best.into_iter().collect(),
    })
}
