//! Domain types shared by every part of the model.
//!
//! Symbol map (the published notation reuses letters, so fields are named by role):
//!
//! | factor       | quantity | unit price | persistence coefficient |
//! |--------------|----------|------------|-------------------------|
//! | Consumption  | `v`      | `c`        | `b`                     |
//! | Taxes        | `y`      | `t`        | `d`                     |
//! | Investment   | `x`      | `i`        | `a`                     |
//! | Leisure      | `z`      | `l`        | `e`                     |
//! | Intangibles  | `s`      | `b`        | `j`                     |
//! | Housing      | `r`      | `h`        | `k`                     |
//!
//! The tax price `t` is never calendar time and the housing quantity `r` is never
//! a discount rate; both meanings get their own field names elsewhere.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// Number of allocation factors.
pub const FACTOR_COUNT: usize = 6;

/// Relative tolerance used for budget closure: `1e-9 · max(1, |w|)`.
pub fn closure_tolerance(period_wealth: f64) -> f64 {
    1e-9 * period_wealth.abs().max(1.0)
}

/// One of the six allocation domains. Iteration order is always
/// Consumption, Taxes, Investment, Leisure, Intangibles, Housing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorId {
    Consumption,
    Taxes,
    Investment,
    Leisure,
    Intangibles,
    Housing,
}

impl FactorId {
    pub const ALL: [FactorId; FACTOR_COUNT] = [
        FactorId::Consumption,
        FactorId::Taxes,
        FactorId::Investment,
        FactorId::Leisure,
        FactorId::Intangibles,
        FactorId::Housing,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FactorId::Consumption => "consumption",
            FactorId::Taxes => "taxes",
            FactorId::Investment => "investment",
            FactorId::Leisure => "leisure",
            FactorId::Intangibles => "intangibles",
            FactorId::Housing => "housing",
        }
    }

    /// Symbol of the allocated quantity (`v, y, x, z, s, r`).
    pub fn quantity_symbol(self) -> &'static str {
        ["v", "y", "x", "z", "s", "r"][self.index()]
    }

    /// Symbol of the unit price (`c, t, i, l, b, h`).
    pub fn price_symbol(self) -> &'static str {
        ["c", "t", "i", "l", "b", "h"][self.index()]
    }

    pub fn from_name(name: &str) -> Option<FactorId> {
        FactorId::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for FactorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A failed invariant. Violations are data: validation never errors, it reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

macro_rules! factor_array {
    ($name:ident) => {
        impl Index<FactorId> for $name {
            type Output = f64;
            fn index(&self, f: FactorId) -> &f64 {
                &self.0[f.index()]
            }
        }

        impl IndexMut<FactorId> for $name {
            fn index_mut(&mut self, f: FactorId) -> &mut f64 {
                &mut self.0[f.index()]
            }
        }

        impl From<[f64; FACTOR_COUNT]> for $name {
            fn from(v: [f64; FACTOR_COUNT]) -> Self {
                $name(v)
            }
        }

        impl $name {
            pub fn as_array(&self) -> &[f64; FACTOR_COUNT] {
                &self.0
            }

            pub fn iter(&self) -> impl Iterator<Item = (FactorId, f64)> + '_ {
                FactorId::ALL.into_iter().map(move |f| (f, self[f]))
            }

            /// Copy with one entry replaced.
            pub fn with(&self, f: FactorId, value: f64) -> Self {
                let mut out = *self;
                out[f] = value;
                out
            }
        }
    };
}

/// Quantities `(v, y, x, z, s, r)` allocated to each factor in one period, in
/// factor-units. Entries may be negative (borrowing, tax deferral).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AllocationVector(pub [f64; FACTOR_COUNT]);

factor_array!(AllocationVector);

impl AllocationVector {
    pub const ZERO: AllocationVector = AllocationVector([0.0; FACTOR_COUNT]);

    pub fn new(v: f64, y: f64, x: f64, z: f64, s: f64, r: f64) -> Self {
        AllocationVector([v, y, x, z, s, r])
    }

    pub fn splat(q: f64) -> Self {
        AllocationVector([q; FACTOR_COUNT])
    }

    pub fn v(&self) -> f64 {
        self.0[0]
    }
    pub fn y(&self) -> f64 {
        self.0[1]
    }
    pub fn x(&self) -> f64 {
        self.0[2]
    }
    pub fn z(&self) -> f64 {
        self.0[3]
    }
    pub fn s(&self) -> f64 {
        self.0[4]
    }
    pub fn r(&self) -> f64 {
        self.0[5]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|q| q.is_finite())
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &AllocationVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn violations(&self, owner: &str, out: &mut Vec<Violation>) {
        for (f, q) in self.iter() {
            if !q.is_finite() {
                out.push(Violation::new(
                    format!("{owner}.{}", f.quantity_symbol()),
                    "must be finite",
                ));
            }
        }
    }
}

/// Per-unit cost `(c, t, i, l, b, h)` of each factor, in wealth-units per factor-unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPrices(pub [f64; FACTOR_COUNT]);

factor_array!(UnitPrices);

impl Default for UnitPrices {
    fn default() -> Self {
        UnitPrices::splat(1.0)
    }
}

impl UnitPrices {
    pub fn new(c: f64, t: f64, i: f64, l: f64, b: f64, h: f64) -> Self {
        UnitPrices([c, t, i, l, b, h])
    }

    pub fn splat(p: f64) -> Self {
        UnitPrices([p; FACTOR_COUNT])
    }

    pub fn violations(&self) -> Vec<Violation> {
        self.iter()
            .filter(|(_, p)| !(p.is_finite() && *p > 0.0))
            .map(|(f, _)| Violation::new(format!("UnitPrices.{}", f.price_symbol()), "must be > 0"))
            .collect()
    }
}

/// Wealth available to one agent.
///
/// `total` is Total Wealth (monetary and non-monetary folded into one scalar),
/// `investable` the part that can be allocated at all, and `period` the amount
/// allocated in the current budget period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wealth {
    pub total: f64,
    pub investable: f64,
    pub period: f64,
}

impl Wealth {
    pub fn new(total: f64, investable: f64, period: f64) -> Self {
        Wealth {
            total,
            investable,
            period,
        }
    }

    /// Everything is investable and allocated this period.
    pub fn all(amount: f64) -> Self {
        Wealth::new(amount, amount, amount)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, value) in [
            ("total", self.total),
            ("investable", self.investable),
            ("period", self.period),
        ] {
            if !value.is_finite() {
                out.push(Violation::new(format!("Wealth.{name}"), "must be finite"));
            }
        }
        if self.total < 0.0 {
            out.push(Violation::new("Wealth.total", "total ≥ 0"));
        }
        if self.investable < 0.0 {
            out.push(Violation::new("Wealth.investable", "investable ≥ 0"));
        }
        if self.investable > self.total {
            out.push(Violation::new("Wealth.investable", "investable ≤ total"));
        }
        if self.period > self.investable {
            out.push(Violation::new("Wealth.period", "period ≤ investable"));
        }
        out
    }
}

/// Persistence weights `a, b, d, e, j, k`: how strongly each factor's
/// allocation leans on its own share in the previous period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionCoefficients {
    /// Investment
    pub a: f64,
    /// Consumption
    pub b: f64,
    /// Taxes
    pub d: f64,
    /// Leisure
    pub e: f64,
    /// Intangibles
    pub j: f64,
    /// Housing
    pub k: f64,
}

impl Default for RecursionCoefficients {
    fn default() -> Self {
        RecursionCoefficients::uniform(0.5)
    }
}

impl RecursionCoefficients {
    pub fn uniform(w: f64) -> Self {
        RecursionCoefficients {
            a: w,
            b: w,
            d: w,
            e: w,
            j: w,
            k: w,
        }
    }

    pub fn for_factor(&self, f: FactorId) -> f64 {
        match f {
            FactorId::Consumption => self.b,
            FactorId::Taxes => self.d,
            FactorId::Investment => self.a,
            FactorId::Leisure => self.e,
            FactorId::Intangibles => self.j,
            FactorId::Housing => self.k,
        }
    }

    pub fn set(&mut self, f: FactorId, value: f64) {
        match f {
            FactorId::Consumption => self.b = value,
            FactorId::Taxes => self.d = value,
            FactorId::Investment => self.a = value,
            FactorId::Leisure => self.e = value,
            FactorId::Intangibles => self.j = value,
            FactorId::Housing => self.k = value,
        }
    }

    pub fn is_memoryless(&self) -> bool {
        FactorId::ALL.iter().all(|&f| self.for_factor(f) == 0.0)
    }

    pub fn violations(&self) -> Vec<Violation> {
        FactorId::ALL
            .iter()
            .filter(|&&f| !self.for_factor(f).is_finite())
            .map(|f| Violation::new(format!("RecursionCoefficients.{}", f), "must be finite"))
            .collect()
    }
}

/// Everything the allocation recursion carries from one period to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub wealth: Wealth,
    pub prices: UnitPrices,
    pub current_alloc: AllocationVector,
    pub prior_alloc: AllocationVector,
    /// Cumulated regret penalty, utility-units.
    pub regret_memory: f64,
    /// Discrete period within the time block.
    pub period_index: u64,
    /// When set, `current_alloc` must exactly spend `wealth.period`.
    pub budget_closed: bool,
}

impl AgentState {
    /// A fresh state with nothing allocated yet.
    pub fn initial(wealth: Wealth, prices: UnitPrices) -> Self {
        AgentState {
            wealth,
            prices,
            current_alloc: AllocationVector::ZERO,
            prior_alloc: AllocationVector::ZERO,
            regret_memory: 0.0,
            period_index: 0,
            budget_closed: false,
        }
    }

    /// Residual `allocation_cost(current_alloc) - wealth.period`.
    pub fn budget_gap(&self) -> f64 {
        crate::allocation::allocation_cost(&self.current_alloc, &self.prices) - self.wealth.period
    }

    pub fn is_budget_closed(&self) -> bool {
        self.budget_gap().abs() <= closure_tolerance(self.wealth.period)
    }
}

/// Checks every invariant of an [`AgentState`] and the values it contains.
/// An empty list means the state is valid.
pub fn validate_state(state: &AgentState) -> Vec<Violation> {
    let mut out = state.wealth.violations();
    out.extend(state.prices.violations());
    state
        .current_alloc
        .violations("AgentState.current_alloc", &mut out);
    state
        .prior_alloc
        .violations("AgentState.prior_alloc", &mut out);
    if !(state.regret_memory.is_finite() && state.regret_memory >= 0.0) {
        out.push(Violation::new(
            "AgentState.regret_memory",
            "regret_memory ≥ 0",
        ));
    }
    if state.budget_closed && !state.is_budget_closed() {
        out.push(Violation::new(
            "AgentState.current_alloc",
            format!(
                "allocation cost must equal period wealth (gap {})",
                state.budget_gap()
            ),
        ));
    }
    out
}

/// The six marginal rates of substitution and the joint index derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionRates {
    pub c_star: f64,
    pub l_star: f64,
    pub t_star: f64,
    pub i_star: f64,
    pub b_star: f64,
    pub h_star: f64,
    pub mrijs: f64,
}

/// `exp(min(0, -sum))`. Lies in `(0, 1]` for any finite sum.
pub fn mrijs_from_sum(rate_sum: f64) -> f64 {
    (-rate_sum).min(0.0).exp()
}

impl SubstitutionRates {
    /// Builds the rates from values in factor order and derives MRIJS.
    pub fn from_factor_rates(rates: [f64; FACTOR_COUNT]) -> Self {
        let [c, t, i, l, b, h] = rates;
        let mut out = SubstitutionRates {
            c_star: c,
            l_star: l,
            t_star: t,
            i_star: i,
            b_star: b,
            h_star: h,
            mrijs: 0.0,
        };
        out.mrijs = mrijs_from_sum(out.sum());
        out
    }

    pub fn rate(&self, f: FactorId) -> f64 {
        match f {
            FactorId::Consumption => self.c_star,
            FactorId::Taxes => self.t_star,
            FactorId::Investment => self.i_star,
            FactorId::Leisure => self.l_star,
            FactorId::Intangibles => self.b_star,
            FactorId::Housing => self.h_star,
        }
    }

    pub fn factor_rates(&self) -> [f64; FACTOR_COUNT] {
        FactorId::ALL.map(|f| self.rate(f))
    }

    /// `C* + L* + T* + I* + B* + H*`, summed in that order.
    pub fn sum(&self) -> f64 {
        self.c_star + self.l_star + self.t_star + self.i_star + self.b_star + self.h_star
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.mrijs > 0.0 && self.mrijs <= 1.0) {
            out.push(Violation::new("SubstitutionRates.mrijs", "mrijs ∈ (0, 1]"));
        }
        if (self.mrijs - mrijs_from_sum(self.sum())).abs() > 1e-12 {
            out.push(Violation::new(
                "SubstitutionRates.mrijs",
                "mrijs = exp(min(0, -sum of rates))",
            ));
        }
        out
    }
}
