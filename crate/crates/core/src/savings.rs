//! Utility of household savings:
//!
//! ```text
//! U_s = exp( ∫₀ᵗ (I_s − X_e − X_u − X_i − L_r + V_h − I_g − I_i) dt )
//! ```
//!
//! All components are present values supplied by the caller; the discount
//! rate travels with the profile as metadata and is not applied again.

use serde::{Deserialize, Serialize};

use crate::domain::Violation;
use crate::error::{Error, Result};

/// Default number of trapezoid intervals over the horizon.
pub const DEFAULT_INTERVALS: usize = 1000;

/// The eight present-value terms of the savings integrand.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PvComponents {
    /// `I_s`
    pub pv_savings: f64,
    /// `X_e`
    pub pv_expected_uncovered: f64,
    /// `X_u`
    pub pv_unexpected: f64,
    /// `X_i`
    pub pv_inflation: f64,
    /// `L_r`
    pub instability_regret: f64,
    /// `V_h`
    pub pv_home_equity: f64,
    /// `I_g`
    pub pv_gov_support: f64,
    /// `I_i`
    pub pv_insurance: f64,
}

impl PvComponents {
    /// `I_s − X_e − X_u − X_i − L_r + V_h − I_g − I_i`
    pub fn net(&self) -> f64 {
        self.pv_savings
            - self.pv_expected_uncovered
            - self.pv_unexpected
            - self.pv_inflation
            - self.instability_regret
            + self.pv_home_equity
            - self.pv_gov_support
            - self.pv_insurance
    }

    fn as_array(&self) -> [f64; 8] {
        [
            self.pv_savings,
            self.pv_expected_uncovered,
            self.pv_unexpected,
            self.pv_inflation,
            self.instability_regret,
            self.pv_home_equity,
            self.pv_gov_support,
            self.pv_insurance,
        ]
    }

    fn from_array(a: [f64; 8]) -> Self {
        PvComponents {
            pv_savings: a[0],
            pv_expected_uncovered: a[1],
            pv_unexpected: a[2],
            pv_inflation: a[3],
            instability_regret: a[4],
            pv_home_equity: a[5],
            pv_gov_support: a[6],
            pv_insurance: a[7],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// Pointwise `self + (other − self)·frac`.
    pub fn lerp(&self, other: &PvComponents, frac: f64) -> PvComponents {
        let a = self.as_array();
        let b = other.as_array();
        PvComponents::from_array(std::array::from_fn(|i| a[i] + (b[i] - a[i]) * frac))
    }
}

/// One point of a savings profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SavingsProfile {
    #[serde(flatten)]
    pub pv: PvComponents,
    /// Time to death, years.
    pub horizon_years: f64,
    pub discount_rate: f64,
}

impl SavingsProfile {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.horizon_years.is_finite() && self.horizon_years > 0.0) {
            out.push(Violation::new(
                "SavingsProfile.horizon_years",
                "must be > 0",
            ));
        }
        if !self.pv.is_finite() {
            out.push(Violation::new(
                "SavingsProfile",
                "all PV fields must be finite",
            ));
        }
        out
    }
}

pub fn integrand(profile: &SavingsProfile) -> f64 {
    profile.pv.net()
}

/// Components sampled on a uniform grid over `[0, horizon_years]`, linear
/// between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePath {
    pub horizon_years: f64,
    pub discount_rate: f64,
    samples: Vec<PvComponents>,
}

impl ProfilePath {
    /// Needs at least five samples so the step is at most a quarter of the horizon.
    pub fn new(horizon_years: f64, discount_rate: f64, samples: Vec<PvComponents>) -> Result<Self> {
        let mut v = Vec::new();
        if !(horizon_years.is_finite() && horizon_years > 0.0) {
            v.push(Violation::new("ProfilePath.horizon_years", "must be > 0"));
        }
        if samples.len() < 5 {
            v.push(Violation::new(
                "ProfilePath.samples",
                "grid step must be ≤ horizon/4 (at least 5 samples)",
            ));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            v.push(Violation::new(
                format!("ProfilePath.samples[{i}]"),
                "must be finite",
            ));
        }
        Error::check(v)?;
        Ok(ProfilePath {
            horizon_years,
            discount_rate,
            samples,
        })
    }

    /// Samples `f(t)` at `intervals + 1` evenly spaced times.
    pub fn from_fn(
        horizon_years: f64,
        discount_rate: f64,
        intervals: usize,
        f: impl Fn(f64) -> PvComponents,
    ) -> Result<Self> {
        let n = intervals.max(1);
        let samples = (0..=n)
            .map(|k| f(horizon_years * k as f64 / n as f64))
            .collect();
        ProfilePath::new(horizon_years, discount_rate, samples)
    }

    /// Every component ramps linearly from `start` at t = 0 to `end` at the horizon.
    pub fn linear(
        horizon_years: f64,
        discount_rate: f64,
        intervals: usize,
        start: PvComponents,
        end: PvComponents,
    ) -> Result<Self> {
        ProfilePath::from_fn(horizon_years, discount_rate, intervals, |t| {
            start.lerp(&end, t / horizon_years)
        })
    }

    pub fn grid_step(&self) -> f64 {
        self.horizon_years / (self.samples.len() - 1) as f64
    }

    pub fn samples(&self) -> &[PvComponents] {
        &self.samples
    }

    pub fn profile_at(&self, k: usize) -> Option<SavingsProfile> {
        self.samples.get(k).map(|pv| SavingsProfile {
            pv: *pv,
            horizon_years: self.horizon_years,
            discount_rate: self.discount_rate,
        })
    }

    /// Trapezoid integral of the integrand over the horizon.
    pub fn integral(&self) -> f64 {
        let values: Vec<f64> = self.samples.iter().map(PvComponents::net).collect();
        let n = values.len();
        let inner: f64 = values[1..n - 1].iter().sum();
        self.grid_step() * (0.5 * (values[0] + values[n - 1]) + inner)
    }
}

/// `exp` of the trapezoid integral; always strictly positive for finite
/// paths (it underflows to zero only for integrals below about −745).
pub fn savings_utility(path: &ProfilePath) -> f64 {
    path.integral().exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pv(is: f64) -> PvComponents {
        PvComponents {
            pv_savings: is,
            ..PvComponents::default()
        }
    }

    fn profile(pv: PvComponents) -> SavingsProfile {
        SavingsProfile {
            pv,
            horizon_years: 10.0,
            discount_rate: 0.03,
        }
    }

    #[test]
    fn integrand_signs() {
        assert_eq!(integrand(&profile(PvComponents::default())), 0.0);
        let p = PvComponents {
            pv_savings: 10.0,
            pv_home_equity: 5.0,
            ..PvComponents::default()
        };
        assert_eq!(integrand(&profile(p)), 15.0);
        let p = PvComponents {
            pv_savings: 10.0,
            pv_expected_uncovered: 3.0,
            pv_gov_support: 2.0,
            ..PvComponents::default()
        };
        assert_eq!(integrand(&profile(p)), 5.0);
        let all_negative = PvComponents {
            pv_unexpected: 1.0,
            pv_inflation: 1.0,
            instability_regret: 1.0,
            pv_insurance: 1.0,
            ..PvComponents::default()
        };
        assert_eq!(integrand(&profile(all_negative)), -4.0);
    }

    #[test]
    fn constant_integrand() {
        let path = ProfilePath::from_fn(10.0, 0.0, DEFAULT_INTERVALS, |_| pv(0.1)).unwrap();
        assert_relative_eq!(
            savings_utility(&path),
            std::f64::consts::E,
            max_relative = 1e-12
        );
    }

    #[test]
    fn zero_integrand_gives_one() {
        let path = ProfilePath::from_fn(5.0, 0.0, 10, |_| PvComponents::default()).unwrap();
        assert_eq!(savings_utility(&path), 1.0);
    }

    #[test]
    fn linear_ramp_is_exact() {
        let path = ProfilePath::linear(10.0, 0.02, 7, pv(0.0), pv(0.3)).unwrap();
        assert_relative_eq!(
            savings_utility(&path),
            (0.3f64 * 10.0 / 2.0).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn coarse_grids_rejected() {
        assert!(ProfilePath::new(1.0, 0.0, vec![pv(0.0); 4]).is_err());
        assert!(ProfilePath::new(0.0, 0.0, vec![pv(0.0); 5]).is_err());
        assert!(ProfilePath::new(1.0, 0.0, vec![pv(f64::NAN); 5]).is_err());
        let path = ProfilePath::new(1.0, 0.0, vec![pv(0.0); 5]).unwrap();
        assert_eq!(path.grid_step(), 0.25);
        assert_eq!(path.profile_at(0).unwrap().horizon_years, 1.0);
    }
}
