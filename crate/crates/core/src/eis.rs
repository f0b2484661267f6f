//! Elasticity of intertemporal substitution: a log-linear Euler-equation
//! estimator and a CRRA data generator with a known answer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum observations per regression (and per fold).
pub const MIN_OBS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EisEstimate {
    /// Slope of log consumption growth on the log gross rate.
    pub point: f64,
    pub stderr: f64,
    /// Max minus min of the slope over contiguous folds.
    pub subsample_dispersion: f64,
    pub n_obs: usize,
    pub fold_points: Vec<f64>,
}

impl EisEstimate {
    /// Dispersion relative to `|point|`; infinite when the point estimate is zero.
    pub fn relative_dispersion(&self) -> f64 {
        self.subsample_dispersion / self.point.abs()
    }
}

/// Log consumption growth `Δlog c_t = (1/γ)(log β + log R_t) + ε_t`, with
/// `ε ~ N(0, noise_sd²)` drawn from a ChaCha8 stream seeded by `seed`.
/// `rate_path` holds gross rates `R_t`.
pub fn crra_euler_oracle(
    gamma: f64,
    beta: f64,
    rate_path: &[f64],
    noise_sd: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if rate_path.len() < MIN_OBS {
        return Err(Error::SeriesTooShort {
            needed: MIN_OBS,
            got: rate_path.len(),
        });
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", "must be > 0"));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("beta", "must lie in (0, 1)"));
    }
    if !(noise_sd.is_finite() && noise_sd >= 0.0) {
        return Err(Error::invalid("noise_sd", "must be ≥ 0"));
    }
    if let Some(i) = rate_path.iter().position(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid(
            format!("rate_path[{i}]"),
            "gross rate must be > 0",
        ));
    }

    let eis = 1.0 / gamma;
    let log_beta = beta.ln();
    let mut growth: Vec<f64> = rate_path
        .iter()
        .map(|r| eis * (log_beta + r.ln()))
        .collect();
    if noise_sd > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sd).map_err(|e| Error::Numeric(e.to_string()))?;
        for g in growth.iter_mut() {
            *g += normal.sample(&mut rng);
        }
    }
    Ok(growth)
}

/// `Δlog c_t` for a level series; length is one less than the input.
pub fn log_growth(levels: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = levels.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::Numeric(format!(
            "consumption level at index {i} is {} (log growth needs positive levels)",
            levels[i]
        )));
    }
    Ok(levels.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

struct Fit {
    slope: f64,
    stderr: f64,
}

fn ols(y: &[f64], x: &[f64]) -> Result<Fit> {
    let n = y.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - mx;
        sxx += dx * dx;
        sxy += dx * (yi - my);
    }
    let floor = n * (1e-14 * mx.abs().max(1.0)).powi(2);
    if sxx.is_nan() || sxx <= floor {
        return Err(Error::Unidentified(
            "rate path has no variation; the slope is not identified".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let sigma2 = ssr / (n - 2.0);
    Ok(Fit {
        slope,
        stderr: (sigma2 / sxx).sqrt(),
    })
}

/// OLS of `growth` on `log(rate_path)` with an intercept. The slope is the EIS
/// estimate; the same regression on `folds` contiguous blocks gives the
/// subsample dispersion.
pub fn estimate_eis(growth: &[f64], rate_path: &[f64], folds: usize) -> Result<EisEstimate> {
    if growth.len() != rate_path.len() {
        return Err(Error::LengthMismatch {
            left: growth.len(),
            right: rate_path.len(),
        });
    }
    if folds < 2 {
        return Err(Error::invalid("folds", "must be ≥ 2"));
    }
    let n = growth.len();
    if n < MIN_OBS * folds {
        return Err(Error::SeriesTooShort {
            needed: MIN_OBS * folds,
            got: n,
        });
    }
    if let Some(i) = rate_path.iter().position(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid(
            format!("rate_path[{i}]"),
            "gross rate must be > 0",
        ));
    }
    if let Some(i) = growth.iter().position(|g| !g.is_finite()) {
        return Err(Error::invalid(format!("growth[{i}]"), "must be finite"));
    }

    let log_rate: Vec<f64> = rate_path.iter().map(|r| r.ln()).collect();
    let full = ols(growth, &log_rate)?;

    let mut fold_points = Vec::with_capacity(folds);
    for k in 0..folds {
        let lo = k * n / folds;
        let hi = (k + 1) * n / folds;
        let fit = ols(&growth[lo..hi], &log_rate[lo..hi]).map_err(|e| match e {
            Error::Unidentified(msg) => Error::Unidentified(format!("fold {k}: {msg}")),
            other => other,
        })?;
        fold_points.push(fit.slope);
    }
    let max = fold_points
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let min = fold_points.iter().cloned().fold(f64::INFINITY, f64::min);

    Ok(EisEstimate {
        point: full.slope,
        stderr: full.stderr,
        subsample_dispersion: max - min,
        n_obs: n,
        fold_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn varying_rates(n: usize) -> Vec<f64> {
        (0..n)
            .map(|t| 1.0 + 0.03 + 0.02 * ((t as f64) * 0.7).sin())
            .collect()
    }

    #[test]
    fn noiseless_growth_matches_formula() {
        let beta: f64 = 0.98;
        let r = (0.04 - beta.ln()).exp();
        let g = crra_euler_oracle(2.0, beta, &[r; 10], 0.0, 1).unwrap();
        for x in g {
            assert_relative_eq!(x, 0.02, max_relative = 1e-12);
        }
    }

    #[test]
    fn unit_eis_is_log_sum() {
        let rates = varying_rates(12);
        let g = crra_euler_oracle(1.0, 0.95, &rates, 0.0, 7).unwrap();
        for (x, r) in g.iter().zip(&rates) {
            assert_eq!(*x, 0.95f64.ln() + r.ln());
        }
    }

    #[test]
    fn oracle_is_seed_deterministic() {
        let rates = varying_rates(50);
        let a = crra_euler_oracle(2.0, 0.97, &rates, 0.01, 42).unwrap();
        let b = crra_euler_oracle(2.0, 0.97, &rates, 0.01, 42).unwrap();
        let c = crra_euler_oracle(2.0, 0.97, &rates, 0.01, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn oracle_rejects_short_path() {
        assert!(matches!(
            crra_euler_oracle(2.0, 0.97, &[], 0.0, 1),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn exact_recovery_without_noise() {
        let rates = varying_rates(64);
        let g = crra_euler_oracle(2.0, 0.97, &rates, 0.0, 1).unwrap();
        let est = estimate_eis(&g, &rates, 4).unwrap();
        assert!((est.point - 0.5).abs() < 1e-10, "{}", est.point);
        assert!(est.subsample_dispersion < 1e-9);
        assert_eq!(est.n_obs, 64);
        assert_eq!(est.fold_points.len(), 4);
    }

    #[test]
    fn constant_rates_are_unidentified() {
        let rates = vec![1.03; 32];
        let g = vec![0.01; 32];
        assert!(matches!(
            estimate_eis(&g, &rates, 2),
            Err(Error::Unidentified(_))
        ));
    }

    #[test]
    fn length_and_fold_preconditions() {
        let rates = varying_rates(20);
        let g = vec![0.0; 20];
        assert!(matches!(
            estimate_eis(&g, &rates, 3),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(matches!(
            estimate_eis(&g[..19], &rates, 2),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(estimate_eis(&g, &rates, 1).is_err());
    }

    #[test]
    fn log_growth_needs_positive_levels() {
        let g = log_growth(&[1.0, std::f64::consts::E]).unwrap();
        assert_relative_eq!(g[0], 1.0, max_relative = 1e-15);
        assert!(log_growth(&[1.0, 0.0]).is_err());
    }
}
