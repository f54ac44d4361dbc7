//! Monte Carlo point estimates with two confidence intervals.
//!
//! The Hoeffding interval is distribution-free: for a statistic built from
//! independent inputs where changing input `i` moves the statistic by at most
//! `c_i`, McDiarmid's inequality gives
//! `P(|f - E f| >= t) <= 2 exp(-2 t^2 / sum c_i^2)`. The normal interval is the
//! usual `mean +- z * s / sqrt(trials)`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{LabError, Result};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Which interval a decision should rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CiKind {
    Hoeffding,
    #[default]
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub trials: usize,
    /// Standard error of `value` (sample standard deviation over `sqrt(trials)`).
    pub std_err: f64,
    pub confidence: f64,
    pub hoeffding_ci: (f64, f64),
    pub normal_ci: (f64, f64),
}

/// Two-sided standard normal quantile for `confidence`.
pub fn normal_quantile(confidence: f64) -> f64 {
    let n = Normal::standard();
    n.inverse_cdf(0.5 + confidence / 2.0)
}

/// McDiarmid half-width for `sum_sq = sum c_i^2`.
pub fn mcdiarmid_half_width(sum_sq: f64, confidence: f64) -> f64 {
    let delta = 1.0 - confidence;
    (sum_sq * (2.0 / delta).ln() / 2.0).sqrt()
}

pub(crate) fn check_confidence(confidence: f64) -> Result<()> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(LabError::invalid(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    Ok(())
}

impl Estimate {
    /// Builds an estimate from per-trial values and a precomputed Hoeffding
    /// half-width.
    pub fn from_samples(samples: &[f64], hoeffding_half: f64, confidence: f64) -> Self {
        let t = samples.len();
        assert!(t > 0, "estimate needs at least one trial");
        let mean = samples.iter().sum::<f64>() / t as f64;
        Self::from_moments(
            mean,
            sample_variance(samples, mean),
            t,
            hoeffding_half,
            confidence,
        )
    }

    /// Mean of iid variables bounded in an interval of width `range`.
    pub fn from_bounded(samples: &[f64], range: f64, confidence: f64) -> Self {
        let t = samples.len().max(1) as f64;
        let half = mcdiarmid_half_width(range * range / t, confidence);
        Self::from_samples(samples, half, confidence)
    }

    pub(crate) fn from_moments(
        mean: f64,
        variance: f64,
        trials: usize,
        hoeffding_half: f64,
        confidence: f64,
    ) -> Self {
        let std_err = (variance / trials as f64).sqrt();
        let z = normal_quantile(confidence);
        Estimate {
            value: mean,
            trials,
            std_err,
            confidence,
            hoeffding_ci: (mean - hoeffding_half, mean + hoeffding_half),
            normal_ci: (mean - z * std_err, mean + z * std_err),
        }
    }

    /// An exact value with zero-width intervals.
    pub fn exact(value: f64, trials: usize, confidence: f64) -> Self {
        Self::from_moments(value, 0.0, trials, 0.0, confidence)
    }

    pub fn ci(&self, kind: CiKind) -> (f64, f64) {
        match kind {
            CiKind::Hoeffding => self.hoeffding_ci,
            CiKind::Normal => self.normal_ci,
        }
    }

    pub fn half_width(&self, kind: CiKind) -> f64 {
        let (lo, hi) = self.ci(kind);
        (hi - lo) / 2.0
    }

    /// Whether the chosen intervals of `self` and `other` intersect.
    pub fn overlaps(&self, other: &Estimate, kind: CiKind) -> bool {
        let (a_lo, a_hi) = self.ci(kind);
        let (b_lo, b_hi) = other.ci(kind);
        a_lo <= b_hi && b_lo <= a_hi
    }
}

/// Unbiased sample variance; zero for a single sample.
pub(crate) fn sample_variance(samples: &[f64], mean: f64) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert!((normal_quantile(0.95) - 1.959964).abs() < 1e-5);
        assert!((normal_quantile(0.99) - 2.575829).abs() < 1e-5);
    }

    #[test]
    fn bounded_estimate_shrinks_with_trials() {
        let small: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let large: Vec<f64> = (0..400).map(|i| (i % 2) as f64).collect();
        let a = Estimate::from_bounded(&small, 1.0, 0.95);
        let b = Estimate::from_bounded(&large, 1.0, 0.95);
        assert!((a.value - 0.5).abs() < 1e-12);
        // Hoeffding width scales as 1/sqrt(trials).
        let ratio = a.half_width(CiKind::Hoeffding) / b.half_width(CiKind::Hoeffding);
        assert!((ratio - 2.0).abs() < 1e-9);
        // sqrt(ln(40) / 200)
        assert!((a.half_width(CiKind::Hoeffding) - 0.135_810).abs() < 1e-5);
        for e in [a, b] {
            assert!(e.hoeffding_ci.0 <= e.value && e.value <= e.hoeffding_ci.1);
            assert!(e.normal_ci.0 <= e.value && e.value <= e.normal_ci.1);
        }
    }

    #[test]
    fn exact_has_zero_width() {
        let e = Estimate::exact(1.0, 1, 0.95);
        assert_eq!(e.hoeffding_ci, (1.0, 1.0));
        assert_eq!(e.normal_ci, (1.0, 1.0));
    }
}
