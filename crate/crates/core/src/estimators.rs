//! Monte Carlo estimation of the mean LCS function.
//!
//! `gamma_k(n, p)` is the expected LCS length of iid strings of lengths
//! `round(n - np)` and `round(n + np)`, divided by `n`. Trial `t` draws its two
//! strings from streams `(seed, t)`, and the strings for a given `p` are
//! prefixes of the same underlying streams. Estimates at different `p` (and
//! different `n`) therefore share randomness, which makes finite differences
//! along a curve far less noisy than independent runs would.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::estimate::{
    check_confidence, mcdiarmid_half_width, CiKind, Estimate, DEFAULT_CONFIDENCE,
};
use crate::generators::{iid_symbols, role, RngSeed};
use crate::lcs;
use crate::progress::run_trials;
use crate::seq::round_half_up;

/// Tolerance for matching grid points and for boundary verdicts.
const EPS: f64 = 1e-9;

pub const DEFAULT_DERIVATIVE_STEP: f64 = 0.02;

/// Knobs shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSettings {
    pub confidence: f64,
    /// Interval used for decisions: `p_M` location and Condition 3 verdicts.
    pub decision_ci: CiKind,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        EstimatorSettings {
            confidence: DEFAULT_CONFIDENCE,
            decision_ci: CiKind::Normal,
        }
    }
}

/// String lengths `(round(n - np), round(n + np))`; both must be positive.
pub fn rounded_lengths(n: usize, p: f64) -> Result<(usize, usize)> {
    if !(p > -1.0 && p < 1.0) {
        return Err(LabError::invalid(format!("p must lie in (-1, 1), got {p}")));
    }
    let nf = n as f64;
    let a = round_half_up(nf - nf * p);
    let b = round_half_up(nf + nf * p);
    if a <= 0 || b <= 0 {
        return Err(LabError::invalid(format!(
            "p = {p} rounds a string length to zero at n = {n}"
        )));
    }
    Ok((a as usize, b as usize))
}

/// `gamma_k(n, p)` at the default confidence.
pub fn estimate_gamma(k: usize, n: usize, p: f64, trials: usize, seed: u64) -> Result<Estimate> {
    estimate_gamma_with(k, n, p, trials, seed, &EstimatorSettings::default())
}

pub fn estimate_gamma_with(
    k: usize,
    n: usize,
    p: f64,
    trials: usize,
    seed: u64,
    settings: &EstimatorSettings,
) -> Result<Estimate> {
    check_confidence(settings.confidence)?;
    crate::seq::Alphabet::new(k)?;
    if n < 2 {
        return Err(LabError::invalid(format!("n must be at least 2, got {n}")));
    }
    if trials == 0 {
        return Err(LabError::invalid("trials must be positive"));
    }
    let (nx, ny) = rounded_lengths(n, p)?;
    let lengths = run_trials("gamma", trials, |t| {
        let s = RngSeed::new(seed, t);
        let x = iid_symbols(&mut s.rng(role::X), k, nx);
        let y = iid_symbols(&mut s.rng(role::Y), k, ny);
        Ok(lcs::length_bitparallel(&x, &y) as u64)
    })?;

    // Exact integer moments, divided once.
    let sum: u64 = lengths.iter().sum();
    let sum_sq: u128 = lengths.iter().map(|&l| (l as u128) * (l as u128)).sum();
    let t = trials as f64;
    let nf = n as f64;
    let mean = sum as f64 / (nf * t);
    let variance = if trials > 1 {
        let num = trials as u128 * sum_sq - (sum as u128) * (sum as u128);
        num as f64 / (t * (t - 1.0)) / (nf * nf)
    } else {
        0.0
    };
    // Each of the (nx + ny) symbols of a trial moves that trial's
    // LCS by a bounded amount; the constant used here is 2.
    let c = 2.0 / (nf * t);
    let sum_c_sq = t * (nx + ny) as f64 * c * c;
    let half = mcdiarmid_half_width(sum_c_sq, settings.confidence);
    Ok(Estimate::from_moments(
        mean,
        variance,
        trials,
        half,
        settings.confidence,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCurve {
    pub k: usize,
    pub n: usize,
    pub grid: Vec<(f64, Estimate)>,
    /// Largest grid point whose interval overlaps the interval of the
    /// highest estimate.
    pub p_m_hat: f64,
    pub decision_ci: CiKind,
}

/// Pointwise estimates of `gamma_k(n, .)` over an increasing grid.
pub fn estimate_curve(
    k: usize,
    n: usize,
    p_grid: &[f64],
    trials_per_point: usize,
    seed: u64,
) -> Result<GammaCurve> {
    estimate_curve_with(
        k,
        n,
        p_grid,
        trials_per_point,
        seed,
        &EstimatorSettings::default(),
    )
}

pub fn estimate_curve_with(
    k: usize,
    n: usize,
    p_grid: &[f64],
    trials_per_point: usize,
    seed: u64,
    settings: &EstimatorSettings,
) -> Result<GammaCurve> {
    if p_grid.is_empty() {
        return Err(LabError::invalid("p grid is empty"));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::invalid("p grid must be strictly increasing"));
    }
    let grid = p_grid
        .iter()
        .map(|&p| {
            Ok((
                p,
                estimate_gamma_with(k, n, p, trials_per_point, seed, settings)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let p_m_hat = locate_p_m(&grid, settings.decision_ci);
    Ok(GammaCurve {
        k,
        n,
        grid,
        p_m_hat,
        decision_ci: settings.decision_ci,
    })
}

fn locate_p_m(grid: &[(f64, Estimate)], kind: CiKind) -> f64 {
    let top = grid
        .iter()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .map(|g| g.1)
        .expect("grid is non-empty");
    grid.iter()
        .filter(|(_, e)| e.overlaps(&top, kind))
        .map(|g| g.0)
        .fold(f64::NEG_INFINITY, f64::max)
}

impl GammaCurve {
    /// Estimate at `p`, linearly interpolated between grid neighbours.
    pub fn at(&self, p: f64) -> Result<Estimate> {
        let first = self.grid[0].0;
        let last = self.grid[self.grid.len() - 1].0;
        if p < first - EPS || p > last + EPS {
            return Err(LabError::invalid(format!(
                "p = {p} outside the curve's grid [{first}, {last}]"
            )));
        }
        if let Some((_, e)) = self.grid.iter().find(|(q, _)| (q - p).abs() <= EPS) {
            return Ok(*e);
        }
        let idx = self
            .grid
            .iter()
            .position(|(q, _)| *q > p)
            .expect("p inside grid");
        let (p0, a) = self.grid[idx - 1];
        let (p1, b) = self.grid[idx];
        let w = (p - p0) / (p1 - p0);
        let lerp = |u: f64, v: f64| u + w * (v - u);
        Ok(Estimate {
            value: lerp(a.value, b.value),
            trials: a.trials.min(b.trials),
            std_err: lerp(a.std_err, b.std_err),
            confidence: a.confidence,
            hoeffding_ci: (
                lerp(a.hoeffding_ci.0, b.hoeffding_ci.0),
                lerp(a.hoeffding_ci.1, b.hoeffding_ci.1),
            ),
            normal_ci: (
                lerp(a.normal_ci.0, b.normal_ci.0),
                lerp(a.normal_ci.1, b.normal_ci.1),
            ),
        })
    }
}

/// `(hi - lo) / h` style finite difference with interval arithmetic on both CIs.
fn difference_quotient(lo_pt: Estimate, hi_pt: Estimate, h: f64) -> Estimate {
    let iv = |a: (f64, f64), b: (f64, f64)| ((b.0 - a.1) / h, (b.1 - a.0) / h);
    Estimate {
        value: (hi_pt.value - lo_pt.value) / h,
        trials: lo_pt.trials.min(hi_pt.trials),
        std_err: (lo_pt.std_err.powi(2) + hi_pt.std_err.powi(2)).sqrt() / h,
        confidence: lo_pt.confidence,
        hoeffding_ci: iv(lo_pt.hoeffding_ci, hi_pt.hoeffding_ci),
        normal_ci: iv(lo_pt.normal_ci, hi_pt.normal_ci),
    }
}

/// `(gamma(p + h) - gamma(p)) / h`.
pub fn estimate_right_derivative(curve: &GammaCurve, p: f64, h_p: f64) -> Result<Estimate> {
    if h_p <= 0.0 {
        return Err(LabError::invalid("derivative step must be positive"));
    }
    Ok(difference_quotient(curve.at(p)?, curve.at(p + h_p)?, h_p))
}

/// `(gamma(p) - gamma(p - h)) / h`.
pub fn estimate_left_derivative(curve: &GammaCurve, p: f64, h_p: f64) -> Result<Estimate> {
    if h_p <= 0.0 {
        return Err(LabError::invalid("derivative step must be positive"));
    }
    Ok(difference_quotient(curve.at(p - h_p)?, curve.at(p)?, h_p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition3Report {
    pub verdict: Verdict,
    /// `|gamma(0)/2 - 1/k| - |gamma'(p_M+)| / 2`; positive when the
    /// condition holds.
    pub margin: Estimate,
    pub gamma0: Estimate,
    pub right_derivative: Estimate,
    pub p_m_hat: f64,
    pub curve: GammaCurve,
}

/// Interval of `|v|` for `v` in `[lo, hi]`.
fn abs_interval((lo, hi): (f64, f64)) -> (f64, f64) {
    if lo <= 0.0 && hi >= 0.0 {
        (0.0, lo.abs().max(hi.abs()))
    } else {
        (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()))
    }
}

/// Number of derivative steps covered by the Condition 3 grid.
const CONDITION3_STEPS: usize = 8;

/// Compares `|gamma'(p_M+)| / 2` against `|gamma(0)/2 - 1/k|`.
///
/// The curve is estimated on `0, h, 2h, ..., 8h`; `p_M` is located on it and
/// the right derivative is taken there (at `7h` if `p_M` lands on the last
/// point). The verdict is `holds` or `fails` only when the margin's interval
/// excludes zero.
pub fn check_condition3(
    k: usize,
    n: usize,
    trials: usize,
    seed: u64,
    h_p: f64,
) -> Result<Condition3Report> {
    check_condition3_with(k, n, trials, seed, h_p, &EstimatorSettings::default())
}

pub fn check_condition3_with(
    k: usize,
    n: usize,
    trials: usize,
    seed: u64,
    h_p: f64,
    settings: &EstimatorSettings,
) -> Result<Condition3Report> {
    if !(h_p > 0.0 && h_p * (CONDITION3_STEPS as f64) < 1.0) {
        return Err(LabError::invalid(format!(
            "derivative step must lie in (0, 1/{CONDITION3_STEPS}), got {h_p}"
        )));
    }
    let grid: Vec<f64> = (0..=CONDITION3_STEPS).map(|i| i as f64 * h_p).collect();
    let curve = estimate_curve_with(k, n, &grid, trials, seed, settings)?;
    let last_start = (CONDITION3_STEPS - 1) as f64 * h_p;
    let p_m_hat = curve.p_m_hat.clamp(0.0, last_start);
    let gamma0 = curve.at(0.0)?;
    let deriv = estimate_right_derivative(&curve, p_m_hat, h_p)?;

    let inv_k = 1.0 / k as f64;
    let lhs = |(lo, hi): (f64, f64)| abs_interval((lo / 2.0 - inv_k, hi / 2.0 - inv_k));
    let rhs = |ci: (f64, f64)| {
        let (lo, hi) = abs_interval(ci);
        (lo / 2.0, hi / 2.0)
    };
    let margin_iv = |g: (f64, f64), d: (f64, f64)| {
        let (a_lo, a_hi) = lhs(g);
        let (b_lo, b_hi) = rhs(d);
        (a_lo - b_hi, a_hi - b_lo)
    };
    let value = (gamma0.value / 2.0 - inv_k).abs() - deriv.value.abs() / 2.0;
    let margin = Estimate {
        value,
        trials,
        std_err: (gamma0.std_err.powi(2) / 4.0 + deriv.std_err.powi(2) / 4.0).sqrt(),
        confidence: settings.confidence,
        hoeffding_ci: margin_iv(gamma0.hoeffding_ci, deriv.hoeffding_ci),
        normal_ci: margin_iv(gamma0.normal_ci, deriv.normal_ci),
    };
    let (lo, hi) = margin.ci(settings.decision_ci);
    let verdict = if lo > EPS {
        Verdict::Holds
    } else if hi < -EPS {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    Ok(Condition3Report {
        verdict,
        margin,
        gamma0,
        right_derivative: deriv,
        p_m_hat,
        curve,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub estimate: Estimate,
    /// `x = sqrt(ln n / n)`.
    pub rate: f64,
    /// `gamma(n_max) - gamma(n)`; zero at `n_max`.
    pub deviation: f64,
    /// Standard error of the deviation.
    pub deviation_se: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub k: usize,
    pub p: f64,
    pub points: Vec<ConvergencePoint>,
    /// Least-squares `C` in `|deviation| ~ C * sqrt(ln n / n)`.
    pub fitted_constant: f64,
    /// Deviations non-negative and non-increasing in `n`.
    pub monotone: bool,
    /// Too few trials, or some deviation within two standard errors of zero.
    pub low_power: bool,
}

/// Trial count below which a convergence report is always low-power.
const MIN_POWERED_TRIALS: usize = 30;

/// Fits the deviations `|gamma(n, p) - gamma(n_max, p)|` against
/// `sqrt(ln n / n)`.
pub fn convergence_rate_check(
    k: usize,
    p: f64,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    if n_list.len() < 3 {
        return Err(LabError::invalid(
            "convergence check needs at least three n values",
        ));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::invalid("n values must be strictly increasing"));
    }
    let estimates = n_list
        .iter()
        .map(|&n| estimate_gamma(k, n, p, trials, seed))
        .collect::<Result<Vec<_>>>()?;
    let last = *estimates.last().expect("non-empty");

    let mut points: Vec<ConvergencePoint> = n_list
        .iter()
        .zip(&estimates)
        .map(|(&n, &e)| {
            let nf = n as f64;
            ConvergencePoint {
                n,
                estimate: e,
                rate: (nf.ln() / nf).sqrt(),
                deviation: last.value - e.value,
                deviation_se: (last.std_err.powi(2) + e.std_err.powi(2)).sqrt(),
                residual: 0.0,
            }
        })
        .collect();

    let count = points.len();
    let sxy: f64 = points[..count - 1]
        .iter()
        .map(|q| q.deviation.abs() * q.rate)
        .sum();
    let sxx: f64 = points[..count - 1].iter().map(|q| q.rate * q.rate).sum();
    let fitted_constant = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    for q in &mut points[..count - 1] {
        q.residual = q.deviation.abs() - fitted_constant * q.rate;
    }
    let fit = &points[..count - 1];

    let devs: Vec<f64> = points.iter().map(|q| q.deviation).collect();
    let monotone = devs.iter().all(|&d| d >= -EPS) && devs.windows(2).all(|w| w[1] <= w[0] + EPS);
    let low_power =
        trials < MIN_POWERED_TRIALS || fit.iter().any(|q| q.deviation.abs() < 2.0 * q.deviation_se);
    Ok(ConvergenceReport {
        k,
        p,
        points,
        fitted_constant,
        monotone,
        low_power,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub pairs: usize,
    /// Pairs with `|gamma(p) - gamma(-p)|` above three combined standard errors.
    pub violations: usize,
    /// Pairs whose difference is below the sum of the decision-interval half-widths.
    pub within_half_widths: usize,
}

/// Compares estimates at `p` and `-p` for every mirrored pair on the grid.
pub fn symmetry_check(curve: &GammaCurve) -> SymmetryReport {
    let mut report = SymmetryReport {
        pairs: 0,
        violations: 0,
        within_half_widths: 0,
    };
    for (p, a) in curve.grid.iter().filter(|(p, _)| *p > EPS) {
        let Some((_, b)) = curve.grid.iter().find(|(q, _)| (q + p).abs() <= EPS) else {
            continue;
        };
        report.pairs += 1;
        let diff = (a.value - b.value).abs();
        let se = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
        if diff > 3.0 * se + EPS {
            report.violations += 1;
        }
        let hw = a.half_width(curve.decision_ci) + b.half_width(curve.decision_ci);
        if diff <= hw + EPS {
            report.within_half_widths += 1;
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub triples: usize,
    /// Triples whose midpoint falls below the chord by more than three
    /// combined standard errors.
    pub violations: usize,
}

/// Midpoint concavity over every grid triple `p < q < r` with `q = (p + r)/2`.
pub fn concavity_check(curve: &GammaCurve) -> ConcavityReport {
    let g = &curve.grid;
    let mut report = ConcavityReport {
        triples: 0,
        violations: 0,
    };
    for i in 0..g.len() {
        for r in i + 2..g.len() {
            let mid = (g[i].0 + g[r].0) / 2.0;
            let Some((_, q)) = g[i + 1..r].iter().find(|(p, _)| (p - mid).abs() <= EPS) else {
                continue;
            };
            report.triples += 1;
            let (a, c) = (g[i].1, g[r].1);
            let chord = (a.value + c.value) / 2.0;
            let se = (q.std_err.powi(2) + (a.std_err.powi(2) + c.std_err.powi(2)) / 4.0).sqrt();
            if q.value < chord - 3.0 * se - EPS {
                report.violations += 1;
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperadditivityReport {
    pub at_n: Estimate,
    pub at_2n: Estimate,
    /// Three combined standard errors.
    pub slack: f64,
    pub passes: bool,
}

/// `gamma(2n, 0) >= gamma(n, 0)` up to three combined standard errors.
pub fn superadditivity_check(
    k: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<SuperadditivityReport> {
    let at_n = estimate_gamma(k, n, 0.0, trials, seed)?;
    let at_2n = estimate_gamma(k, 2 * n, 0.0, trials, seed)?;
    let slack = 3.0 * (at_n.std_err.powi(2) + at_2n.std_err.powi(2)).sqrt();
    Ok(SuperadditivityReport {
        at_n,
        at_2n,
        slack,
        passes: at_2n.value >= at_n.value - slack,
    })
}
