//! Block-insertion experiments: gap tables, LCS gain tables and event
//! frequencies.
//!
//! A trial draws `x`, `y` of length `n = 2d`, puts a constant block of length
//! `ell` in the middle of `x` (or finds a natural one), and measures:
//!
//! * the extremal number of block positions left unmatched over all optimal
//!   alignments (maximum and minimum);
//! * `delta = |LCS(x*, y)| - |LCS(x, y)|`, where `x*` has the block
//!   replaced by fresh iid symbols;
//! * membership in the four events:
//!   - E: `|LCS(x without block, y)| + a > |LCS(x, y)|`
//!   - K: `delta >= (gamma_a / 2) * ell - a`
//!   - G: `|LCS(x, y)| > |LCS(x without the first a block symbols, y)|`
//!   - H: `delta >= c_h * ell`
//!
//! with `a = round(d^alpha)`.

use serde::{Deserialize, Serialize};

use crate::block::{extremal_gaps, find_natural_block, BlockSpec, GapObjective, RunMatch};
use crate::error::{LabError, Result};
use crate::estimate::{Estimate, DEFAULT_CONFIDENCE};
use crate::estimators::estimate_gamma;
use crate::generators::{block_length, centred_block, iid_symbols, role, splice, RngSeed};
use crate::lcs;
use crate::progress::run_trials;
use crate::seq::round_half_up;

/// Published approximations of the Chvátal–Sankoff constants.
pub fn reference_gamma_star(k: usize) -> Option<f64> {
    match k {
        2 => Some(0.812),
        3 => Some(0.717),
        4 => Some(0.654),
        5 => Some(0.61),
        7 => Some(0.54),
        _ => None,
    }
}

/// Trials used to estimate `gamma*_k` when no reference value exists.
const GAMMA_STAR_TRIALS: usize = 200;
const GAMMA_STAR_N: usize = 1000;
/// Resampling attempts per trial before natural mode gives up.
pub const MAX_NATURAL_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockMode {
    #[default]
    Inserted,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    E,
    K,
    G,
    H,
}

impl std::str::FromStr for Event {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" | "e" => Ok(Event::E),
            "K" | "k" => Ok(Event::K),
            "G" | "g" => Ok(Event::G),
            "H" | "h" => Ok(Event::H),
            _ => Err(LabError::invalid(format!(
                "unknown event {s:?}; expected E, K, G or H"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub d: usize,
    pub beta: f64,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    /// Defaults to `gamma* - 0.05`.
    pub gamma_a: Option<f64>,
    pub c_h: f64,
    pub block_mode: BlockMode,
    /// `None` draws the inserted block's symbol at random per trial.
    pub block_symbol: Option<u8>,
    pub run_match: RunMatch,
    /// Which per-trial gap count the summary row aggregates.
    pub objective: GapObjective,
    /// Overrides the reference / estimated `gamma*_k`.
    pub gamma_star: Option<f64>,
    pub confidence: f64,
}

impl ExperimentConfig {
    pub fn new(k: usize) -> Self {
        ExperimentConfig {
            k,
            d: 500,
            beta: 0.8,
            alpha: 0.6,
            trials: 100,
            seed: 0,
            gamma_a: None,
            c_h: 0.15,
            block_mode: BlockMode::Inserted,
            block_symbol: Some(0),
            run_match: RunMatch::Exact,
            objective: GapObjective::MaximizeGaps,
            gamma_star: None,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    /// Validates the configuration and fixes every derived quantity.
    pub fn resolve(
        &self,
        n_override: Option<usize>,
        ell_override: Option<usize>,
    ) -> Result<Resolved> {
        if self.k < 2 {
            return Err(LabError::invalid("experiments need k >= 2"));
        }
        crate::seq::Alphabet::new(self.k)?;
        if !(0.5 < self.alpha && self.alpha < self.beta && self.beta < 1.0) {
            return Err(LabError::invalid(format!(
                "need 1/2 < alpha < beta < 1, got alpha = {}, beta = {}",
                self.alpha, self.beta
            )));
        }
        if self.trials == 0 {
            return Err(LabError::invalid("trials must be positive"));
        }
        crate::estimate::check_confidence(self.confidence)?;

        let n = match n_override {
            Some(n) => n,
            None => 2 * self.d,
        };
        if n < 2 {
            return Err(LabError::invalid(format!(
                "string length must be at least 2, got {n}"
            )));
        }
        let d = n / 2;
        let ell = match ell_override {
            Some(e) => e,
            None => block_length(d, self.beta),
        };
        if ell == 0 || ell > n {
            return Err(LabError::invalid(format!(
                "block length must lie in 1..={n}, got {ell}"
            )));
        }
        if let Some(s) = self.block_symbol {
            if s as usize >= self.k {
                return Err(LabError::invalid(format!(
                    "block symbol {s} outside alphabet"
                )));
            }
        }
        let d_alpha = round_half_up((d as f64).powf(self.alpha)).max(1) as usize;

        let gamma_star = match self.gamma_star.or_else(|| reference_gamma_star(self.k)) {
            Some(g) => g,
            None => estimate_gamma(self.k, GAMMA_STAR_N, 0.0, GAMMA_STAR_TRIALS, self.seed)?.value,
        };
        let gamma_a = self.gamma_a.unwrap_or(gamma_star - 0.05);
        if !(gamma_a > 0.0 && gamma_a < gamma_star) {
            return Err(LabError::invalid(format!(
                "gamma_a must lie in (0, gamma* = {gamma_star}), got {gamma_a}"
            )));
        }
        let two_over_k = 2.0 / self.k as f64;
        if self.k as f64 * gamma_star > 2.0 && gamma_a <= two_over_k {
            return Err(LabError::invalid(format!(
                "gamma_a must exceed 2/k = {two_over_k:.6}, got {gamma_a}"
            )));
        }
        let gamma2 = if self.k == 2 {
            gamma_star
        } else {
            reference_gamma_star(2).expect("binary reference")
        };
        let c_h_max = 1.5 * gamma2 - 1.0;
        if !(self.c_h > 0.0 && self.c_h < c_h_max) {
            return Err(LabError::invalid(format!(
                "c_h must lie in (0, {c_h_max:.6}), got {}",
                self.c_h
            )));
        }

        Ok(Resolved {
            config: self.clone(),
            n,
            d,
            ell,
            d_alpha,
            gamma_star,
            gamma_a,
            thresholds: EventThresholds {
                d_alpha,
                k_threshold: gamma_a / 2.0 * ell as f64 - d_alpha as f64,
                h_threshold: self.c_h * ell as f64,
            },
        })
    }
}

/// Event thresholds in LCS units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventThresholds {
    pub d_alpha: usize,
    /// K holds when `delta >= k_threshold`.
    pub k_threshold: f64,
    /// H holds when `delta >= h_threshold`.
    pub h_threshold: f64,
}

impl EventThresholds {
    /// Recomputes `[E, K, G, H]` from a record's stored lengths.
    pub fn flags(&self, r: &TrialRecord) -> [bool; 4] {
        let delta = r.delta() as f64;
        [
            r.lcs_excised + self.d_alpha > r.lcs_xy,
            delta >= self.k_threshold,
            r.lcs_xy > r.lcs_prefix_excised,
            delta >= self.h_threshold,
        ]
    }
}

/// A validated configuration with every derived length fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub n: usize,
    pub d: usize,
    pub ell: usize,
    pub d_alpha: usize,
    pub gamma_star: f64,
    pub gamma_a: f64,
    pub thresholds: EventThresholds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub lcs_xy: usize,
    pub lcs_xstar_y: usize,
    pub gaps_max: usize,
    pub gaps_min: usize,
    pub e_flag: bool,
    pub k_flag: bool,
    pub g_flag: bool,
    pub h_flag: bool,
    /// `|LCS(x without block, y)|`.
    #[serde(skip)]
    pub lcs_excised: usize,
    /// `|LCS(x without the first d_alpha block symbols, y)|`.
    #[serde(skip)]
    pub lcs_prefix_excised: usize,
    #[serde(skip)]
    pub block: BlockSpec,
    /// Natural mode: how many strings were discarded before a block was found.
    #[serde(skip)]
    pub resamples: usize,
}

impl TrialRecord {
    pub fn delta(&self) -> i64 {
        self.lcs_xstar_y as i64 - self.lcs_xy as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: usize,
    pub ell: usize,
    pub n: usize,
    pub trials: usize,
    pub mean_gaps: f64,
    pub median_gaps: f64,
    pub gap_proportion: f64,
    pub mean_delta: f64,
    pub heuristic_delta: f64,
}

/// Output of [`run_gap_trials`] / [`run_delta_trials`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRun {
    pub resolved: Resolved,
    pub records: Vec<TrialRecord>,
    pub row: TableRow,
    /// Total strings discarded in natural mode.
    pub resamples: usize,
}

/// Predicted LCS gain from resampling a constant block of length `ell`:
/// `(3 gamma/2 - 1) ell` for two letters, `(gamma/2) ell` otherwise.
pub fn heuristic_delta(k: usize, ell: usize, gamma_star: f64) -> Result<f64> {
    match k {
        0 | 1 => Err(LabError::invalid("heuristic needs k >= 2")),
        2 => Ok((1.5 * gamma_star - 1.0) * ell as f64),
        _ => Ok(gamma_star / 2.0 * ell as f64),
    }
}

struct Strings {
    x: Vec<u8>,
    y: Vec<u8>,
    x_star: Vec<u8>,
    block: BlockSpec,
    resamples: usize,
}

fn draw(res: &Resolved, t: u64) -> Result<Strings> {
    let cfg = &res.config;
    let seed = RngSeed::new(cfg.seed, t);
    let k = cfg.k;
    let y = iid_symbols(&mut seed.rng(role::Y), k, res.n);
    let (x, block, resamples) = match cfg.block_mode {
        BlockMode::Inserted => {
            let block = centred_block(res.n, res.ell);
            let mut x = iid_symbols(&mut seed.rng(role::X), k, res.n);
            let symbol = match cfg.block_symbol {
                Some(s) => s,
                None => rand::Rng::gen_range(&mut seed.rng(role::BLOCK_SYMBOL), 0..k as u8),
            };
            x[block.start..block.end()].fill(symbol);
            (x, block, 0)
        }
        BlockMode::Natural => {
            let mut found = None;
            for attempt in 0..MAX_NATURAL_ATTEMPTS {
                let r = if attempt == 0 {
                    role::X
                } else {
                    role::NATURAL_RETRY + attempt as u16
                };
                let x = iid_symbols(&mut seed.rng(r), k, res.n);
                if let Some(b) = find_natural_block(&x, res.ell, cfg.run_match) {
                    found = Some((x, b, attempt));
                    break;
                }
            }
            found.ok_or(LabError::NaturalBlockNotFound {
                len: res.ell,
                attempts: MAX_NATURAL_ATTEMPTS,
            })?
        }
    };
    let fresh = iid_symbols(&mut seed.rng(role::X_STAR), k, block.length);
    let mut x_star = x.clone();
    x_star[block.start..block.end()].copy_from_slice(&fresh);
    Ok(Strings {
        x,
        y,
        x_star,
        block,
        resamples,
    })
}

fn simulate(res: &Resolved, t: u64, with_gaps: bool) -> Result<TrialRecord> {
    let s = draw(res, t)?;
    let (lcs_xy, gaps_max, gaps_min) = if with_gaps {
        let max = extremal_gaps(&s.x, &s.y, s.block, GapObjective::MaximizeGaps);
        let min = extremal_gaps(&s.x, &s.y, s.block, GapObjective::MinimizeGaps);
        debug_assert_eq!(max.lcs_len, min.lcs_len);
        (max.lcs_len, max.gaps, min.gaps)
    } else {
        (lcs::length_bitparallel(&s.x, &s.y), 0, 0)
    };
    let lcs_xstar_y = lcs::length_bitparallel(&s.x_star, &s.y);
    let lcs_excised = lcs::length_bitparallel(&splice(&s.x, s.block.start, s.block.length), &s.y);
    let m = res.d_alpha.min(s.block.length);
    let lcs_prefix_excised = lcs::length_bitparallel(&splice(&s.x, s.block.start, m), &s.y);

    let mut rec = TrialRecord {
        trial_index: t,
        lcs_xy,
        lcs_xstar_y,
        gaps_max,
        gaps_min,
        e_flag: false,
        k_flag: false,
        g_flag: false,
        h_flag: false,
        lcs_excised,
        lcs_prefix_excised,
        block: s.block,
        resamples: s.resamples,
    };
    let [e, k, g, h] = res.thresholds.flags(&rec);
    (rec.e_flag, rec.k_flag, rec.g_flag, rec.h_flag) = (e, k, g, h);
    Ok(rec)
}

/// Lower median.
fn lower_median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    values[(values.len() - 1) / 2] as f64
}

fn run(
    label: &str,
    cfg: &ExperimentConfig,
    n_override: Option<usize>,
    ell_override: Option<usize>,
) -> Result<TrialRun> {
    let resolved = cfg.resolve(n_override, ell_override)?;
    let records = run_trials(label, cfg.trials, |t| simulate(&resolved, t, true))?;

    let t = records.len() as f64;
    let pick = |r: &TrialRecord| match cfg.objective {
        GapObjective::MaximizeGaps => r.gaps_max,
        GapObjective::MinimizeGaps => r.gaps_min,
    };
    let mut gaps: Vec<usize> = records.iter().map(pick).collect();
    let gap_sum: usize = gaps.iter().sum();
    let delta_sum: i64 = records.iter().map(|r| r.delta()).sum();
    let mean_gaps = gap_sum as f64 / t;
    let row = TableRow {
        k: cfg.k,
        ell: resolved.ell,
        n: resolved.n,
        trials: cfg.trials,
        mean_gaps,
        median_gaps: lower_median(&mut gaps),
        gap_proportion: mean_gaps / resolved.ell as f64,
        mean_delta: delta_sum as f64 / t,
        heuristic_delta: heuristic_delta(cfg.k, resolved.ell, resolved.gamma_star)?,
    };
    let resamples = records.iter().map(|r| r.resamples).sum();
    Ok(TrialRun {
        resolved,
        records,
        row,
        resamples,
    })
}

/// Gap counts of the block, per trial and aggregated. The summary uses
/// the configured objective, maximize-gaps by default.
pub fn run_gap_trials(
    cfg: &ExperimentConfig,
    n_override: Option<usize>,
    ell_override: Option<usize>,
) -> Result<TrialRun> {
    run("gaps", cfg, n_override, ell_override)
}

/// LCS gain from resampling the block, per trial and aggregated.
///
/// Records carry the same fields as [`run_gap_trials`]; both runs are
/// identical for the same configuration.
pub fn run_delta_trials(
    cfg: &ExperimentConfig,
    n_override: Option<usize>,
    ell_override: Option<usize>,
) -> Result<TrialRun> {
    run("delta", cfg, n_override, ell_override)
}

/// Empirical frequency of one event with confidence intervals.
pub fn estimate_event_probability(event: Event, cfg: &ExperimentConfig) -> Result<Estimate> {
    estimate_event_probability_at(event, cfg, None, None)
}

pub fn estimate_event_probability_at(
    event: Event,
    cfg: &ExperimentConfig,
    n_override: Option<usize>,
    ell_override: Option<usize>,
) -> Result<Estimate> {
    let resolved = cfg.resolve(n_override, ell_override)?;
    let hits = run_trials("events", cfg.trials, |t| {
        let r = simulate(&resolved, t, false)?;
        let flag = match event {
            Event::E => r.e_flag,
            Event::K => r.k_flag,
            Event::G => r.g_flag,
            Event::H => r.h_flag,
        };
        Ok(if flag { 1.0 } else { 0.0 })
    })?;
    Ok(Estimate::from_bounded(&hits, 1.0, cfg.confidence))
}

/// String length used for a table cell: 1000 up to `ell = 100`, 4000 above.
pub fn table_length(ell: usize) -> usize {
    if ell <= 100 {
        1000
    } else {
        4000
    }
}

/// One [`TableRow`] per `(k, ell)` cell, in order.
pub fn run_table_suite(
    cells: &[(usize, usize)],
    defaults: &ExperimentConfig,
    n_override: Option<usize>,
) -> Result<Vec<TableRow>> {
    cells
        .iter()
        .map(|&(k, ell)| {
            let cfg = ExperimentConfig {
                k,
                ..defaults.clone()
            };
            let n = n_override.unwrap_or_else(|| table_length(ell));
            Ok(run_gap_trials(&cfg, Some(n), Some(ell))?.row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(k: usize) -> ExperimentConfig {
        ExperimentConfig {
            trials: 8,
            seed: 5,
            ..ExperimentConfig::new(k)
        }
    }

    #[test]
    fn heuristic_values() {
        assert!((heuristic_delta(2, 100, 0.812).unwrap() - 21.8).abs() < 1e-9);
        assert!((heuristic_delta(4, 100, 0.654).unwrap() - 32.7).abs() < 1e-9);
        assert_eq!(heuristic_delta(2, 0, 0.812).unwrap(), 0.0);
        assert!(heuristic_delta(1, 10, 1.0).is_err());
    }

    #[test]
    fn resolve_defaults() {
        let r = ExperimentConfig::new(4).resolve(None, None).unwrap();
        assert_eq!((r.n, r.d, r.ell, r.d_alpha), (1000, 500, 144, 42));
        assert!((r.gamma_a - 0.604).abs() < 1e-12);
        let r = ExperimentConfig::new(2)
            .resolve(Some(1000), Some(5))
            .unwrap();
        assert_eq!((r.n, r.ell), (1000, 5));
    }

    #[test]
    fn resolve_rejects_bad_ranges() {
        let mut c = ExperimentConfig::new(2);
        c.alpha = 0.8;
        c.beta = 0.8;
        assert!(c.resolve(None, None).is_err());
        let c = ExperimentConfig::new(2);
        assert!(c.resolve(None, Some(0)).is_err());
        assert!(c.resolve(Some(10), Some(11)).is_err());
        let mut c = ExperimentConfig::new(2);
        c.c_h = 0.3;
        assert!(c.resolve(None, None).is_err());
        let mut c = ExperimentConfig::new(3);
        c.gamma_a = Some(0.6);
        assert!(c.resolve(None, None).is_err());
        let mut c = ExperimentConfig::new(3);
        c.gamma_a = Some(0.8);
        assert!(c.resolve(None, None).is_err());
        assert!(ExperimentConfig::new(1).resolve(None, None).is_err());
    }

    #[test]
    fn records_are_consistent() {
        let run = run_gap_trials(&small(2), Some(200), Some(20)).unwrap();
        assert_eq!(run.records.len(), 8);
        for (i, r) in run.records.iter().enumerate() {
            assert_eq!(r.trial_index, i as u64);
            assert!(r.gaps_min <= r.gaps_max && r.gaps_max <= 20);
            assert!(r.delta().unsigned_abs() <= 20);
            let [e, k, g, h] = run.resolved.thresholds.flags(r);
            assert_eq!([e, k, g, h], [r.e_flag, r.k_flag, r.g_flag, r.h_flag]);
            let s = draw(&run.resolved, r.trial_index).unwrap();
            assert_eq!(s.block, r.block);
            assert_eq!(r.lcs_xy, lcs::length(&s.x, &s.y));
        }
        let row = &run.row;
        assert_eq!((row.k, row.ell, row.n, row.trials), (2, 20, 200, 8));
        assert!((row.gap_proportion - row.mean_gaps / 20.0).abs() < 1e-12);
    }

    #[test]
    fn lower_median_picks_lower_middle() {
        assert_eq!(lower_median(&mut [2, 1, 2, 31, 9, 0, 1, 3, 5, 7]), 2.0);
        assert_eq!(lower_median(&mut [4]), 4.0);
    }

    #[test]
    fn natural_mode_finds_blocks() {
        let mut c = small(2);
        c.block_mode = BlockMode::Natural;
        let run = run_gap_trials(&c, Some(400), Some(4)).unwrap();
        for r in &run.records {
            assert_eq!(r.block.length, 4);
        }
        // A run of 60 equal bits in 100 is essentially impossible.
        let err = run_gap_trials(&ExperimentConfig { trials: 1, ..c }, Some(100), Some(60));
        assert!(matches!(err, Err(LabError::NaturalBlockNotFound { .. })));
    }

    #[test]
    fn table_suite_length_rule() {
        assert_eq!(table_length(100), 1000);
        assert_eq!(table_length(200), 4000);
        let rows = run_table_suite(&[], &small(2), None).unwrap();
        assert!(rows.is_empty());
        let rows = run_table_suite(&[(2, 10), (3, 5)], &small(2), Some(120)).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].k, rows[0].ell), (2, 10));
        assert_eq!((rows[1].k, rows[1].ell), (3, 5));
    }

    #[test]
    fn event_parsing() {
        assert_eq!("E".parse::<Event>().unwrap(), Event::E);
        assert_eq!("h".parse::<Event>().unwrap(), Event::H);
        assert!("X".parse::<Event>().is_err());
    }
}
