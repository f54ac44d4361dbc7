//! Oracle equivalence suites: fast paths against the small-instance oracles.
//!
//! Used by the `oracle-check` CLI subcommand and by the acceptance tests.

use rand::Rng;
use serde::Serialize;

use crate::block::{extremal_gaps, gaps_of_alignment, BlockSpec, GapObjective};
use crate::generators::{iid_symbols, RngSeed};
use crate::lcs;
use crate::oracle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub cases: usize,
    pub mismatches: usize,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// All binary strings of length `0..=max_len`.
fn binary_strings(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for bits in 0u32..(1 << len) {
            out.push((0..len).map(|i| (bits >> i & 1) as u8).collect());
        }
    }
    out
}

/// DP against brute force on every pair of binary strings up to `max_len`.
pub fn brute_force_exhaustive(max_len: usize) -> SuiteResult {
    let all = binary_strings(max_len);
    let mut cases = 0;
    let mut mismatches = 0;
    for x in &all {
        for y in &all {
            cases += 1;
            if lcs::length(x, y) != oracle::brute_force(x, y) {
                mismatches += 1;
            }
        }
    }
    SuiteResult {
        suite: format!("brute_force_exhaustive_binary_le_{max_len}"),
        cases,
        mismatches,
    }
}

/// DP against brute force on random pairs, lengths `<= 12`, `k <= 4`.
pub fn brute_force_random(instances: usize, seed: u64) -> SuiteResult {
    let mut rng = RngSeed::new(seed, 1).rng(0);
    let mut mismatches = 0;
    for _ in 0..instances {
        let k = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=12);
        let x = iid_symbols(&mut rng, k, len);
        let len = rng.gen_range(0..=12);
        let y = iid_symbols(&mut rng, k, len);
        if lcs::length(&x, &y) != oracle::brute_force(&x, &y) {
            mismatches += 1;
        }
    }
    SuiteResult {
        suite: "brute_force_random_le_12".into(),
        cases: instances,
        mismatches,
    }
}

/// Bit-parallel against the DP, lengths `<= 512`, `k` in {2, 3, 4, 8}.
pub fn bitparallel_random(instances: usize, seed: u64) -> SuiteResult {
    let mut rng = RngSeed::new(seed, 2).rng(0);
    let mut mismatches = 0;
    for _ in 0..instances {
        let k = [2, 3, 4, 8][rng.gen_range(0..4)];
        let len = rng.gen_range(0..=512);
        let x = iid_symbols(&mut rng, k, len);
        let len = rng.gen_range(0..=512);
        let y = iid_symbols(&mut rng, k, len);
        if lcs::length_bitparallel(&x, &y) != lcs::length(&x, &y) {
            mismatches += 1;
        }
    }
    SuiteResult {
        suite: "bitparallel_random_le_512".into(),
        cases: instances,
        mismatches,
    }
}

/// Extremal-gap DP (both objectives) against the extremum over every
/// enumerated optimal alignment, `|x|, |y| <= 12`, random blocks.
pub fn extremal_gaps_random(instances: usize, seed: u64) -> SuiteResult {
    let mut rng = RngSeed::new(seed, 3).rng(0);
    let mut mismatches = 0;
    for _ in 0..instances {
        let k = rng.gen_range(2..=4);
        let len = rng.gen_range(1..=12);
        let x = iid_symbols(&mut rng, k, len);
        let len = rng.gen_range(0..=12);
        let y = iid_symbols(&mut rng, k, len);
        let start = rng.gen_range(0..x.len());
        let length = rng.gen_range(1..=x.len() - start);
        let block = BlockSpec::new(start, length);

        let all = oracle::enumerate(&x, &y, usize::MAX);
        let gaps = all.alignments.iter().map(|a| gaps_of_alignment(a, block));
        let (lo, hi) = gaps.fold((usize::MAX, 0), |(lo, hi), g| (lo.min(g), hi.max(g)));
        let max = extremal_gaps(&x, &y, block, GapObjective::MaximizeGaps);
        let min = extremal_gaps(&x, &y, block, GapObjective::MinimizeGaps);
        let len = lcs::length(&x, &y);
        if max.gaps != hi || min.gaps != lo || max.lcs_len != len || min.lcs_len != len {
            mismatches += 1;
        }
    }
    SuiteResult {
        suite: "extremal_gaps_vs_enumeration_le_12".into(),
        cases: instances,
        mismatches,
    }
}

/// Every suite at the sizes used by the acceptance tests.
pub fn run_all(instances: usize, seed: u64) -> Vec<SuiteResult> {
    vec![
        brute_force_exhaustive(6),
        brute_force_random(instances, seed),
        bitparallel_random(instances, seed),
        extremal_gaps_random(instances, seed),
    ]
}
