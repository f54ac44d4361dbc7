//! A laboratory for the microstructure of optimal LCS alignments.
//!
//! The crate computes longest common subsequences of random strings in which
//! a long constant block has been inserted, measures how many block symbols
//! optimal alignments leave unmatched, and estimates the mean LCS function
//! `gamma_k(p)` by seeded Monte Carlo with confidence intervals.
//!
//! Modules, bottom up:
//!
//! * [`seq`], [`lcs`], [`oracle`]: sequences, exact LCS (quadratic DP,
//!   bit-parallel length, traceback) and brute-force oracles.
//! * [`block`]: gap counts of a designated block, extremal over all optimal
//!   alignments, and natural-block discovery.
//! * [`generators`]: reproducible iid strings and the block-insertion model.
//! * [`estimate`], [`estimators`]: Monte Carlo estimates of `gamma_k(n, p)`,
//!   curves, one-sided derivatives and diagnostic checks.
//! * [`experiments`]: gap and LCS-gain tables and event frequencies.
//! * [`report`]: CSV / JSON emission.

pub mod block;
pub mod error;
pub mod estimate;
pub mod estimators;
pub mod experiments;
pub mod generators;
pub mod lcs;
pub mod oracle;
pub mod progress;
pub mod report;
pub mod selfcheck;
pub mod seq;

pub use block::{
    extremal_block_gaps, find_natural_block, gaps_of_alignment, BlockGapStats, BlockSpec,
    GapObjective, RunMatch,
};
pub use error::{LabError, Result};
pub use estimate::{CiKind, Estimate};
pub use estimators::{
    check_condition3, estimate_curve, estimate_gamma, estimate_right_derivative, GammaCurve,
    Verdict,
};
pub use experiments::{
    estimate_event_probability, heuristic_delta, run_delta_trials, run_gap_trials, run_table_suite,
    BlockMode, Event, ExperimentConfig, TableRow, TrialRecord,
};
pub use generators::{
    excise_block, excise_block_prefix, gen_iid, make_model_instance, ModelInstance, RngSeed,
};
pub use lcs::{lcs_length, lcs_length_bitparallel, one_optimal_alignment};
pub use oracle::{brute_force_lcs, enumerate_optimal_alignments, AlignmentEnumeration};
pub use seq::{Alignment, Alphabet, SymbolSequence};
