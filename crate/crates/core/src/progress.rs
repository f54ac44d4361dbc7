//! Parallel trial execution with progress logging.
//!
//! Trials run on the current rayon pool; callers that want a bounded number of
//! workers install their own pool. Results come back ordered by trial index,
//! so output never depends on scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::Result;

static PROGRESS_EVERY: AtomicUsize = AtomicUsize::new(10);

/// Log a progress line every `every` completed trials (0 disables).
pub fn set_progress_interval(every: usize) {
    PROGRESS_EVERY.store(every, Ordering::Relaxed);
}

pub(crate) fn run_trials<T, F>(label: &str, trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let every = PROGRESS_EVERY.load(Ordering::Relaxed);
    let done = AtomicUsize::new(0);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let out = f(t)?;
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            if every > 0 && (n.is_multiple_of(every) || n == trials) {
                log::info!("{label}: {n}/{trials} trials");
            }
            Ok(out)
        })
        .collect()
}
