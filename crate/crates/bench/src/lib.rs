//! Shared inputs for the criterion benchmarks.

use hyperred_core::selfcheck::{case_rng, random_config};
use hyperred_core::tree::BranchConfig;

/// Deterministic corpus of configurations across the supported genera.
pub fn corpus(cases: usize) -> Vec<BranchConfig> {
    (0..cases)
        .map(|i| {
            let mut rng = case_rng(1729, i as u64);
            random_config(&mut rng, 1 + i % 4)
        })
        .collect()
}
