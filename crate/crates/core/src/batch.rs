//! Trial fan-out: run one scenario configuration across many derived seeds.
//!
//! With the `parallel` feature (on by default) the trials run on a rayon
//! pool; without it the same API runs sequentially. Either way results come
//! back in seed order, so downstream output is order-deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{run_scenario, ScenarioConfig, Summary};

/// Seed of trial `index` for a batch rooted at `base`. Trials use
/// consecutive seeds; the generator expands each through its own stream, so
/// adjacent seeds are statistically independent.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    pub summary: Summary,
}

fn run_one(config: &ScenarioConfig, trial: u64) -> Result<TrialResult> {
    let mut cfg = config.clone();
    cfg.seed = trial_seed(config.seed, trial);
    cfg.trials = 1;
    let (_, summary) = run_scenario(&cfg)?;
    Ok(TrialResult {
        trial,
        seed: cfg.seed,
        summary,
    })
}

/// Sequential reference implementation; always available.
pub fn run_trials_seq(config: &ScenarioConfig, trials: u64) -> Result<Vec<TrialResult>> {
    (0..trials).map(|t| run_one(config, t)).collect()
}

/// Fan the trials out over the rayon pool, reduced back in seed order.
#[cfg(feature = "parallel")]
pub fn run_trials(config: &ScenarioConfig, trials: u64) -> Result<Vec<TrialResult>> {
    (0..trials)
        .into_par_iter()
        .map(|t| run_one(config, t))
        .collect()
}

/// Sequential fallback when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn run_trials(config: &ScenarioConfig, trials: u64) -> Result<Vec<TrialResult>> {
    run_trials_seq(config, trials)
}

/// Order-insensitive aggregate counts of a batch.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct BatchAggregate {
    pub trials: u64,
    pub total_tally: u64,
    pub total_aborts: u64,
    pub total_invalid: u64,
}

pub fn aggregate(results: &[TrialResult]) -> BatchAggregate {
    BatchAggregate {
        trials: results.len() as u64,
        total_tally: results.iter().map(|r| r.summary.tally).sum(),
        total_aborts: results.iter().map(|r| u64::from(r.summary.aborts)).sum(),
        total_invalid: results.iter().map(|r| u64::from(r.summary.invalid)).sum(),
    }
}
