//! Fixtures shared by the benchmarks.

use hardlimit_core::harness::{alpha_grid, DEFAULT_SNR_DB};
use hardlimit_core::{CountStatistic, ExperimentConfig, Receiver};

/// Counts typical of `N = 4096` pilots at `zeta = 0.5`, `alpha = 0.3`.
pub fn typical_counts() -> CountStatistic {
    CountStatistic::new(883, 1294, 2048).expect("valid counts")
}

/// The figure grid: 21 offsets by 4 SNRs.
pub fn figure_grid() -> (Vec<f64>, Vec<f64>) {
    (alpha_grid(0.0, 1.0, 0.05).expect("valid grid"), DEFAULT_SNR_DB.to_vec())
}

/// A small Monte Carlo run for per-trial throughput.
pub fn small_experiment(receiver: Receiver) -> ExperimentConfig {
    ExperimentConfig::deterministic(receiver, 0.5, 0.3, 1024, 64).with_seed(1)
}
