//! Monte Carlo experiments, loss sweeps and table I/O.

pub mod experiment;
pub mod sweep;
pub mod table_io;

use serde::{Deserialize, Serialize};

pub use experiment::{run_monte_carlo, trial_observation, ExperimentConfig, McResult};
pub use sweep::{alpha_grid, sweep_loss, LossKind, LossMeasure, SweepTable, DEFAULT_SNR_DB};
pub use table_io::{parse_paper_txt, read_table, render_table, write_table, TableFormat, PAPER_TXT_DECIMALS};

/// Deterministic or random (Gaussian prior) channel coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Deterministic,
    Hybrid,
}

/// Receiver under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    /// Unquantized observations.
    Ideal,
    /// 1-bit observations, threshold estimated jointly.
    OnebitUnknown,
    /// 1-bit observations, threshold known to the receiver.
    OnebitKnown,
}
