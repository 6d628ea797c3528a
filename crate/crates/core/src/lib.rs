//! Cramér–Rao bounds, quantization-loss ratios, estimators and a Monte Carlo
//! harness for pilot-based channel estimation behind a 1-bit hard limiter
//! whose threshold is unknown.
//!
//! Model: `y = zeta * x + eta` with balanced ±1 pilots `x` and unit-variance
//! Gaussian noise, observed either directly (ideal receiver) or through
//! `r = sign(y - alpha)` (1-bit receiver). SNR is `zeta²` in the
//! deterministic setting and the prior variance `sigma²` in the hybrid one.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod gauss;
pub mod harness;
pub mod quadrature;
pub mod selftest;
pub mod signal;

pub use bounds::{FisherMatrix, HybridBounds, HybridPrior, LossReport, SystemPoint};
pub use error::{Error, Result};
pub use estimators::{JointEstimate, SolverOptions};
pub use gauss::PhiPair;
pub use harness::{
    ExperimentConfig, LossKind, LossMeasure, McResult, Mode, Receiver, SweepTable, TableFormat,
};
pub use quadrature::{GaussHermite, QuadratureSpec};
pub use signal::{BinaryObservation, CountStatistic, IdealObservation, PilotLayout, PilotSequence};

/// Converts a linear power ratio to decibels.
#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Deterministic SNR convention: `zeta = 10^(snr_db / 20)`.
#[inline]
pub fn zeta_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 20.0)
}

/// Hybrid SNR convention: `sigma² = 10^(snr_db / 10)`.
#[inline]
pub fn sigma2_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}
