//! Loss tables over an α grid and a list of SNR values.

use serde::{Deserialize, Serialize};

use super::Mode;
use crate::bounds::{loss_deterministic, loss_hybrid, HybridPrior, LossReport};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::{sigma2_from_snr_db, zeta_from_snr_db};

/// SNR columns of the default tables, in dB.
pub const DEFAULT_SNR_DB: [f64; 4] = [-25.0, -10.0, -5.0, -2.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMeasure {
    /// threshold unknown
    Chi,
    /// threshold known
    ChiStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LossKind {
    pub measure: LossMeasure,
    pub mode: Mode,
}

impl LossKind {
    pub fn new(measure: LossMeasure, mode: Mode) -> Self {
        Self { measure, mode }
    }
}

/// Loss values in dB; `values_db[i][j]` belongs to `alpha_grid[i]` and
/// `snr_db_list[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub kind: LossKind,
    pub alpha_grid: Vec<f64>,
    pub snr_db_list: Vec<f64>,
    pub values_db: Vec<Vec<f64>>,
}

impl SweepTable {
    /// Shape and finiteness check.
    pub fn validate(&self) -> Result<()> {
        if self.values_db.len() != self.alpha_grid.len()
            || self.values_db.iter().any(|row| row.len() != self.snr_db_list.len())
        {
            return Err(Error::InvalidArgument(
                "table dimensions do not match its grids".into(),
            ));
        }
        if self.values_db.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("table contains non-finite entries".into()));
        }
        Ok(())
    }

    /// Column `j` (one SNR value) as a vector over α.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values_db.iter().map(|row| row[j]).collect()
    }
}

/// `min, min+step, ...` up to and including `max` (within rounding).
pub fn alpha_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !min.is_finite() || !max.is_finite() || max < min {
        return Err(Error::InvalidArgument(format!(
            "invalid alpha grid min={min}, max={max}, step={step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

fn pick(report: LossReport, measure: LossMeasure) -> f64 {
    match measure {
        LossMeasure::Chi => report.chi_db,
        LossMeasure::ChiStar => report.chi_star_db,
    }
}

/// Evaluates the loss of `kind` on the grid. SNR maps to `zeta = 10^(s/20)`
/// (deterministic) or `sigma² = 10^(s/10)` (hybrid).
pub fn sweep_loss(
    kind: LossKind,
    alpha_grid: &[f64],
    snr_db_list: &[f64],
    quad: &QuadratureSpec,
) -> Result<SweepTable> {
    if alpha_grid.is_empty() || snr_db_list.is_empty() {
        return Err(Error::InvalidArgument("sweep grids must be nonempty".into()));
    }
    if alpha_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("alpha grid must be strictly ascending".into()));
    }
    if kind.mode == Mode::Hybrid {
        quad.validate()?;
    }
    let mut values_db = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let mut row = Vec::with_capacity(snr_db_list.len());
        for &snr_db in snr_db_list {
            let at = |source: Error| Error::Grid {
                alpha,
                snr_db,
                source: Box::new(source),
            };
            let report = match kind.mode {
                Mode::Deterministic => loss_deterministic(zeta_from_snr_db(snr_db), alpha),
                Mode::Hybrid => {
                    let prior = HybridPrior::new(sigma2_from_snr_db(snr_db)).map_err(at)?;
                    loss_hybrid(alpha, &prior, quad).map_err(at)?
                }
            };
            let v = pick(report, kind.measure);
            if !v.is_finite() {
                return Err(at(Error::InvalidArgument(format!("non-finite loss {v}"))));
            }
            row.push(v);
        }
        values_db.push(row);
    }
    Ok(SweepTable {
        kind,
        alpha_grid: alpha_grid.to_vec(),
        snr_db_list: snr_db_list.to_vec(),
        values_db,
    })
}
