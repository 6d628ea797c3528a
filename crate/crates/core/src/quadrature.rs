//! Gauss–Hermite rules for expectations under a zero-mean Gaussian.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub order: usize,
}

impl QuadratureSpec {
    pub const DEFAULT_ORDER: usize = 80;
    pub const MIN_ORDER: usize = 20;

    pub fn new(order: usize) -> Self {
        Self { order }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < Self::MIN_ORDER {
            return Err(Error::InvalidArgument(format!(
                "quadrature order {} is below the minimum {}",
                self.order,
                Self::MIN_ORDER
            )));
        }
        Ok(())
    }

    pub fn rule(&self) -> Result<GaussHermite> {
        self.validate()?;
        Ok(GaussHermite::new(self.order))
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(Self::DEFAULT_ORDER)
    }
}

/// Nodes and weights for `∫ exp(-x²) f(x) dx` over the real line.
///
/// Nodes are stored in ascending order and are exactly antisymmetric
/// (`nodes[i] == -nodes[n-1-i]`).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds the `n`-point rule by Newton iteration on the orthonormal
    /// Hermite recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite order must be positive");
        const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
        let nf = n as f64;
        let half = n.div_ceil(2);
        let mut pos = vec![0.0f64; half];
        let mut logw = vec![0.0f64; half];
        let mut z = 0.0f64;
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * pos[0],
                3 => 1.91 * z - 0.91 * pos[1],
                _ => 2.0 * z - pos[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            pos[i] = z;
            logw[i] = 2.0f64.ln() - 2.0 * pp.abs().ln();
        }
        if n % 2 == 1 {
            // the middle node is zero to rounding; pin it
            pos[half - 1] = 0.0;
        }

        let mut nodes = Vec::with_capacity(n);
        let mut log_weights = Vec::with_capacity(n);
        for i in 0..half {
            nodes.push(-pos[i]);
            log_weights.push(logw[i]);
        }
        let mirror = if n % 2 == 1 { half - 1 } else { half };
        for i in (0..mirror).rev() {
            nodes.push(pos[i]);
            log_weights.push(logw[i]);
        }
        Self { nodes, log_weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_weights.iter().map(|w| w.exp())
    }

    /// `∫ exp(-x²) f(x) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights())
            .map(|(&x, w)| w * f(x))
            .sum()
    }

    /// `E[g(Z)]` for `Z ~ N(0, sigma2)`.
    pub fn expect_normal(&self, sigma2: f64, g: impl Fn(f64) -> f64) -> f64 {
        let scale = (2.0 * sigma2).sqrt();
        self.integrate(|x| g(scale * x)) / PI.sqrt()
    }

    /// `ln E[exp(h(Z))]` for `Z ~ N(0, sigma2)`, evaluated by log-sum-exp so
    /// that `h` may take values far outside the range of `exp`.
    pub fn log_expect_normal(&self, sigma2: f64, log_g: impl Fn(f64) -> f64) -> f64 {
        let scale = (2.0 * sigma2).sqrt();
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&x, &lw)| lw + log_g(scale * x))
            .collect();
        log_sum_exp(&terms) - 0.5 * PI.ln()
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}
