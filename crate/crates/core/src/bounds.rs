//! Fisher information, Cramér–Rao bounds and quantization-loss ratios.
//!
//! With balanced pilots every sample with `x_n = +1` contributes the density
//! `phi(alpha - zeta)` and every sample with `x_n = -1` contributes
//! `phi(alpha + zeta)`, so all information quantities are closed-form in the
//! pair `(phi_plus, phi_minus)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{log_phi, phi_pair, PhiPair};
use crate::quadrature::{GaussHermite, QuadratureSpec};
use crate::to_db;

/// Smallest determinant (or information) accepted before a bound is
/// declared singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-300;

/// Relative agreement required between the plus and minus forms of the
/// hybrid expectation.
pub const QUADRATURE_AGREEMENT: f64 = 1e-6;

/// Parameter point `(zeta, alpha)` with sample count `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemPoint {
    pub zeta: f64,
    pub alpha: f64,
    pub n: u64,
}

impl SystemPoint {
    pub fn new(zeta: f64, alpha: f64, n: u64) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "sample count must be even and at least 2, got {n}"
            )));
        }
        if !zeta.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite system point zeta={zeta}, alpha={alpha}"
            )));
        }
        Ok(Self { zeta, alpha, n })
    }

    pub fn phi(&self) -> PhiPair {
        phi_pair(self.zeta, self.alpha)
    }
}

/// 2×2 Fisher information of `(zeta, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherMatrix {
    pub f_zz: f64,
    pub f_za: f64,
    pub f_aa: f64,
}

impl FisherMatrix {
    /// `f_zz f_aa - f_za²` using Kahan's fma-compensated 2×2 determinant.
    pub fn determinant(&self) -> f64 {
        let w = self.f_za * self.f_za;
        let err = (-self.f_za).mul_add(self.f_za, w);
        let det = self.f_zz.mul_add(self.f_aa, -w);
        det + err
    }

    /// `(zeta, zeta)` entry of the inverse.
    pub fn inverse_zz(&self) -> f64 {
        self.f_aa / self.determinant()
    }

    /// `(alpha, alpha)` entry of the inverse.
    pub fn inverse_aa(&self) -> f64 {
        self.f_zz / self.determinant()
    }
}

/// Fisher information of the ideal receiver, `sum x_n² = N`.
pub fn fisher_ideal(point: &SystemPoint) -> f64 {
    point.n as f64
}

/// Ideal-receiver CRLB `1/N`.
pub fn crlb_ideal(point: &SystemPoint) -> f64 {
    1.0 / fisher_ideal(point)
}

pub fn fisher_1bit(point: &SystemPoint) -> FisherMatrix {
    let phi = point.phi();
    let half = point.n as f64 / 2.0;
    let diag = half * (phi.phi_plus + phi.phi_minus);
    FisherMatrix {
        f_zz: diag,
        f_za: half * (phi.phi_plus - phi.phi_minus),
        f_aa: diag,
    }
}

fn nonsingular_determinant(point: &SystemPoint, fisher: &FisherMatrix) -> Result<f64> {
    let det = fisher.determinant();
    if !(det > SINGULAR_THRESHOLD) || !det.is_finite() {
        return Err(Error::Singular {
            zeta: point.zeta,
            alpha: point.alpha,
            determinant: det,
        });
    }
    Ok(det)
}

/// CRLB on `zeta` when the threshold is estimated jointly:
/// `F_aa / (F_zz F_aa - F_za²)`.
pub fn crlb_1bit_unknown(point: &SystemPoint) -> Result<f64> {
    let fisher = fisher_1bit(point);
    let det = nonsingular_determinant(point, &fisher)?;
    Ok(fisher.f_aa / det)
}

/// Same bound through the reduced form `(1/2N)(1/phi_plus + 1/phi_minus)`,
/// using `det = N² phi_plus phi_minus`.
pub fn crlb_1bit_unknown_reduced(point: &SystemPoint) -> f64 {
    let phi = point.phi();
    ((-phi.log_plus).exp() + (-phi.log_minus).exp()) / (2.0 * point.n as f64)
}

/// CRLB on the threshold under joint estimation, `F_zz / det`.
pub fn crlb_1bit_alpha(point: &SystemPoint) -> Result<f64> {
    let fisher = fisher_1bit(point);
    let det = nonsingular_determinant(point, &fisher)?;
    Ok(fisher.f_zz / det)
}

/// CRLB on `zeta` with the threshold known: `1 / F_zz`.
pub fn crlb_1bit_known(point: &SystemPoint) -> Result<f64> {
    let f_zz = fisher_1bit(point).f_zz;
    if !(f_zz > SINGULAR_THRESHOLD) {
        return Err(Error::Singular {
            zeta: point.zeta,
            alpha: point.alpha,
            determinant: f_zz,
        });
    }
    Ok(1.0 / f_zz)
}

/// Quantization losses in linear scale and dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    /// unknown threshold
    pub chi: f64,
    /// known threshold
    pub chi_star: f64,
    pub chi_db: f64,
    pub chi_star_db: f64,
}

impl LossReport {
    pub fn from_linear(chi: f64, chi_star: f64) -> Self {
        Self {
            chi,
            chi_star,
            chi_db: to_db(chi),
            chi_star_db: to_db(chi_star),
        }
    }
}

/// Deterministic-parameter losses: `chi` is the harmonic mean and `chi_star`
/// the arithmetic mean of the phi pair.
pub fn loss_deterministic(zeta: f64, alpha: f64) -> LossReport {
    let phi = phi_pair(zeta, alpha);
    let chi = 2.0 / ((-phi.log_plus).exp() + (-phi.log_minus).exp());
    let chi_star = 0.5 * (phi.phi_plus + phi.phi_minus);
    LossReport::from_linear(chi, chi_star)
}

/// Zero-mean Gaussian prior on the channel coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridPrior {
    pub sigma2: f64,
}

impl HybridPrior {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "prior variance must be positive and finite, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }

    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(crate::sigma2_from_snr_db(snr_db))
    }
}

/// `E[1/phi(alpha + zeta)]` and `E[1/phi(alpha - zeta)]` under the prior.
fn inverse_phi_expectations(alpha: f64, prior: &HybridPrior, rule: &GaussHermite) -> (f64, f64) {
    let plus = rule.log_expect_normal(prior.sigma2, |z| -log_phi(alpha + z)).exp();
    let minus = rule.log_expect_normal(prior.sigma2, |z| -log_phi(alpha - z)).exp();
    (plus, minus)
}

// 1/phi(t) grows like exp(t²/2), so both hybrid expectations are infinite
// once the prior variance reaches the unit noise variance.
fn check_integrable(alpha: f64, prior: &HybridPrior) -> Result<()> {
    if prior.sigma2 >= 1.0 {
        return Err(Error::Divergent {
            alpha,
            sigma2: prior.sigma2,
        });
    }
    Ok(())
}

fn psi_h_with(alpha: f64, prior: &HybridPrior, rule: &GaussHermite) -> Result<f64> {
    check_integrable(alpha, prior)?;
    let (plus, minus) = inverse_phi_expectations(alpha, prior, rule);
    let mean = 0.5 * (plus + minus);
    if !mean.is_finite() || (plus - minus).abs() > QUADRATURE_AGREEMENT * mean {
        return Err(Error::Quadrature {
            alpha,
            sigma2: prior.sigma2,
            plus,
            minus,
        });
    }
    Ok(mean)
}

/// `E[1/(phi_plus + phi_minus)]` under the prior.
fn inverse_phi_sum_expectation(alpha: f64, prior: &HybridPrior, rule: &GaussHermite) -> Result<f64> {
    check_integrable(alpha, prior)?;
    let value = rule
        .log_expect_normal(prior.sigma2, |z| -phi_pair(z, alpha).log_sum())
        .exp();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            alpha,
            sigma2: prior.sigma2,
            plus: value,
            minus: value,
        });
    }
    Ok(value)
}

/// `Psi_H = E_zeta[1/phi_minus] = E_zeta[1/phi_plus]`.
pub fn psi_h(alpha: f64, prior: &HybridPrior, quad: &QuadratureSpec) -> Result<f64> {
    psi_h_with(alpha, prior, &quad.rule()?)
}

/// Expected bounds of the hybrid setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridBounds {
    /// ideal receiver, `1/N`
    pub mse_y: f64,
    /// 1-bit receiver, unknown threshold, `Psi_H / N`
    pub mse_r: f64,
    /// 1-bit receiver, known threshold, `(2/N) E[1/(phi_plus + phi_minus)]`
    pub mse_r_star: f64,
}

pub fn hybrid_bounds(
    alpha: f64,
    prior: &HybridPrior,
    n: u64,
    quad: &QuadratureSpec,
) -> Result<HybridBounds> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let rule = quad.rule()?;
    let nf = n as f64;
    Ok(HybridBounds {
        mse_y: 1.0 / nf,
        mse_r: psi_h_with(alpha, prior, &rule)? / nf,
        mse_r_star: 2.0 * inverse_phi_sum_expectation(alpha, prior, &rule)? / nf,
    })
}

/// Hybrid losses `chi = 1/Psi_H` and `chi_star = 1/(2 E[1/(phi_plus + phi_minus)])`.
pub fn loss_hybrid(alpha: f64, prior: &HybridPrior, quad: &QuadratureSpec) -> Result<LossReport> {
    let rule = quad.rule()?;
    let psi = psi_h_with(alpha, prior, &rule)?;
    let inv_sum = inverse_phi_sum_expectation(alpha, prior, &rule)?;
    Ok(LossReport::from_linear(1.0 / psi, 1.0 / (2.0 * inv_sum)))
}
