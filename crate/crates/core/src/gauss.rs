//! Gaussian scalar kernels: the Q-function, its inverse, log-domain tails and
//! the per-symbol information density `phi(t) = pdf(t)^2 / (Q(t) (1 - Q(t)))`.
//!
//! Everything here is evaluated so that relative accuracy survives in the far
//! tails. For `x >= 0` the upper tail is written as `Q(x) = pdf(x) R(x)` where
//! `R` is the Mills ratio; `log Q` is then `log pdf + log R` and never needs
//! the (possibly denormal) value of `Q` itself.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// `0.5 * ln(2 pi)`
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this point the Mills-ratio continued fraction replaces `erfc`.
const CF_THRESHOLD: f64 = 26.0;

/// Natural log of the standard normal density.
#[inline]
pub fn log_pdf(x: f64) -> f64 {
    -0.5 * x * x - HALF_LN_2PI
}

/// Standard normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    log_pdf(x).exp()
}

/// Mills ratio `Q(x) / pdf(x)` for `x >= CF_THRESHOLD`, by modified Lentz
/// evaluation of `1/(x + 1/(x + 2/(x + 3/(x + ...))))`.
fn mills_ratio_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..500 {
        let a = if j == 1 { 1.0 } else { (j - 1) as f64 };
        d = x + a * d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Upper tail for nonnegative arguments.
fn upper_tail_nonneg(x: f64) -> f64 {
    if x < CF_THRESHOLD {
        0.5 * libm::erfc(x * FRAC_1_SQRT_2)
    } else {
        log_upper_tail_nonneg(x).exp()
    }
}

fn log_upper_tail_nonneg(x: f64) -> f64 {
    if x < CF_THRESHOLD {
        (0.5 * libm::erfc(x * FRAC_1_SQRT_2)).ln()
    } else {
        log_pdf(x) + mills_ratio_cf(x).ln()
    }
}

/// `Q(x)` without input validation; NaN propagates.
pub fn q_unchecked(x: f64) -> f64 {
    if x >= 0.0 {
        upper_tail_nonneg(x)
    } else if x < 0.0 {
        1.0 - upper_tail_nonneg(-x)
    } else {
        f64::NAN
    }
}

/// Upper-tail probability of the standard normal distribution.
pub fn qfunc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            function: "qfunc",
            value: x,
        });
    }
    Ok(q_unchecked(x))
}

/// `ln Q(x)`, relative-accurate for large positive `x`.
pub fn log_q(x: f64) -> f64 {
    if x >= 0.0 {
        log_upper_tail_nonneg(x)
    } else {
        (-upper_tail_nonneg(-x)).ln_1p()
    }
}

/// `ln(1 - Q(x)) = ln Q(-x)`.
#[inline]
pub fn log_q_complement(x: f64) -> f64 {
    log_q(-x)
}

/// Inverse Mills ratio `pdf(x) / Q(x)`, i.e. `-d/dx ln Q(x)`.
pub fn inverse_mills(x: f64) -> f64 {
    (log_pdf(x) - log_q(x)).exp()
}

// Rational approximation to the normal quantile (lower tail), relative error
// around 1e-9; refined by Newton below.
const QA: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_690e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const QB: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const QC: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const QD: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

/// Initial guess for `Q^{-1}(p)` with `0 < p <= 0.5`.
fn qinv_guess(p: f64) -> f64 {
    const P_LOW: f64 = 0.024_25;
    // Lower-tail quantile Phi^{-1}(p); Q^{-1}(p) is its negative.
    let lower = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    };
    -lower
}

/// Inverse Q-function: the `x` with `Q(x) = p`, for `0 < p < 1`.
pub fn qfunc_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            function: "qfunc_inv",
            value: p,
        });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        // 1 - p is exact here.
        return Ok(-qinv_lower_half(1.0 - p));
    }
    Ok(qinv_lower_half(p))
}

fn qinv_lower_half(p: f64) -> f64 {
    let ln_p = p.ln();
    let mut x = qinv_guess(p);
    // Newton on ln Q(x) - ln p; d/dx ln Q = -inverse_mills.
    for _ in 0..2 {
        x += (log_q(x) - ln_p) / inverse_mills(x);
    }
    x
}

/// `ln phi(t)` with `phi(t) = exp(-t^2) / (2 pi Q(t) (1 - Q(t)))`.
///
/// Even in `t` by construction: only `|t|` enters the computation.
pub fn log_phi(t: f64) -> f64 {
    let a = t.abs();
    let tail = upper_tail_nonneg(a);
    -a * a - (2.0 * PI).ln() - log_upper_tail_nonneg(a) - (-tail).ln_1p()
}

/// The information densities of the two pilot symbols.
///
/// `phi_plus` is evaluated at `alpha + zeta`, `phi_minus` at `alpha - zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPair {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub log_plus: f64,
    pub log_minus: f64,
}

impl PhiPair {
    pub fn new(zeta: f64, alpha: f64) -> Self {
        let log_plus = log_phi(alpha + zeta);
        let log_minus = log_phi(alpha - zeta);
        Self {
            phi_plus: log_plus.exp(),
            phi_minus: log_minus.exp(),
            log_plus,
            log_minus,
        }
    }

    pub fn sum(&self) -> f64 {
        self.phi_plus + self.phi_minus
    }

    /// `ln(phi_plus + phi_minus)` without leaving the log domain.
    pub fn log_sum(&self) -> f64 {
        let (hi, lo) = if self.log_plus >= self.log_minus {
            (self.log_plus, self.log_minus)
        } else {
            (self.log_minus, self.log_plus)
        };
        hi + (lo - hi).exp().ln_1p()
    }
}

/// `phi_pair(zeta, alpha)`.
pub fn phi_pair(zeta: f64, alpha: f64) -> PhiPair {
    PhiPair::new(zeta, alpha)
}
