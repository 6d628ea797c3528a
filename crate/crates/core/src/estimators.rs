//! Channel estimators for the ideal and the 1-bit receiver.
//!
//! The 1-bit objectives are written in terms of the count statistic. With
//! `u = alpha - zeta` and `v = alpha + zeta` the log-likelihood splits into
//! two independent binomial terms, which gives the joint MLE in closed form
//! and makes every objective here concave.

use serde::{Deserialize, Serialize};

use crate::bounds::HybridPrior;
use crate::error::{Error, Result};
use crate::gauss::{inverse_mills, log_q, qfunc_inv};
use crate::signal::{CountStatistic, IdealObservation, PilotSequence};

/// Options for the iterative 1-bit estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Convergence threshold on the gradient ∞-norm.
    pub gtol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-10,
            max_iter: 100,
        }
    }
}

/// Result of a 1-bit estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointEstimate {
    pub zeta_hat: f64,
    pub alpha_hat: f64,
    pub converged: bool,
    pub iterations: usize,
    /// An empirical frequency was pulled off 0 or 1.
    pub clamped: bool,
}

fn correlate(y: &IdealObservation, pilot: &PilotSequence) -> Result<f64> {
    if y.samples.len() != pilot.len() {
        return Err(Error::InvalidArgument(format!(
            "observation length {} does not match pilot length {}",
            y.samples.len(),
            pilot.len()
        )));
    }
    Ok(y.samples
        .iter()
        .zip(pilot.symbols())
        .map(|(&v, &x)| v * x as f64)
        .sum())
}

/// Matched filter `sum x_n y_n / N`.
pub fn ideal_mle(y: &IdealObservation, pilot: &PilotSequence) -> Result<f64> {
    Ok(correlate(y, pilot)? / pilot.len() as f64)
}

/// Posterior mode under the Gaussian prior: `sigma² sum x_n y_n / (1 + N sigma²)`.
pub fn ideal_map(y: &IdealObservation, pilot: &PilotSequence, prior: &HybridPrior) -> Result<f64> {
    let s = correlate(y, pilot)?;
    Ok(prior.sigma2 * s / (1.0 + pilot.len() as f64 * prior.sigma2))
}

/// Continuity-corrected frequencies clamped into `[1/(2M), 1 - 1/(2M)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedFrequencies {
    pub p_plus: f64,
    pub p_minus: f64,
    pub clamped: bool,
}

impl ClampedFrequencies {
    pub fn from_counts(counts: &CountStatistic) -> Self {
        let m = counts.half_n as f64;
        let lo = 0.5 / m;
        let hi = 1.0 - lo;
        let clamp = |k: u64| {
            let p = k as f64 / m;
            let c = p.clamp(lo, hi);
            (c, c != p)
        };
        let (p_plus, cp) = clamp(counts.k_plus);
        let (p_minus, cm) = clamp(counts.k_minus);
        Self {
            p_plus,
            p_minus,
            clamped: cp || cm,
        }
    }
}

/// Closed-form joint MLE of `(zeta, alpha)` from the counts.
pub fn onebit_jmle(counts: &CountStatistic) -> JointEstimate {
    let f = ClampedFrequencies::from_counts(counts);
    // p in (0, 1) after clamping (M >= 1), so the inverse cannot fail.
    let u = qfunc_inv(f.p_plus).expect("clamped frequency");
    let v = qfunc_inv(f.p_minus).expect("clamped frequency");
    JointEstimate {
        zeta_hat: 0.5 * (v - u),
        alpha_hat: 0.5 * (u + v),
        converged: true,
        iterations: 0,
        clamped: f.clamped,
    }
}

/// Objective `k ln Q(t) + (m - k) ln(1 - Q(t))` and its first two derivatives.
#[derive(Debug, Clone, Copy)]
struct BinomialTerm {
    k: f64,
    m: f64,
}

impl BinomialTerm {
    fn value(&self, t: f64) -> f64 {
        self.k * log_q(t) + (self.m - self.k) * log_q(-t)
    }

    fn d1(&self, t: f64) -> f64 {
        -self.k * inverse_mills(t) + (self.m - self.k) * inverse_mills(-t)
    }

    fn d2(&self, t: f64) -> f64 {
        let hp = inverse_mills(t);
        let hm = inverse_mills(-t);
        -self.k * hp * (hp - t) - (self.m - self.k) * hm * (hm + t)
    }
}

/// `J(zeta, alpha)`: count log-likelihood (with clamped effective counts)
/// plus an optional Gaussian log-prior on `zeta`.
#[derive(Debug, Clone, Copy)]
pub struct JointObjective {
    plus: BinomialTerm,
    minus: BinomialTerm,
    inv_sigma2: f64,
}

impl JointObjective {
    pub fn new(counts: &CountStatistic, prior: Option<&HybridPrior>) -> Self {
        let f = ClampedFrequencies::from_counts(counts);
        let m = counts.half_n as f64;
        Self {
            plus: BinomialTerm {
                k: f.p_plus * m,
                m,
            },
            minus: BinomialTerm {
                k: f.p_minus * m,
                m,
            },
            inv_sigma2: prior.map_or(0.0, |p| 1.0 / p.sigma2),
        }
    }

    pub fn value(&self, zeta: f64, alpha: f64) -> f64 {
        self.plus.value(alpha - zeta) + self.minus.value(alpha + zeta)
            - 0.5 * zeta * zeta * self.inv_sigma2
    }

    /// `(dJ/dzeta, dJ/dalpha)`
    pub fn gradient(&self, zeta: f64, alpha: f64) -> [f64; 2] {
        let gu = self.plus.d1(alpha - zeta);
        let gv = self.minus.d1(alpha + zeta);
        [gv - gu - zeta * self.inv_sigma2, gu + gv]
    }

    /// `[[J_zz, J_za], [J_za, J_aa]]`
    pub fn hessian(&self, zeta: f64, alpha: f64) -> [[f64; 2]; 2] {
        let hu = self.plus.d2(alpha - zeta);
        let hv = self.minus.d2(alpha + zeta);
        let za = hv - hu;
        [[hu + hv - self.inv_sigma2, za], [za, hu + hv]]
    }

    fn scale(&self) -> f64 {
        self.plus.m.max(1.0)
    }
}

fn inf_norm(g: [f64; 2]) -> f64 {
    g[0].abs().max(g[1].abs())
}

/// Maximizes a concave 1D function on `[lo, hi]` by golden-section search.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (hi - lo).abs() <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Damped Newton ascent on a concave objective in `DIM` variables.
struct Ascent<'a, const DIM: usize> {
    value: &'a dyn Fn(&[f64; DIM]) -> f64,
    gradient: &'a dyn Fn(&[f64; DIM]) -> [f64; DIM],
    direction: &'a dyn Fn(&[f64; DIM], &[f64; DIM]) -> Option<[f64; DIM]>,
    /// gradient norm accepted once steps stop changing the iterate
    floor: f64,
}

enum AscentOutcome<const DIM: usize> {
    Converged([f64; DIM], usize),
    Stalled([f64; DIM], usize),
}

impl<const DIM: usize> Ascent<'_, DIM> {
    fn grad_norm(&self, x: &[f64; DIM]) -> f64 {
        (self.gradient)(x).iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    fn run(&self, start: [f64; DIM], opts: &SolverOptions) -> AscentOutcome<DIM> {
        let mut x = start;
        let mut fx = (self.value)(&x);
        for iter in 0..opts.max_iter {
            let g = (self.gradient)(&x);
            let gnorm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gnorm < opts.gtol {
                return AscentOutcome::Converged(x, iter);
            }
            let dir = (self.direction)(&x, &g).unwrap_or(g);
            let mut step = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let mut trial = x;
                for i in 0..DIM {
                    trial[i] += step * dir[i];
                }
                let ft = (self.value)(&trial);
                // Close to the optimum the gain of a Newton step drops below
                // the rounding of the objective; accept such steps when they
                // still reduce the gradient.
                let level = 4.0 * f64::EPSILON * (fx.abs() + 1.0);
                let accept = ft >= fx || (ft >= fx - level && self.grad_norm(&trial) < gnorm);
                if ft.is_finite() && accept {
                    moved = trial != x;
                    x = trial;
                    fx = ft;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                if gnorm <= self.floor {
                    return AscentOutcome::Converged(x, iter + 1);
                }
                return AscentOutcome::Stalled(x, iter + 1);
            }
        }
        if self.grad_norm(&x) < opts.gtol {
            AscentOutcome::Converged(x, opts.max_iter)
        } else {
            AscentOutcome::Stalled(x, opts.max_iter)
        }
    }
}

/// Solves the 2×2 Newton system; `None` if the Hessian is not negative definite.
fn newton_direction_2d(h: [[f64; 2]; 2], g: [f64; 2]) -> Option<[f64; 2]> {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if !(h[0][0] < 0.0 && det > 0.0) {
        return None;
    }
    // d = -H^{-1} g
    let d0 = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
    let d1 = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
    (d0.is_finite() && d1.is_finite()).then_some([d0, d1])
}

/// JMAP-MLE: maximizes the count log-likelihood plus the Gaussian log-prior
/// on `zeta`, starting from the closed-form joint MLE.
pub fn onebit_jmapmle(
    counts: &CountStatistic,
    prior: &HybridPrior,
    opts: &SolverOptions,
) -> Result<JointEstimate> {
    let start = onebit_jmle(counts);
    let obj = JointObjective::new(counts, Some(prior));
    let value = |x: &[f64; 2]| obj.value(x[0], x[1]);
    let gradient = |x: &[f64; 2]| obj.gradient(x[0], x[1]);
    let direction = |x: &[f64; 2], g: &[f64; 2]| newton_direction_2d(obj.hessian(x[0], x[1]), *g);
    let ascent = Ascent {
        value: &value,
        gradient: &gradient,
        direction: &direction,
        floor: 1e-9 * obj.scale(),
    };
    let (x, iterations) = match ascent.run([start.zeta_hat, start.alpha_hat], opts) {
        AscentOutcome::Converged(x, it) => (x, it),
        AscentOutcome::Stalled(x, it) => {
            let (x, sweeps) = alternating_golden(&obj, x, opts);
            let gnorm = inf_norm(obj.gradient(x[0], x[1]));
            if !(gnorm < opts.gtol || gnorm <= ascent.floor) {
                return Err(Error::Convergence {
                    zeta: x[0],
                    alpha: x[1],
                    grad_norm: gnorm,
                    iterations: it + sweeps,
                });
            }
            (x, it + sweeps)
        }
    };
    Ok(JointEstimate {
        zeta_hat: x[0],
        alpha_hat: x[1],
        converged: true,
        iterations,
        clamped: start.clamped,
    })
}

/// Coordinate-wise golden-section ascent used when Newton stalls.
fn alternating_golden(obj: &JointObjective, mut x: [f64; 2], opts: &SolverOptions) -> ([f64; 2], usize) {
    let mut width = 1.0;
    for sweep in 0..opts.max_iter.max(1) {
        let prev = x;
        x[0] = golden_section(|z| obj.value(z, x[1]), x[0] - width, x[0] + width);
        x[1] = golden_section(|a| obj.value(x[0], a), x[1] - width, x[1] + width);
        let change = (x[0] - prev[0]).abs().max((x[1] - prev[1]).abs());
        if change < 1e-14 * (1.0 + x[0].abs() + x[1].abs()) {
            return (x, sweep + 1);
        }
        width = (4.0 * change).clamp(1e-6, 1.0);
    }
    (x, opts.max_iter)
}

/// Estimates `zeta` with the threshold fixed at `alpha` (known-threshold
/// receiver), optionally with the Gaussian prior (hybrid setting).
pub fn onebit_known_threshold(
    counts: &CountStatistic,
    alpha: f64,
    prior: Option<&HybridPrior>,
    opts: &SolverOptions,
) -> Result<JointEstimate> {
    let start = onebit_jmle(counts);
    let obj = JointObjective::new(counts, prior);
    let value = |x: &[f64; 1]| obj.value(x[0], alpha);
    let gradient = |x: &[f64; 1]| [obj.gradient(x[0], alpha)[0]];
    let direction = |x: &[f64; 1], g: &[f64; 1]| {
        let h = obj.hessian(x[0], alpha)[0][0];
        (h < 0.0).then(|| [-g[0] / h])
    };
    let ascent = Ascent {
        value: &value,
        gradient: &gradient,
        direction: &direction,
        floor: 1e-9 * obj.scale(),
    };
    let (zeta, iterations) = match ascent.run([start.zeta_hat], opts) {
        AscentOutcome::Converged(x, it) => (x[0], it),
        AscentOutcome::Stalled(x, it) => {
            let z = golden_section(|z| obj.value(z, alpha), x[0] - 4.0, x[0] + 4.0);
            let gnorm = obj.gradient(z, alpha)[0].abs();
            if !(gnorm < opts.gtol || gnorm <= ascent.floor) {
                return Err(Error::Convergence {
                    zeta: z,
                    alpha,
                    grad_norm: gnorm,
                    iterations: it,
                });
            }
            (z, it)
        }
    };
    Ok(JointEstimate {
        zeta_hat: zeta,
        alpha_hat: alpha,
        converged: true,
        iterations,
        clamped: start.clamped,
    })
}
