//! Monte Carlo estimation of empirical MSEs against their asymptotic bounds.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Mode, Receiver};
use crate::bounds::{self, HybridPrior, SystemPoint};
use crate::error::{Error, Result};
use crate::estimators::{self, SolverOptions};
use crate::quadrature::QuadratureSpec;
use crate::signal::{self, IdealObservation, PilotLayout, PilotSequence};

/// Maximum fraction of trials whose estimator may fail.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// z-value of the two-sided 95% normal interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub receiver: Receiver,
    /// Channel coefficient (deterministic mode).
    pub zeta: Option<f64>,
    /// Prior variance (hybrid mode).
    pub sigma2: Option<f64>,
    pub alpha: f64,
    pub n: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub pilot_layout: PilotLayout,
    pub solver: SolverOptions,
    pub quadrature: QuadratureSpec,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn deterministic(receiver: Receiver, zeta: f64, alpha: f64, n: u64, trials: u64) -> Self {
        Self {
            mode: Mode::Deterministic,
            receiver,
            zeta: Some(zeta),
            sigma2: None,
            alpha,
            n,
            trials,
            master_seed: 0,
            pilot_layout: PilotLayout::default(),
            solver: SolverOptions::default(),
            quadrature: QuadratureSpec::default(),
            workers: None,
        }
    }

    pub fn hybrid(receiver: Receiver, sigma2: f64, alpha: f64, n: u64, trials: u64) -> Self {
        Self {
            mode: Mode::Hybrid,
            zeta: None,
            sigma2: Some(sigma2),
            ..Self::deterministic(receiver, 0.0, alpha, n, trials)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n < 2 || self.n % 2 != 0 {
            return bad(format!("n must be even and at least 2, got {}", self.n));
        }
        if !self.alpha.is_finite() {
            return bad(format!("alpha must be finite, got {}", self.alpha));
        }
        match self.mode {
            Mode::Deterministic => {
                if self.sigma2.is_some() {
                    return bad("deterministic mode takes zeta, not a prior variance".into());
                }
                match self.zeta {
                    Some(z) if z.is_finite() => {}
                    _ => return bad("deterministic mode requires a finite zeta".into()),
                }
            }
            Mode::Hybrid => {
                if self.zeta.is_some() {
                    return bad("hybrid mode takes a prior variance, not zeta".into());
                }
                match self.sigma2 {
                    Some(s) => {
                        HybridPrior::new(s)?;
                    }
                    None => return bad("hybrid mode requires a prior variance".into()),
                }
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    fn prior(&self) -> Option<HybridPrior> {
        self.sigma2.map(|sigma2| HybridPrior { sigma2 })
    }

    /// Bound the empirical MSE of `zeta` is compared against, and the
    /// threshold bound where the receiver estimates it.
    pub fn reference_bounds(&self) -> Result<(f64, Option<f64>)> {
        let nf = self.n as f64;
        match self.mode {
            Mode::Deterministic => {
                let point = SystemPoint::new(self.zeta.unwrap_or(0.0), self.alpha, self.n)?;
                Ok(match self.receiver {
                    Receiver::Ideal => (bounds::crlb_ideal(&point), None),
                    Receiver::OnebitUnknown => (
                        bounds::crlb_1bit_unknown(&point)?,
                        Some(bounds::crlb_1bit_alpha(&point)?),
                    ),
                    Receiver::OnebitKnown => (bounds::crlb_1bit_known(&point)?, None),
                })
            }
            Mode::Hybrid => {
                let prior = self.prior().expect("validated");
                Ok(match self.receiver {
                    Receiver::Ideal => (1.0 / nf, None),
                    Receiver::OnebitUnknown => {
                        let b = bounds::hybrid_bounds(self.alpha, &prior, self.n, &self.quadrature)?;
                        // F_zz = F_aa, so the threshold bound coincides with the zeta bound.
                        (b.mse_r, Some(b.mse_r))
                    }
                    Receiver::OnebitKnown => {
                        let b = bounds::hybrid_bounds(self.alpha, &prior, self.n, &self.quadrature)?;
                        (b.mse_r_star, None)
                    }
                })
            }
        }
    }
}

/// Summary of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub mse_zeta: f64,
    pub mse_alpha: Option<f64>,
    pub crlb_ref: f64,
    pub crlb_alpha_ref: Option<f64>,
    /// `mse_zeta / crlb_ref`
    pub efficiency: f64,
    /// Half-width of the normal-approximation 95% interval on `mse_zeta`.
    pub ci95_halfwidth: f64,
    pub clamp_rate: f64,
    pub trials_run: u64,
    pub failures: u64,
}

/// True coefficient and ideal observation of trial `trial`.
///
/// The trial's generator first draws `zeta` from the prior (hybrid mode)
/// and then the noise.
pub fn trial_observation(
    cfg: &ExperimentConfig,
    pilot: &PilotSequence,
    trial: u64,
) -> (f64, IdealObservation) {
    let mut rng = signal::trial_rng(cfg.master_seed, trial);
    let zeta = match cfg.mode {
        Mode::Deterministic => cfg.zeta.unwrap_or(0.0),
        Mode::Hybrid => {
            let z: f64 = StandardNormal.sample(&mut rng);
            cfg.sigma2.unwrap_or(0.0).sqrt() * z
        }
    };
    (zeta, signal::synth_ideal_with(pilot, zeta, &mut rng))
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    sq_err_zeta: f64,
    sq_err_alpha: f64,
    clamped: bool,
    failed: bool,
}

fn run_trial(cfg: &ExperimentConfig, pilot: &PilotSequence, trial: u64) -> TrialOutcome {
    let (zeta, y) = trial_observation(cfg, pilot, trial);
    let prior = cfg.prior();
    let estimate = match cfg.receiver {
        Receiver::Ideal => {
            let z = match &prior {
                None => estimators::ideal_mle(&y, pilot),
                Some(p) => estimators::ideal_map(&y, pilot, p),
            };
            z.map(|z| (z, cfg.alpha, false))
        }
        Receiver::OnebitUnknown | Receiver::OnebitKnown => {
            let r = signal::quantize(&y, cfg.alpha);
            signal::count_stats(&r, pilot).and_then(|counts| {
                let est = match (cfg.receiver, &prior) {
                    (Receiver::OnebitUnknown, None) => Ok(estimators::onebit_jmle(&counts)),
                    (Receiver::OnebitUnknown, Some(p)) => {
                        estimators::onebit_jmapmle(&counts, p, &cfg.solver)
                    }
                    _ => estimators::onebit_known_threshold(
                        &counts,
                        cfg.alpha,
                        prior.as_ref(),
                        &cfg.solver,
                    ),
                }?;
                Ok((est.zeta_hat, est.alpha_hat, est.clamped))
            })
        }
    };
    match estimate {
        Ok((z, a, clamped)) => TrialOutcome {
            sq_err_zeta: (z - zeta).powi(2),
            sq_err_alpha: (a - cfg.alpha).powi(2),
            clamped,
            failed: false,
        },
        Err(_) => TrialOutcome {
            sq_err_zeta: 0.0,
            sq_err_alpha: 0.0,
            clamped: false,
            failed: true,
        },
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Runs the experiment. Trials are spread over a worker pool, but every
/// trial's generator derives only from `(master_seed, trial)` and the
/// reduction runs in trial order, so the result is independent of the
/// number of workers.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<McResult> {
    cfg.validate()?;
    let pilot = signal::make_pilot(cfg.n as usize, cfg.pilot_layout)?;
    let (crlb_ref, crlb_alpha_ref) = cfg.reference_bounds()?;

    let simulate = || -> Vec<TrialOutcome> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &pilot, t))
            .collect()
    };
    let outcomes = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Experiment(format!("cannot build worker pool: {e}")))?
            .install(simulate),
        None => simulate(),
    };

    let failures = outcomes.iter().filter(|o| o.failed).count() as u64;
    if failures as f64 > MAX_FAILURE_RATE * cfg.trials as f64 {
        return Err(Error::Experiment(format!(
            "{failures} of {} trials failed to produce an estimate",
            cfg.trials
        )));
    }
    let ok: Vec<&TrialOutcome> = outcomes.iter().filter(|o| !o.failed).collect();
    let used = ok.len() as f64;
    if ok.is_empty() {
        return Err(Error::Experiment("no successful trials".into()));
    }

    let (mut s_z, mut s_z2, mut s_a) = (
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
    );
    for o in &ok {
        s_z.add(o.sq_err_zeta);
        s_z2.add(o.sq_err_zeta * o.sq_err_zeta);
        s_a.add(o.sq_err_alpha);
    }
    let mse_zeta = s_z.value() / used;
    let var = if ok.len() > 1 {
        ((s_z2.value() - used * mse_zeta * mse_zeta) / (used - 1.0)).max(0.0)
    } else {
        0.0
    };
    let clamped = outcomes.iter().filter(|o| o.clamped).count() as f64;

    Ok(McResult {
        mse_zeta,
        mse_alpha: (cfg.receiver == Receiver::OnebitUnknown).then(|| s_a.value() / used),
        crlb_ref,
        crlb_alpha_ref,
        efficiency: mse_zeta / crlb_ref,
        ci95_halfwidth: Z95 * (var / used).sqrt(),
        clamp_rate: clamped / cfg.trials as f64,
        trials_run: cfg.trials,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::deterministic(Receiver::Ideal, 0.5, 0.0, 100, 10);
        assert!(ok.validate().is_ok());
        let mut c = ok.clone();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.n = 7;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.zeta = None;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.sigma2 = Some(1.0);
        assert!(c.validate().is_err());
        let h = ExperimentConfig::hybrid(Receiver::OnebitUnknown, 0.3, 0.1, 100, 10);
        assert!(h.validate().is_ok());
        let mut c = h.clone();
        c.sigma2 = Some(-1.0);
        assert!(c.validate().is_err());
        assert!(h.clone().with_workers(0).validate().is_err());
    }

    #[test]
    fn single_trial_is_reproducible() {
        let cfg = ExperimentConfig::deterministic(Receiver::OnebitUnknown, 0.4, 0.2, 64, 1).with_seed(99);
        assert_eq!(run_monte_carlo(&cfg).unwrap(), run_monte_carlo(&cfg).unwrap());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        for receiver in [Receiver::Ideal, Receiver::OnebitUnknown, Receiver::OnebitKnown] {
            let cfg = ExperimentConfig::hybrid(receiver, 0.3, 0.2, 256, 200).with_seed(7);
            let a = run_monte_carlo(&cfg.clone().with_workers(1)).unwrap();
            let b = run_monte_carlo(&cfg.clone().with_workers(3)).unwrap();
            let c = run_monte_carlo(&cfg.with_workers(8)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-13)).abs() < 1e-16);
    }

    #[test]
    fn result_fields_per_receiver() {
        let cfg = ExperimentConfig::deterministic(Receiver::OnebitUnknown, 0.5, 0.3, 512, 50);
        let r = run_monte_carlo(&cfg).unwrap();
        assert!(r.mse_alpha.is_some() && r.crlb_alpha_ref.is_some());
        assert!((0.0..=1.0).contains(&r.clamp_rate));
        assert_eq!(r.trials_run, 50);
        let cfg = ExperimentConfig::deterministic(Receiver::Ideal, 0.5, 0.3, 512, 50);
        let r = run_monte_carlo(&cfg).unwrap();
        assert!(r.mse_alpha.is_none());
        assert_eq!(r.crlb_ref, 1.0 / 512.0);
    }
}
