//! Runtime oracle-equivalence checks behind `hardlimit selftest`.
//!
//! Each check compares a closed-form or quadrature result with a reference
//! computed along an unrelated route: finite-difference score expectations,
//! adaptive Gauss–Kronrod integration, direct root finding.

use crate::bounds::{self, HybridPrior, SystemPoint};
use crate::gauss::{log_phi, log_q, qfunc, qfunc_inv};
use crate::harness::DEFAULT_SNR_DB;
use crate::quadrature::QuadratureSpec;
use crate::sigma2_from_snr_db;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, max_error: f64, tolerance: f64) -> Self {
        Self {
            name,
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    }
}

/// Fisher matrix by exact expectation over `r ∈ {±1}` of the squared
/// (central-difference) score of one sample, summed over a balanced pilot.
pub fn fisher_by_score_expectation(zeta: f64, alpha: f64, n: u64, h: f64) -> [f64; 3] {
    let loglik = |r: f64, x: f64, z: f64, a: f64| log_q(r * (a - z * x));
    let mut acc = [0.0; 3];
    for x in [1.0, -1.0] {
        for r in [1.0, -1.0] {
            let p = log_q(r * (alpha - zeta * x)).exp();
            let dz = (loglik(r, x, zeta + h, alpha) - loglik(r, x, zeta - h, alpha)) / (2.0 * h);
            let da = (loglik(r, x, zeta, alpha + h) - loglik(r, x, zeta, alpha - h)) / (2.0 * h);
            acc[0] += p * dz * dz;
            acc[1] += p * dz * da;
            acc[2] += p * da * da;
        }
    }
    let half = n as f64 / 2.0;
    acc.map(|v| v * half)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for i in 0..7 {
        let s = f(c - h * GK_NODES[i]) + f(c + h * GK_NODES[i]);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration to relative tolerance `rtol`.
pub fn adaptive_integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> f64 {
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1) + recurse(f, m, b, 0.5 * tol, depth - 1)
    }
    let (rough, _) = gk15(f, a, b);
    recurse(f, a, b, rtol * rough.abs().max(f64::MIN_POSITIVE), 40)
}

/// `E[1/phi(alpha + zeta)]`, `zeta ~ N(0, sigma2)`, by adaptive integration
/// over `[-10 sigma, 10 sigma]`.
pub fn psi_h_adaptive(alpha: f64, sigma2: f64) -> f64 {
    let s = sigma2.sqrt();
    let f = |z: f64| {
        let log_prior = -0.5 * z * z / sigma2 - 0.5 * (2.0 * std::f64::consts::PI * sigma2).ln();
        (log_prior - log_phi(alpha + z)).exp()
    };
    // split at the prior mode for better adaptivity
    adaptive_integrate(&f, -10.0 * s, 0.0, 1e-12) + adaptive_integrate(&f, 0.0, 10.0 * s, 1e-12)
}

fn check_qfunc_round_trip() -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut p = 1e-12f64;
    while p <= 0.5 {
        let back = qfunc(qfunc_inv(p).expect("p in (0,1)")).expect("finite");
        worst = worst.max(((back - p) / p).abs());
        p *= 1.2;
    }
    CheckOutcome::new("qfunc round trip (p in [1e-12, 0.5])", worst, 1e-12)
}

fn check_fisher() -> CheckOutcome {
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let zeta = 0.1 + 1.4 * i as f64 / 4.0;
            let alpha = 0.1 + 0.9 * j as f64 / 4.0;
            let point = SystemPoint::new(zeta, alpha, 1000).expect("valid point");
            let f = bounds::fisher_1bit(&point);
            let o = fisher_by_score_expectation(zeta, alpha, 1000, 1e-5);
            worst = worst
                .max(((f.f_zz - o[0]) / o[0]).abs())
                .max(((f.f_za - o[1]) / o[1]).abs())
                .max(((f.f_aa - o[2]) / o[2]).abs());
        }
    }
    CheckOutcome::new("Fisher matrix vs score expectation (5x5 grid)", worst, 1e-6)
}

fn check_crlb_forms() -> CheckOutcome {
    let mut worst = 0.0f64;
    // deterministic low-discrepancy points in [-1.5, 1.5]^2
    for k in 0..1000 {
        let u = (k as f64 * 0.618_033_988_749_894_8).fract();
        let v = (k as f64 * 0.414_213_562_373_095).fract();
        let point = SystemPoint::new(3.0 * u - 1.5, 3.0 * v - 1.5, 1024).expect("valid point");
        let a = bounds::crlb_1bit_unknown(&point).expect("nonsingular");
        let b = bounds::crlb_1bit_unknown_reduced(&point);
        worst = worst.max(((a - b) / b).abs());
    }
    CheckOutcome::new("CRLB matrix form vs reduced form", worst, 1e-12)
}

fn check_hybrid_quadrature() -> CheckOutcome {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for snr in DEFAULT_SNR_DB {
        let sigma2 = sigma2_from_snr_db(snr);
        let prior = HybridPrior::new(sigma2).expect("positive variance");
        for i in 0..=20 {
            let alpha = 0.05 * i as f64;
            let gh = match bounds::psi_h(alpha, &prior, &quad) {
                Ok(v) => v,
                Err(_) => return CheckOutcome::new("Psi_H quadrature vs adaptive", f64::INFINITY, 1e-5),
            };
            let reference = psi_h_adaptive(alpha, sigma2);
            worst = worst.max(((gh - reference) / reference).abs());
        }
    }
    CheckOutcome::new("Psi_H Gauss-Hermite vs adaptive integration", worst, 1e-5)
}

/// Runs every check.
pub fn run() -> Vec<CheckOutcome> {
    vec![
        check_qfunc_round_trip(),
        check_fisher(),
        check_crlb_forms(),
        check_hybrid_quadrature(),
    ]
}
