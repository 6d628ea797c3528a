#![allow(dead_code)]
//! Reference computations shared by the integration tests. None of these go
//! through the closed forms they are used to check.

use hardlimit_core::gauss::log_q;
use hardlimit_core::signal::{make_pilot, CountStatistic, PilotLayout};

/// Fisher matrix `[f_zz, f_za, f_aa]` as the exact expectation over each
/// `r_n ∈ {±1}` of the outer product of the central-difference score of
/// `ln Q(r_n (alpha - zeta x_n))`, summed over an alternating pilot.
pub fn fisher_oracle(zeta: f64, alpha: f64, n: usize) -> [f64; 3] {
    const H: f64 = 1e-5;
    let pilot = make_pilot(n, PilotLayout::Alternating).unwrap();
    let ll = |r: f64, x: f64, z: f64, a: f64| log_q(r * (a - z * x));
    let mut acc = [0.0; 3];
    for &x in pilot.symbols() {
        let x = x as f64;
        for r in [1.0, -1.0] {
            let p = ll(r, x, zeta, alpha).exp();
            let sz = (ll(r, x, zeta + H, alpha) - ll(r, x, zeta - H, alpha)) / (2.0 * H);
            let sa = (ll(r, x, zeta, alpha + H) - ll(r, x, zeta, alpha - H)) / (2.0 * H);
            acc[0] += p * sz * sz;
            acc[1] += p * sz * sa;
            acc[2] += p * sa * sa;
        }
    }
    acc
}

/// `(zeta,zeta)` entry of the inverse of a 2×2 symmetric matrix.
pub fn inverse_zz(f: [f64; 3]) -> f64 {
    f[2] / (f[0] * f[2] - f[1] * f[1])
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `phi(t)` straight from its definition (no log-domain tricks); fine for
/// moderate `|t|`.
pub fn phi_direct(t: f64) -> f64 {
    let q = log_q(t).exp() * log_q(-t).exp();
    (-t * t).exp() / (2.0 * std::f64::consts::PI * q)
}

/// `E[g(zeta)]` for `zeta ~ N(0, sigma2)` by adaptive Simpson on `[-10σ, 10σ]`.
pub fn prior_expectation(sigma2: f64, g: &dyn Fn(f64) -> f64) -> f64 {
    let s = sigma2.sqrt();
    let f = |z: f64| (-0.5 * z * z / sigma2).exp() / (2.0 * std::f64::consts::PI * sigma2).sqrt() * g(z);
    simpson(&f, -10.0 * s, 0.0, 1e-14) + simpson(&f, 0.0, 10.0 * s, 1e-14)
}

/// Maximizer of the count log-likelihood (plus optional `-zeta²/(2 sigma2)`)
/// by a dense grid over `[-5, 5]²` and coordinate Newton refinement with
/// finite-difference derivatives.
pub fn grid_maximizer(c: &CountStatistic, sigma2: Option<f64>) -> (f64, f64) {
    let obj = |z: f64, a: f64| c.log_likelihood(z, a) - sigma2.map_or(0.0, |s| 0.5 * z * z / s);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let steps = 400;
    for i in 0..=steps {
        for j in 0..=steps {
            let z = -5.0 + 10.0 * i as f64 / steps as f64;
            let a = -5.0 + 10.0 * j as f64 / steps as f64;
            let v = obj(z, a);
            if v > best.0 {
                best = (v, z, a);
            }
        }
    }
    let (mut z, mut a) = (best.1, best.2);
    const H: f64 = 1e-4;
    for _ in 0..5000 {
        let (z0, a0) = (z, a);
        let d1 = (obj(z + H, a) - obj(z - H, a)) / (2.0 * H);
        let d2 = (obj(z + H, a) - 2.0 * obj(z, a) + obj(z - H, a)) / (H * H);
        z -= d1 / d2;
        let d1 = (obj(z, a + H) - obj(z, a - H)) / (2.0 * H);
        let d2 = (obj(z, a + H) - 2.0 * obj(z, a) + obj(z, a - H)) / (H * H);
        a -= d1 / d2;
        if (z - z0).abs() < 1e-13 && (a - a0).abs() < 1e-13 {
            break;
        }
    }
    (z, a)
}
