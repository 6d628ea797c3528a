use hardlimit_core::gauss::{log_phi, phi_pair, qfunc, qfunc_inv};
use proptest::prelude::*;

mod common;

#[test]
fn round_trip_on_log_grid() {
    // 200 log-spaced points from 1e-12 to 0.5
    let (lo, hi) = (1e-12f64.ln(), 0.5f64.ln());
    for i in 0..200 {
        let p = (lo + (hi - lo) * i as f64 / 199.0).exp();
        let back = qfunc(qfunc_inv(p).unwrap()).unwrap();
        assert!(((back - p) / p).abs() < 1e-12, "p = {p:e}, back = {back:e}");
    }
}

#[test]
fn peak_is_at_zero() {
    let peak = (2.0 / std::f64::consts::PI).ln();
    assert!((log_phi(0.0) - peak).abs() < 1e-15);
    let peak = log_phi(0.0);
    for i in 1..=400 {
        let t = i as f64 * 0.05;
        assert!(log_phi(t) < peak && log_phi(-t) < peak, "t = {t}");
    }
}

#[test]
fn phi_matches_direct_evaluation_in_the_bulk() {
    for i in -40..=40 {
        let t = i as f64 * 0.1;
        let direct = common::phi_direct(t);
        let got = log_phi(t).exp();
        assert!(((got - direct) / direct).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn far_tail_pair_is_finite() {
    let p = phi_pair(20.0, 10.0);
    for (v, l) in [(p.phi_plus, p.log_plus), (p.phi_minus, p.log_minus)] {
        assert!(v.is_finite() && v > 0.0);
        assert!(l.is_finite());
    }
    // alpha + zeta = 30, where Q(t) = pdf(t)/t * (1 - 1/t^2 + 3/t^4 - ...)
    let t = 30.0f64;
    let expansion = -0.5 * t * t + t.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
        - (1.0 - 1.0 / (t * t) + 3.0 / t.powi(4)).ln();
    assert!((p.log_plus - expansion).abs() < 1e-7, "{} vs {expansion}", p.log_plus);
    assert_eq!(p.log_minus, log_phi(10.0));
}

proptest! {
    #[test]
    fn evenness_is_exact(t in -40.0..40.0f64) {
        prop_assert_eq!(log_phi(t).to_bits(), log_phi(-t).to_bits());
    }

    #[test]
    fn complement_identity(x in -8.0..8.0f64) {
        prop_assert!((qfunc(x).unwrap() - (1.0 - qfunc(-x).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn inverse_is_odd_about_one_half(p in 1e-6..0.999_999f64) {
        let a = qfunc_inv(p).unwrap();
        let b = qfunc_inv(1.0 - p).unwrap();
        prop_assert!((a + b).abs() < 1e-8 * (1.0 + a.abs()));
    }

    #[test]
    fn pair_symmetries(zeta in -5.0..5.0f64, alpha in -5.0..5.0f64) {
        let p = phi_pair(zeta, alpha);
        prop_assert!(p.phi_plus > 0.0 && p.phi_minus > 0.0);
        prop_assert_eq!(p.phi_plus, phi_pair(-zeta, alpha).phi_minus);
        prop_assert_eq!(p.phi_plus, phi_pair(zeta, -alpha).phi_minus);
    }

    #[test]
    fn pair_collapses_on_the_axes(v in -5.0..5.0f64) {
        let a = phi_pair(v, 0.0);
        prop_assert_eq!(a.phi_plus, a.phi_minus);
        let b = phi_pair(0.0, v);
        prop_assert_eq!(b.phi_plus, b.phi_minus);
    }
}
