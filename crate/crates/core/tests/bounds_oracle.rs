use hardlimit_core::bounds::{self, HybridPrior, SystemPoint};
use hardlimit_core::{sigma2_from_snr_db, to_db, Error, QuadratureSpec};
use proptest::prelude::*;

mod common;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn fisher_matches_score_oracle() {
    let p = SystemPoint::new(0.5, 0.3, 1000).unwrap();
    let f = bounds::fisher_1bit(&p);
    let o = common::fisher_oracle(0.5, 0.3, 1000);
    assert!(rel(f.f_zz, o[0]) < 1e-6);
    assert!(rel(f.f_za, o[1]) < 1e-6);
    assert!(rel(f.f_aa, o[2]) < 1e-6);
}

#[test]
fn fisher_grid_matches_score_oracle() {
    for i in 0..5 {
        for j in 0..5 {
            let zeta = 0.1 + 0.35 * i as f64;
            let alpha = 0.1 + 0.225 * j as f64;
            let f = bounds::fisher_1bit(&SystemPoint::new(zeta, alpha, 1000).unwrap());
            let o = common::fisher_oracle(zeta, alpha, 1000);
            for (got, want) in [(f.f_zz, o[0]), (f.f_za, o[1]), (f.f_aa, o[2])] {
                assert!(rel(got, want) < 1e-6, "({zeta}, {alpha}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn crlb_matches_inverted_oracle() {
    let p = SystemPoint::new(0.5, 0.4, 1000).unwrap();
    let want = common::inverse_zz(common::fisher_oracle(0.5, 0.4, 1000));
    assert!(rel(bounds::crlb_1bit_unknown(&p).unwrap(), want) < 1e-6);
}

#[test]
fn zero_point_values() {
    let p = SystemPoint::new(0.0, 0.0, 2).unwrap();
    let f = bounds::fisher_1bit(&p);
    assert!((f.f_zz - 4.0 / std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(f.f_za, 0.0);
    let p = SystemPoint::new(0.0, 0.0, 1000).unwrap();
    let want = std::f64::consts::FRAC_PI_2 / 1000.0;
    assert!(rel(bounds::crlb_1bit_unknown(&p).unwrap(), want) < 1e-14);
    assert!(rel(bounds::crlb_1bit_known(&p).unwrap(), want) < 1e-14);
    assert_eq!(bounds::crlb_ideal(&p), 1e-3);
}

#[test]
fn singular_points_are_errors() {
    let p = SystemPoint::new(30.0, 15.0, 1000).unwrap();
    assert!(matches!(bounds::crlb_1bit_unknown(&p), Err(Error::Singular { .. })));
}

#[test]
fn low_snr_limit() {
    let r = bounds::loss_deterministic(1e-6, 0.0);
    let two_over_pi = 2.0 / std::f64::consts::PI;
    assert!((r.chi - two_over_pi).abs() < 1e-9);
    assert!((r.chi_star - two_over_pi).abs() < 1e-9);
}

#[test]
fn psi_h_matches_adaptive_oracle() {
    let quad = QuadratureSpec::default();
    for snr in [-5.0, -10.0, -25.0] {
        let sigma2 = sigma2_from_snr_db(snr);
        let prior = HybridPrior::new(sigma2).unwrap();
        let got = bounds::psi_h(0.5, &prior, &quad).unwrap();
        let want = common::prior_expectation(sigma2, &|z| 1.0 / common::phi_direct(0.5 + z));
        assert!(rel(got, want) < 1e-5, "snr {snr}: {got} vs {want}");
    }
}

#[test]
fn hybrid_bound_matches_quadrature_of_matrix_form() {
    // E[(F^-1)_zz] with the matrix form written out, no harmonic-mean shortcut
    let quad = QuadratureSpec::default();
    let n = 1000u64;
    for (alpha, snr) in [(0.0, -10.0), (0.3, -5.0), (0.8, -2.5), (1.0, -25.0)] {
        let sigma2 = sigma2_from_snr_db(snr);
        let prior = HybridPrior::new(sigma2).unwrap();
        let h = bounds::hybrid_bounds(alpha, &prior, n, &quad).unwrap();
        let matrix_form = |z: f64| {
            let (p, m) = (common::phi_direct(alpha + z), common::phi_direct(alpha - z));
            let half = n as f64 / 2.0;
            let (d, o) = (half * (p + m), half * (p - m));
            d / (d * d - o * o)
        };
        let want = common::prior_expectation(sigma2, &matrix_form);
        assert!(rel(h.mse_r, want) < 1e-8, "({alpha}, {snr}): {} vs {want}", h.mse_r);
        assert_eq!(h.mse_y, 1.0 / n as f64);
    }
}

#[test]
fn hybrid_losses_agree_with_bound_ratios() {
    let quad = QuadratureSpec::default();
    for alpha in [0.0, 0.35, 0.9] {
        let prior = HybridPrior::from_snr_db(-5.0).unwrap();
        let h = bounds::hybrid_bounds(alpha, &prior, 4096, &quad).unwrap();
        let l = bounds::loss_hybrid(alpha, &prior, &quad).unwrap();
        assert!(rel(l.chi, h.mse_y / h.mse_r) < 1e-12);
        assert!(rel(l.chi_star, h.mse_y / h.mse_r_star) < 1e-12);
        assert!(h.mse_r >= h.mse_r_star * (1.0 - 1e-12) && h.mse_r_star >= h.mse_y);
    }
}

#[test]
fn hybrid_endpoint_golden() {
    // mpmath reference, 40 digits
    let prior = HybridPrior::from_snr_db(-2.5).unwrap();
    let l = bounds::loss_hybrid(1.0, &prior, &QuadratureSpec::default()).unwrap();
    assert!((l.chi_db - -6.6893024992707835).abs() < 1e-9, "{}", l.chi_db);
}

#[test]
fn hybrid_low_variance_limit() {
    let prior = HybridPrior::new(1e-10).unwrap();
    let quad = QuadratureSpec::default();
    let l = bounds::loss_hybrid(0.0, &prior, &quad).unwrap();
    assert!((l.chi - 2.0 / std::f64::consts::PI).abs() < 1e-9);
    assert!((bounds::psi_h(0.0, &prior, &quad).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn divergent_prior_is_rejected() {
    let prior = HybridPrior::new(1.0).unwrap();
    assert!(matches!(
        bounds::psi_h(0.2, &prior, &QuadratureSpec::default()),
        Err(Error::Divergent { .. })
    ));
}

#[test]
fn deterministic_cross_check_low_snr_db() {
    let r = bounds::loss_deterministic(0.0, 0.0);
    assert!((r.chi_db - to_db(2.0 / std::f64::consts::PI)).abs() < 1e-15);
    assert!((r.chi_db - -1.961198770301527).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matrix_identity(zeta in -3.0..3.0f64, alpha in -3.0..3.0f64) {
        let f = bounds::fisher_1bit(&SystemPoint::new(zeta, alpha, 1024).unwrap());
        prop_assert_eq!(f.f_zz.to_bits(), f.f_aa.to_bits());
        prop_assert!(f.f_zz >= f.f_za.abs());
        prop_assert!(f.determinant() > 0.0);
    }

    #[test]
    fn harmonic_below_arithmetic(zeta in -3.0..3.0f64, alpha in -3.0..3.0f64) {
        let r = bounds::loss_deterministic(zeta, alpha);
        prop_assert!(r.chi > 0.0 && r.chi <= r.chi_star);
    }

    #[test]
    fn collapse_on_axes(v in -3.0..3.0f64) {
        for (z, a) in [(v, 0.0), (0.0, v)] {
            let r = bounds::loss_deterministic(z, a);
            prop_assert!((r.chi - r.chi_star).abs() < 1e-12);
            let p = SystemPoint::new(z, a, 1000).unwrap();
            prop_assert!(rel(bounds::crlb_1bit_unknown(&p).unwrap(), bounds::crlb_1bit_known(&p).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn strict_gap_off_axes(zeta in 0.2..2.0f64, alpha in 0.2..2.0f64) {
        let r = bounds::loss_deterministic(zeta, alpha);
        prop_assert!(r.chi_star - r.chi > 1e-12);
    }

    #[test]
    fn symmetric_losses(zeta in -3.0..3.0f64, alpha in -3.0..3.0f64) {
        let r = bounds::loss_deterministic(zeta, alpha);
        for (z, a) in [(-zeta, alpha), (zeta, -alpha), (-zeta, -alpha)] {
            let s = bounds::loss_deterministic(z, a);
            prop_assert!(rel(s.chi, r.chi) < 1e-12);
            prop_assert!(rel(s.chi_star, r.chi_star) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_hybrid(alpha in -1.5..1.5f64, snr in -25.0..-1.0f64) {
        let quad = QuadratureSpec::default();
        let prior = HybridPrior::from_snr_db(snr).unwrap();
        let a = bounds::psi_h(alpha, &prior, &quad).unwrap();
        let b = bounds::psi_h(-alpha, &prior, &quad).unwrap();
        prop_assert!(rel(a, b) < 1e-12);
        let la = bounds::loss_hybrid(alpha, &prior, &quad).unwrap();
        let lb = bounds::loss_hybrid(-alpha, &prior, &quad).unwrap();
        prop_assert!(rel(la.chi_star, lb.chi_star) < 1e-12);
        prop_assert!(la.chi <= la.chi_star * (1.0 + 1e-12));
    }
}
