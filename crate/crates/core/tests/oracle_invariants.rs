//! Quadrature oracle against the closed-form rates, and its own robustness
//! under changes of regulator schedule and integration window.

use std::f64::consts::PI;

use udw_core::model::{DetectorParams, Regime};
use udw_core::oracle::{finite_time_correction_fd, rate_numeric_infinite, response_numeric_finite, QuadratureConfig};
use udw_core::rates::{finite_time_correction, planck_rate, rate_finite, rate_infinite, velocity_factor_f, Direction};

const DIRECTIONS: [Direction; 2] = [Direction::Excite, Direction::Deexcite];

fn params(abar: f64, w: f64, sigma: f64) -> DetectorParams {
    DetectorParams::new(abar, w, sigma, 0.01, Regime::NonRelativistic).unwrap()
}

#[test]
fn thermal_spectrum_at_rest() {
    let cfg = QuadratureConfig::default();
    for abar in [0.5, 1.0, 2.0, 10.0, 100.0] {
        let exc = rate_numeric_infinite(abar, 0.0, Direction::Excite, &cfg).unwrap();
        let planck = planck_rate(abar);
        assert!((exc - planck).abs() / planck < 1e-6, "ā = {abar}");
        let dex = rate_numeric_infinite(abar, 0.0, Direction::Deexcite, &cfg).unwrap();
        let boltz = (2.0 * PI / abar).exp() * planck;
        assert!((dex - boltz).abs() / boltz < 1e-6, "ā = {abar}");
    }
}

#[test]
fn velocity_slope_matches_f() {
    let cfg = QuadratureConfig::default();
    for abar in [10.0, 100.0] {
        let r0 = rate_numeric_infinite(abar, 0.0, Direction::Excite, &cfg).unwrap();
        let r1 = rate_numeric_infinite(abar, 0.05, Direction::Excite, &cfg).unwrap();
        let slope = (r1 - r0) / 0.05f64.powi(2);
        let f = velocity_factor_f(abar);
        assert!((slope + f).abs() / f < 5e-2, "ā = {abar}: slope {slope}, F {f}");
    }
}

#[test]
fn emission_minus_absorption_is_vacuum_rate() {
    // The spontaneous-emission part of the kernel is velocity independent.
    let cfg = QuadratureConfig::default();
    for (abar, w) in [(1.0, 0.1), (10.0, 0.2), (100.0, 0.05), (3.0, 2.0)] {
        let exc = rate_numeric_infinite(abar, w, Direction::Excite, &cfg).unwrap();
        let dex = rate_numeric_infinite(abar, w, Direction::Deexcite, &cfg).unwrap();
        assert!((dex - exc - 1.0 / (2.0 * PI)).abs() < 1e-9, "({abar}, {w})");
    }
}

#[test]
fn halving_the_regulator_schedule() {
    let cfg = QuadratureConfig::default();
    let half = cfg.with_scaled_eps(0.5);
    for (abar, w) in [(0.5, 0.0), (1.0, 0.1), (10.0, 0.05), (100.0, 0.0), (100.0, 0.1)] {
        for d in DIRECTIONS {
            let a = rate_numeric_infinite(abar, w, d, &cfg).unwrap();
            let b = rate_numeric_infinite(abar, w, d, &half).unwrap();
            assert!((a - b).abs() < cfg.abs_tol, "({abar}, {w}, {d}): {:e}", a - b);
        }
    }
}

#[test]
fn widening_the_window() {
    let cfg = QuadratureConfig::default();
    let wide = QuadratureConfig { cutoff_multiplier: 60.0, ..cfg.clone() };
    for (abar, w) in [(0.5, 0.0), (1.0, 0.1), (10.0, 0.05), (100.0, 0.0), (100.0, 0.1)] {
        for d in DIRECTIONS {
            let a = rate_numeric_infinite(abar, w, d, &cfg).unwrap();
            let b = rate_numeric_infinite(abar, w, d, &wide).unwrap();
            assert!((a - b).abs() < cfg.abs_tol, "({abar}, {w}, {d}): {:e}", a - b);
        }
    }
}

#[test]
fn large_velocity_limit() {
    // As w → ∞ the kernel tends to −1/(4π²s²(1 + ā²s²/12)); its excitation
    // transform is √k·e^{−1/√k}/(4π) with k = ā²/12, approached as w⁻².
    let cfg = QuadratureConfig::default();
    let k: f64 = 1.0 / 12.0;
    let limit = k.sqrt() * (-1.0 / k.sqrt()).exp() / (4.0 * PI);
    let gap = |w: f64| rate_numeric_infinite(1.0, w, Direction::Excite, &cfg).unwrap() / limit - 1.0;
    let (g10, g20) = (gap(10.0), gap(20.0));
    assert!(g10.abs() < 1e-2, "{g10:e}");
    assert!((g10 / g20 - 4.0).abs() < 0.1, "{}", g10 / g20);
}

#[test]
fn finite_difference_correction() {
    for abar in [1.0, 10.0, 100.0] {
        for w in [0.0, 0.1] {
            for d in DIRECTIONS {
                let analytic = finite_time_correction(abar, w, 10.0, d);
                let fd = finite_time_correction_fd(abar, w, 10.0, d).unwrap();
                assert!((fd - analytic).abs() / analytic.abs() < 1e-6, "({abar}, {w}, {d})");
            }
        }
    }
}

#[test]
fn gaussian_window_against_finite_rate() {
    let cfg = QuadratureConfig::default();
    for abar in [10.0, 100.0] {
        for w in [0.0, 0.1] {
            for d in DIRECTIONS {
                let numeric = response_numeric_finite(abar, w, 10.0, d, &cfg).unwrap() / (PI.sqrt() * 10.0);
                let closed = rate_finite(&params(abar, w, 10.0), d).unwrap();
                assert!((numeric - closed).abs() / closed < 1e-3, "({abar}, {w}, {d})");
            }
        }
    }
}

#[test]
fn gaussian_window_shift_is_half_the_analytic_correction() {
    // The exact Gaussian-window expansion has 1/(4σ²) in front of the second
    // derivative; the closed-form correction carries 1/(2σ²).
    let cfg = QuadratureConfig::default();
    for sigma in [10.0, 20.0, 40.0] {
        let p = params(1.0, 0.0, sigma);
        let numeric =
            response_numeric_finite(1.0, 0.0, sigma, Direction::Deexcite, &cfg).unwrap() / (PI.sqrt() * sigma);
        let inf = rate_infinite(&p, Direction::Deexcite).unwrap();
        let fin = rate_finite(&p, Direction::Deexcite).unwrap();
        let ratio = (numeric - inf) / (fin - inf);
        assert!((ratio - 0.5).abs() < 0.06, "σ = {sigma}: {ratio}");
    }
}
