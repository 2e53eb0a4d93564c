//! Observables built from quadrature moments, including the co-rotating C
//! term that the closed forms drop.

use std::f64::consts::{FRAC_PI_2, PI};

use udw_core::model::{DetectorParams, PhaseSetting, QubitAngles, Regime};
use udw_core::observables::{
    coherence_l1, coherence_qubit_closed, interferometer_density_out, qubit_density_out, qubit_moments,
    visibility_closed, visibility_from_matrix, RateModel,
};
use udw_core::oracle::{c_moment_numeric, moments_numeric_interferometer, moments_numeric_qubit, QuadratureConfig};
use udw_core::rates::{rate_finite, Direction};

fn params(abar: f64, w: f64, sigma: f64, lambda: f64) -> DetectorParams {
    DetectorParams::new(abar, w, sigma, lambda, Regime::NonRelativistic).unwrap()
}

#[test]
fn numeric_moments_follow_sigma_times_rate() {
    let cfg = QuadratureConfig::default();
    for (abar, w) in [(10.0, 0.0), (100.0, 0.1)] {
        let p = params(abar, w, 10.0, 0.01);
        let m = moments_numeric_qubit(&p, FRAC_PI_2, &cfg).unwrap();
        let fm = 10.0 * rate_finite(&p, Direction::Excite).unwrap();
        let fp = 10.0 * rate_finite(&p, Direction::Deexcite).unwrap();
        assert!((m.f_minus / fm - 1.0).abs() < 1e-3);
        assert!((m.f_plus / fp - 1.0).abs() < 1e-3);
        assert!(m.c_minus.norm() < 1e-30);
    }
}

#[test]
fn numeric_matrices_agree_with_closed_forms() {
    let cfg = QuadratureConfig::default();
    let p = params(100.0, 0.1, 10.0, 0.01);
    let m = moments_numeric_qubit(&p, FRAC_PI_2, &cfg).unwrap();
    let rho = qubit_density_out(&p, QubitAngles::equator(), &m).unwrap();
    let closed = coherence_qubit_closed(&p, FRAC_PI_2, RateModel::FiniteTime).unwrap();
    assert!((coherence_l1(&rho) - closed).abs() < 1e-6);

    let mi = moments_numeric_interferometer(&p, &cfg).unwrap();
    let v = visibility_from_matrix(&p, &mi).unwrap();
    assert!((v - visibility_closed(&p, RateModel::FiniteTime).unwrap()).abs() < 1e-6);
    let rho_i = interferometer_density_out(&p, PhaseSetting::new(PI / 4.0).unwrap(), &mi).unwrap();
    assert!((rho_i.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn injected_c_shifts_coherence_by_its_own_size() {
    // At σ = 3 the co-rotating moment is small but representable; with it
    // injected the equator coherence moves by λ²·Re C relative to C = 0.
    let cfg = QuadratureConfig::default();
    let p = params(1.0, 0.0, 3.0, 0.01);
    let with_c = moments_numeric_qubit(&p, FRAC_PI_2, &cfg).unwrap();
    assert!(with_c.c_minus.norm() > 0.0);
    let mut without_c = with_c;
    without_c.c_minus = num_complex::Complex64::new(0.0, 0.0);
    without_c.c_plus = without_c.c_minus;
    let q1 = coherence_l1(&qubit_density_out(&p, QubitAngles::equator(), &with_c).unwrap());
    let q0 = coherence_l1(&qubit_density_out(&p, QubitAngles::equator(), &without_c).unwrap());
    let expected = 0.01f64.powi(2) * with_c.c_minus.re;
    assert!(((q1 - q0) - expected).abs() < 1e-3 * expected.abs());
}

#[test]
fn c_moment_underflows_at_long_times() {
    let cfg = QuadratureConfig::default();
    let c = c_moment_numeric(100.0, 0.0, 30.0, Direction::Excite, &cfg).unwrap();
    assert!(c.underflow);
    assert_eq!(c.value.norm(), 0.0);
    let _ = qubit_moments(&params(100.0, 0.0, 30.0, 0.01), FRAC_PI_2, RateModel::FiniteTime).unwrap();
}
