//! Closed-form transition rates per unit Ω.
//!
//! Throughout, u = π/ā and x = 2u = 2π/ā. The velocity factor is written as
//! F(ā) = ā·G(u)/24 with G = B(u)·csch²u and
//! B(u) = 2 + 9u²/π² − 2(1 + u²/π²)·u·coth u.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DetectorParams, Regime};
use crate::special::{bose_b_second_derivative, csch2_coefficients, ucoth_coefficients, SERIES_TERMS};

/// Acceleration above which F(ā) is summed from its power series in π/ā.
pub const F_SERIES_THRESHOLD: f64 = 20.0;
/// Below this u = π/ā the derivatives of G come from the series.
const G_DERIVATIVE_SERIES_U: f64 = 0.5;

/// Large-ā slope of F: (7 − 2π²/3)/(24π²).
pub fn velocity_factor_slope() -> f64 {
    (7.0 - 2.0 * PI * PI / 3.0) / (24.0 * PI * PI)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatesError {
    #[error("operation requires the {expected} regime, parameters are tagged {found}")]
    RegimeMismatch { expected: Regime, found: Regime },
    #[error("w ≥ 1 outside non-relativistic branch (w = {0})")]
    OutsideBranch(f64),
    #[error("{direction} rate is negative ({value:e}); w is outside the validity of the O(w²) truncation")]
    NegativeRate { direction: Direction, value: f64 },
    #[error("finite-time correction needs sigma ≥ 1, got {0}")]
    SigmaTooSmall(f64),
    #[error("ultra-relativistic rates need w > 0")]
    ZeroVelocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Excite,
    Deexcite,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Excite => "excitation",
            Direction::Deexcite => "de-excitation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateKind {
    InfiniteTime,
    FiniteTime { sigma: f64 },
}

/// Excitation (R̄⁻) and de-excitation (R̄⁺) rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionRates {
    pub excitation: f64,
    pub deexcitation: f64,
    pub kind: RateKind,
}

impl TransitionRates {
    pub fn get(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Excite => self.excitation,
            Direction::Deexcite => self.deexcitation,
        }
    }
}

/// Thermal rate 1/(2π(e^{2π/ā} − 1)).
pub fn planck_rate(abar: f64) -> f64 {
    1.0 / (2.0 * PI * (2.0 * PI / abar).exp_m1())
}

struct GSeries {
    /// G(u) = Σ c_k u^{2k}
    c: [f64; SERIES_TERMS - 1],
}

fn g_series() -> &'static GSeries {
    static CELL: OnceLock<GSeries> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = ucoth_coefficients();
        let gamma = csch2_coefficients();
        let pi2 = PI * PI;
        // B(u) = Σₙ≥₁ βₙ u²ⁿ
        let mut beta = [0.0; SERIES_TERMS];
        beta[1] = 7.0 / pi2 - 2.0 / 3.0;
        for n in 2..SERIES_TERMS {
            beta[n] = -2.0 * g[n] - 2.0 * g[n - 1] / pi2;
        }
        let mut c = [0.0; SERIES_TERMS - 1];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (1..=k + 1).map(|n| beta[n] * gamma[k + 1 - n]).sum();
        }
        GSeries { c }
    })
}

/// (G, G', G'') from the power series; accurate for u well inside π.
fn g_from_series(u: f64) -> [f64; 3] {
    let c = &g_series().c;
    let u2 = u * u;
    let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
    for k in (0..c.len()).rev() {
        let kk = (2 * k) as f64;
        g = g * u2 + c[k];
        if k >= 1 {
            g1 = g1 * u2 + kk * c[k];
            g2 = g2 * u2 + kk * (kk - 1.0) * c[k];
        }
    }
    // g1 holds Σ 2k c_k u^{2k−2}; g2 holds Σ 2k(2k−1)c_k u^{2k−2}.
    [g, g1 * u, g2]
}

/// B and its first two derivatives.
fn b_direct(u: f64) -> [f64; 3] {
    let e = (-2.0 * u).exp();
    let one_minus = -(-2.0 * u).exp_m1();
    let cth = (1.0 + e) / one_minus;
    let csch2 = 4.0 * e / (one_minus * one_minus);
    let pi2 = PI * PI;
    let c = 9.0 / pi2;
    let h = u * cth;
    let h1 = cth - u * csch2;
    let h2 = -2.0 * csch2 + 2.0 * u * cth * csch2;
    let q = 1.0 + u * u / pi2;
    let q1 = 2.0 * u / pi2;
    let q2 = 2.0 / pi2;
    [
        2.0 + c * u * u - 2.0 * q * h,
        2.0 * c * u - 2.0 * (q1 * h + q * h1),
        2.0 * c - 2.0 * (q2 * h + 2.0 * q1 * h1 + q * h2),
    ]
}

/// (G, G', G'') from hyperbolic functions; loses digits as u → 0.
fn g_from_direct(u: f64) -> [f64; 3] {
    let [b, b1, b2] = b_direct(u);
    let e = (-2.0 * u).exp();
    let one_minus = -(-2.0 * u).exp_m1();
    let cth = (1.0 + e) / one_minus;
    let s = 4.0 * e / (one_minus * one_minus);
    let s1 = -2.0 * cth * s;
    let s2 = 6.0 * s * s + 4.0 * s;
    [b * s, b1 * s + b * s1, b2 * s + 2.0 * b1 * s1 + b * s2]
}

/// (e^{2u}G)'' computed without forming e^{2u}.
fn boosted_g_second_derivative(u: f64) -> f64 {
    if u < G_DERIVATIVE_SERIES_U {
        let [g, g1, g2] = g_from_series(u);
        return (2.0 * u).exp() * (4.0 * g + 4.0 * g1 + g2);
    }
    // e^{2u}csch²u = T(u) = 4/(1 − E)², E = e^{−2u}
    let [b, b1, b2] = b_direct(u);
    let e = (-2.0 * u).exp();
    let one_minus = -(-2.0 * u).exp_m1();
    let om2 = one_minus * one_minus;
    let t = 4.0 / om2;
    let t1 = -16.0 * e / (om2 * one_minus);
    let t2 = 32.0 * e / (om2 * one_minus) + 96.0 * e * e / (om2 * om2);
    b2 * t + 2.0 * b1 * t1 + b * t2
}

fn g_all(u: f64) -> [f64; 3] {
    if u < G_DERIVATIVE_SERIES_U {
        g_from_series(u)
    } else {
        g_from_direct(u)
    }
}

/// F(ā) evaluated from hyperbolic functions, cancellation-prone at large ā.
pub fn velocity_factor_f_direct(abar: f64) -> f64 {
    let u = PI / abar;
    abar * g_from_direct(u)[0] / 24.0
}

/// F(ā) from the power series in π/ā.
pub fn velocity_factor_f_series(abar: f64) -> f64 {
    let u = PI / abar;
    abar * g_from_series(u)[0] / 24.0
}

/// Velocity factor F(ā): the coefficient of −w² in the excitation rate.
pub fn velocity_factor_f(abar: f64) -> f64 {
    if abar > F_SERIES_THRESHOLD {
        velocity_factor_f_series(abar)
    } else {
        velocity_factor_f_direct(abar)
    }
}

fn require_non_relativistic(params: &DetectorParams) -> Result<(), RatesError> {
    if params.regime() != Regime::NonRelativistic {
        return Err(RatesError::RegimeMismatch { expected: Regime::NonRelativistic, found: params.regime() });
    }
    if params.w() >= 1.0 {
        return Err(RatesError::OutsideBranch(params.w()));
    }
    Ok(())
}

fn non_negative(direction: Direction, value: f64) -> Result<f64, RatesError> {
    if value < 0.0 {
        Err(RatesError::NegativeRate { direction, value })
    } else {
        Ok(value)
    }
}

/// Boltzmann-weighted copy of an excitation quantity, falling back to the
/// overflow-safe thermal form when e^{2π/ā} is not representable.
fn boltzmann(abar: f64, w: f64, excitation: f64) -> f64 {
    let x = 2.0 * PI / abar;
    let boost = x.exp();
    if boost.is_finite() {
        boost * excitation
    } else {
        // e^x·planck → 1/(2π), e^x·F → ā·B·T/24 with T → 4
        let u = PI / abar;
        let [b, _, _] = b_direct(u);
        1.0 / (2.0 * PI) - w * w * abar * b * 4.0 / 24.0
    }
}

fn infinite_unchecked(abar: f64, w: f64, direction: Direction) -> f64 {
    let excitation = planck_rate(abar) - velocity_factor_f(abar) * w * w;
    match direction {
        Direction::Excite => excitation,
        Direction::Deexcite => boltzmann(abar, w, excitation),
    }
}

/// Infinite-time rate to O(w²).
pub fn rate_infinite(params: &DetectorParams, direction: Direction) -> Result<f64, RatesError> {
    require_non_relativistic(params)?;
    non_negative(direction, infinite_unchecked(params.abar(), params.w(), direction))
}

pub fn rates_infinite(params: &DetectorParams) -> Result<TransitionRates, RatesError> {
    Ok(TransitionRates {
        excitation: rate_infinite(params, Direction::Excite)?,
        deexcitation: rate_infinite(params, Direction::Deexcite)?,
        kind: RateKind::InfiniteTime,
    })
}

/// The O(σ⁻²) Gaussian-window correction (1/(2σ²))·∂²(ΩR̄)/∂Ω² at fixed
/// physical acceleration, evaluated at Ω = 1.
pub fn finite_time_correction(abar: f64, w: f64, sigma: f64, direction: Direction) -> f64 {
    let u = PI / abar;
    let thermal = bose_b_second_derivative(2.0 * u) / PI;
    let velocity = match direction {
        Direction::Excite => g_all(u)[2],
        Direction::Deexcite => boosted_g_second_derivative(u),
    };
    u / (2.0 * sigma * sigma) * (thermal - PI * w * w / 24.0 * velocity)
}

/// Finite-time rate: infinite-time rate plus [`finite_time_correction`].
pub fn rate_finite(params: &DetectorParams, direction: Direction) -> Result<f64, RatesError> {
    require_non_relativistic(params)?;
    let sigma = params.sigma();
    if sigma < 1.0 {
        return Err(RatesError::SigmaTooSmall(sigma));
    }
    let (abar, w) = (params.abar(), params.w());
    let value = infinite_unchecked(abar, w, direction) + finite_time_correction(abar, w, sigma, direction);
    non_negative(direction, value)
}

pub fn rates_finite(params: &DetectorParams) -> Result<TransitionRates, RatesError> {
    Ok(TransitionRates {
        excitation: rate_finite(params, Direction::Excite)?,
        deexcitation: rate_finite(params, Direction::Deexcite)?,
        kind: RateKind::FiniteTime { sigma: params.sigma() },
    })
}

/// Transcription of the published A/B-coefficient form of the finite-time
/// rates, kept only for comparison against [`rate_finite`].
pub fn rate_finite_printed(params: &DetectorParams, direction: Direction) -> Result<f64, RatesError> {
    require_non_relativistic(params)?;
    let sigma = params.sigma();
    if sigma < 1.0 {
        return Err(RatesError::SigmaTooSmall(sigma));
    }
    let (a, w) = (params.abar(), params.w());
    let w2 = w * w;
    let pi2 = PI * PI;
    let pi3 = pi2 * PI;
    let e1 = (2.0 * PI / a).exp();
    let e2 = e1 * e1;
    let e3 = e2 * e1;
    let e4 = e2 * e2;
    let coth = 1.0 / (PI / a).tanh();

    let b = 2.0 * PI * a.powi(3) * w2 - 3.0 * a * a * (e1 - 1.0) + 9.0 * PI * a * w2
        - 2.0 * pi2 * w2 * e1 * (1.0 + a * a) * coth;

    let sum = match direction {
        Direction::Excite => {
            let a1 = 30.0 * pi2 * a * w2 * (-1.0 - 3.0 * e1 + 3.0 * e2 + 6.0 * e1)
                + 4.0 * pi3 * w2 * (1.0 + 11.0 * e1 + 11.0 * e2 + e3);
            let a2 = 2.0
                * PI
                * a
                * a
                * (e1 + 1.0)
                * (3.0
                    + (21.0 + 2.0 * pi2) * w2
                    + e2 * (3.0 + (21.0 + 2.0 * pi2) * w2 + e1 * ((20.0 * pi2 - 42.0) * w2 - 6.0)));
            let a3 = -a.powi(3)
                * (e1 - 1.0)
                * (6.0
                    + (9.0 + 8.0 * pi2) * w2
                    + e2 * (6.0 + (9.0 + 8.0 * pi2) * w2)
                    + 2.0 * e1 * ((16.0 * pi2 - 9.0) * w2 - 6.0));
            a1 + a2 + a3
        }
        Direction::Deexcite => {
            let a1 = -12.0 * pi2 * a * w2 * (-8.0 * e1 + e2 + 7.0 * e3) + 16.0 * pi3 * w2 * (e1 + 4.0 * e2 + e3 + e3);
            let a2 = 2.0
                * PI
                * a
                * a
                * (3.0
                    + 3.0 * e4 * w2
                    + e3 * (3.0 + (33.0 + 8.0 * pi2) * w2)
                    + e1 * (-3.0 + (39.0 + 8.0 * pi2) * w2)
                    + e2 * ((32.0 * pi2 - 75.0) * w2 - 3.0));
            let a3 = -3.0
                * a.powi(3)
                * (e1 - 1.0)
                * (2.0 + 3.0 * e3 * w2 + e2 * (2.0 + (-6.0 + 8.0 * pi2) * w2) + e1 * (-4.0 + (3.0 + 8.0 * pi2) * w2));
            a1 + a2 + a3
        }
    };
    let base = infinite_unchecked(a, w, direction);
    Ok(base * (1.0 - PI * e1 * sum / (a * a * sigma * sigma * (e1 - 1.0).powi(3) * b)))
}

/// Large-w asymptote planck(ā)/w⁴, Boltzmann-weighted for de-excitation.
pub fn rate_ultra(params: &DetectorParams, direction: Direction) -> Result<f64, RatesError> {
    if params.regime() != Regime::UltraRelativistic {
        return Err(RatesError::RegimeMismatch { expected: Regime::UltraRelativistic, found: params.regime() });
    }
    let w = params.w();
    if w == 0.0 {
        return Err(RatesError::ZeroVelocity);
    }
    let w4 = w * w * w * w;
    let abar = params.abar();
    Ok(match direction {
        Direction::Excite => planck_rate(abar) / w4,
        Direction::Deexcite => boltzmann(abar, 0.0, planck_rate(abar)) / w4,
    })
}

pub fn rates_ultra(params: &DetectorParams) -> Result<TransitionRates, RatesError> {
    Ok(TransitionRates {
        excitation: rate_ultra(params, Direction::Excite)?,
        deexcitation: rate_ultra(params, Direction::Deexcite)?,
        kind: RateKind::InfiniteTime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nr(abar: f64, w: f64, sigma: f64) -> DetectorParams {
        DetectorParams::new(abar, w, sigma, 0.01, Regime::NonRelativistic).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn planck_values() {
        assert!(rel(planck_rate(1.0), 2.9777e-4) < 2e-5);
        assert!(rel(planck_rate(100.0), 2.4543) < 2e-5);
        assert_eq!(planck_rate(1e-3), 0.0);
    }

    #[test]
    fn velocity_factor_values() {
        assert!((velocity_factor_f(100.0) - 0.1773).abs() < 1e-4);
        let f1 = velocity_factor_f(1.0);
        assert!(f1 < 0.0 && (f1 + 5.04e-4).abs() < 1e-6);
        let bracket = 11.0 - 4.0 * PI / PI.tanh();
        assert!((bracket + 1.613).abs() < 1e-3);
        let asym = velocity_factor_f(1e4) / 1e4;
        assert!(rel(asym, velocity_factor_slope()) < 1e-3);
        assert!((velocity_factor_slope() - 1.774e-3).abs() < 1e-6);
    }

    #[test]
    fn series_and_direct_agree_at_crossover() {
        for i in 0..=40 {
            let a = 18.0 + 0.1 * i as f64;
            let d = velocity_factor_f_direct(a);
            let s = velocity_factor_f_series(a);
            assert!(rel(s, d) < 1e-9, "a={a}: {s} vs {d}");
        }
    }

    #[test]
    fn g_branches_agree() {
        let u = G_DERIVATIVE_SERIES_U;
        let s = g_from_series(u);
        let d = g_from_direct(u);
        for k in 0..3 {
            assert!((s[k] - d[k]).abs() < 1e-11 * (1.0 + d[k].abs()), "k={k}: {s:?} {d:?}");
        }
        let bs = {
            let [g, g1, g2] = s;
            (2.0 * u).exp() * (4.0 * g + 4.0 * g1 + g2)
        };
        let bd = boosted_g_second_derivative(u * (1.0 + 1e-12));
        assert!((bs - bd).abs() < 1e-10 * bs.abs());
    }

    #[test]
    fn g_derivatives_by_differences() {
        for &u in &[0.2, 0.9, 3.0] {
            let h = 1e-4;
            let g = |v: f64| g_all(v)[0];
            let g1 = (g(u + h) - g(u - h)) / (2.0 * h);
            let g2 = (g(u + h) - 2.0 * g(u) + g(u - h)) / (h * h);
            let [_, d1, d2] = g_all(u);
            assert!((g1 - d1).abs() < 1e-7, "u={u}");
            assert!((g2 - d2).abs() < 1e-5, "u={u}");
        }
    }

    #[test]
    fn infinite_time_examples() {
        let p = nr(100.0, 0.0, 10.0);
        assert_eq!(rate_infinite(&p, Direction::Excite).unwrap(), planck_rate(100.0));
        let p = nr(100.0, 0.1, 10.0);
        assert!((rate_infinite(&p, Direction::Excite).unwrap() - 2.4525).abs() < 1e-4);
        let r = rates_infinite(&p).unwrap();
        assert!(rel(r.deexcitation / r.excitation, 1.064_846_6) < 2e-6);
        assert!(rel(r.deexcitation / r.excitation, (2.0 * PI / 100.0).exp()) < 1e-14);
    }

    #[test]
    fn regime_and_sign_guards() {
        let u = nr(1.0, 0.1, 10.0).with_regime(Regime::UltraRelativistic);
        assert!(matches!(rate_infinite(&u, Direction::Excite), Err(RatesError::RegimeMismatch { .. })));
        assert!(matches!(non_negative(Direction::Excite, -1e-9), Err(RatesError::NegativeRate { .. })));
        assert!(matches!(rate_infinite(&nr(1.0, 1.0, 10.0), Direction::Excite), Err(RatesError::OutsideBranch(_))));
        assert!(matches!(rate_finite(&nr(1.0, 0.0, 0.5), Direction::Excite), Err(RatesError::SigmaTooSmall(_))));
        let z = nr(1.0, 0.0, 10.0).with_regime(Regime::UltraRelativistic);
        assert!(matches!(rate_ultra(&z, Direction::Excite), Err(RatesError::ZeroVelocity)));
    }

    #[test]
    fn finite_time_tends_to_infinite_time() {
        let p = nr(100.0, 0.0, 1e9);
        let fin = rate_finite(&p, Direction::Excite).unwrap();
        let inf = rate_infinite(&p, Direction::Excite).unwrap();
        assert!(rel(fin, inf) < 1e-15);
    }

    #[test]
    fn ultra_examples() {
        let p = DetectorParams::new(1.0, 10.0, 10.0, 0.01, Regime::UltraRelativistic).unwrap();
        let r = rate_ultra(&p, Direction::Excite).unwrap();
        assert!(rel(r, 2.9777e-8) < 2e-5);
        let q = p.with_w(20.0).unwrap();
        assert_eq!(r / rate_ultra(&q, Direction::Excite).unwrap(), 16.0);
        let far = p.with_w(1e8).unwrap();
        assert!(rate_ultra(&far, Direction::Excite).unwrap() < 1e-35);
    }

    #[test]
    fn overflow_safe_boltzmann_branch() {
        let a = 2.0 * PI / 800.0;
        let d = infinite_unchecked(a, 0.0, Direction::Deexcite);
        assert_eq!(d, 1.0 / (2.0 * PI));
        let near = 2.0 * PI / 700.0;
        let w = 1e-3;
        let direct = infinite_unchecked(near, w, Direction::Deexcite);
        let safe = {
            let [b, _, _] = b_direct(PI / near);
            1.0 / (2.0 * PI) - w * w * near * b * 4.0 / 24.0
        };
        assert!(rel(safe, direct) < 1e-9);
    }

    proptest! {
        #[test]
        fn detailed_balance(abar in 0.1f64..1e3, w in 0f64..0.3) {
            let p = nr(abar, w, 10.0);
            if let (Ok(e), Ok(d)) = (rate_infinite(&p, Direction::Excite), rate_infinite(&p, Direction::Deexcite)) {
                prop_assert!(rel(d, (2.0 * PI / abar).exp() * e) <= 1e-12);
            }
        }

        #[test]
        fn zero_velocity_is_thermal(abar in 0.1f64..1e3) {
            prop_assert_eq!(rate_infinite(&nr(abar, 0.0, 10.0), Direction::Excite).unwrap(), planck_rate(abar));
        }

        #[test]
        fn velocity_mitigates_at_high_acceleration(abar in 10f64..1e3, w in 0f64..0.19) {
            let lo = rate_infinite(&nr(abar, w, 10.0), Direction::Excite).unwrap();
            let hi = rate_infinite(&nr(abar, w + 0.01, 10.0), Direction::Excite).unwrap();
            prop_assert!(velocity_factor_f(abar) > 0.0);
            prop_assert!(hi < lo);
        }
    }
}
