//! Numerical ground truth for the closed forms: the defining response
//! integrals evaluated by pole-subtracted adaptive quadrature at several
//! regulator values, then extrapolated to ε = 0.
//!
//! The Wightman function is split as W̄ = (W̄ − W_ct) + W_ct with the
//! two-pole counterterm of [`crate::wightman::counterterm`]. The remainder is
//! bounded and decays like 1/Δτ², so it is integrated numerically on a finite
//! window; the counterterm's Fourier transform and the window tails are added
//! analytically.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::{DetectorParams, Regime};
use crate::quad::{integrate, QuadError};
use crate::rates::{rate_infinite, Direction, RatesError};
use crate::special::{neville_to_zero, sine_integral};
use crate::wightman::{eval_subtracted, WightmanError, WightmanFrame};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid oracle input: {0}")]
    InvalidInput(String),
    #[error(
        "epsilon extrapolation did not converge: last extrapolants differ by {difference:e} (tolerance {tolerance:e})"
    )]
    NonConvergence { difference: f64, tolerance: f64 },
    #[error("quadrature budget exceeded: {0}")]
    BudgetExceeded(QuadError),
    #[error(transparent)]
    Wightman(#[from] WightmanError),
    #[error(transparent)]
    Rates(#[from] RatesError),
}

impl From<QuadError> for OracleError {
    fn from(e: QuadError) -> Self {
        OracleError::BudgetExceeded(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub eps_schedule: Vec<f64>,
    pub cutoff_multiplier: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            eps_schedule: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4, 3.125e-4],
            cutoff_multiplier: 40.0,
            abs_tol: 1e-10,
            max_subdivisions: 1_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        let s = &self.eps_schedule;
        if s.len() < 2 {
            return Err(OracleError::InvalidConfig("eps_schedule needs at least two entries".into()));
        }
        if s.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(OracleError::InvalidConfig("eps_schedule entries must be positive".into()));
        }
        if s.windows(2).any(|p| p[1] >= p[0]) {
            return Err(OracleError::InvalidConfig("eps_schedule must be strictly decreasing".into()));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(OracleError::InvalidConfig("abs_tol must be positive".into()));
        }
        if !(self.cutoff_multiplier.is_finite() && self.cutoff_multiplier > 0.0) {
            return Err(OracleError::InvalidConfig("cutoff_multiplier must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(OracleError::InvalidConfig("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    /// Same configuration with every regulator value scaled by `factor`.
    pub fn with_scaled_eps(&self, factor: f64) -> Self {
        QuadratureConfig { eps_schedule: self.eps_schedule.iter().map(|e| e * factor).collect(), ..self.clone() }
    }
}

/// Response moments feeding the density-matrix constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseMoments {
    pub f_minus: f64,
    pub f_plus: f64,
    pub c_minus: Complex64,
    pub c_plus: Complex64,
    pub re_g_minus: f64,
}

impl ResponseMoments {
    /// Moments for the single-qubit channel, Re(G⁻) fixed by the trace
    /// relation ½(F⁻sin²(θ/2) + F⁺cos²(θ/2)).
    pub fn for_qubit(f_minus: f64, f_plus: f64, c: Complex64, theta: f64) -> Self {
        let (s, c2) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        ResponseMoments {
            f_minus,
            f_plus,
            c_minus: c,
            c_plus: c.conj(),
            re_g_minus: 0.5 * (f_minus * s * s + f_plus * c2 * c2),
        }
    }

    /// Moments for the interferometer, Re(G⁻) = ¼(F⁻ + F⁺).
    pub fn for_interferometer(f_minus: f64, f_plus: f64, c: Complex64) -> Self {
        ResponseMoments { f_minus, f_plus, c_minus: c, c_plus: c.conj(), re_g_minus: 0.25 * (f_minus + f_plus) }
    }
}

/// Result of [`c_moment_numeric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CMoment {
    pub value: Complex64,
    /// Set when the e^{−σ²} prefactor underflows and the value is exactly 0.
    pub underflow: bool,
}

/// Extrapolated value with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    pub samples: Vec<f64>,
    pub extrapolants: Vec<f64>,
}

fn validate_inputs(abar: f64, w: f64, cfg: &QuadratureConfig) -> Result<(), OracleError> {
    cfg.validate()?;
    if !(abar.is_finite() && abar > 0.0) {
        return Err(OracleError::InvalidInput(format!("abar = {abar}")));
    }
    if !(w.is_finite() && w >= 0.0) {
        return Err(OracleError::InvalidInput(format!("w = {w}")));
    }
    Ok(())
}

/// Factor applied to the nominal regulator schedule at a given (ā, w).
///
/// The regulator shifts the sinh argument by iε·ā/(1+w²) and the nearest
/// poles off the real axis by 2ε(√(1+w²) + w); both are kept at or below
/// their w = 0, ā ≤ 10 sizes so the samples stay inside the region where
/// they are smooth in ε.
pub fn regulator_scale(abar: f64, w: f64) -> f64 {
    let shift = abar / (1.0 + w * w);
    let boost = (1.0 + w * w).sqrt() + w;
    (10.0 / shift).min(1.0 / boost).min(1.0)
}

fn extrapolate<F>(cfg: &QuadratureConfig, scale: f64, mut sample: F) -> Result<Extrapolation, OracleError>
where
    F: FnMut(f64) -> Result<f64, OracleError>,
{
    let eps: Vec<f64> = cfg.eps_schedule.iter().map(|e| e * scale).collect();
    let samples = eps.iter().map(|&e| sample(e)).collect::<Result<Vec<_>, _>>()?;
    let extrapolants = neville_to_zero(&eps, &samples);
    let n = extrapolants.len();
    let value = extrapolants[n - 1];
    let difference = (extrapolants[n - 1] - extrapolants[n - 2]).abs();
    let tolerance = 10.0 * cfg.abs_tol * value.abs().max(1.0);
    if difference > tolerance {
        return Err(OracleError::NonConvergence { difference, tolerance });
    }
    Ok(Extrapolation { value, samples, extrapolants })
}

/// ∫₀ᵁ Re[weight(u)·(W̄ − W_ct)(u)·e^{−iνu}] du for one regulator value.
fn remainder_integral(
    frame: &WightmanFrame,
    nu: f64,
    upper: f64,
    weight: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<f64, OracleError> {
    let failure: RefCell<Option<WightmanError>> = RefCell::new(None);
    let integrand = |u: f64| match eval_subtracted(frame, u) {
        Ok(r) => weight(u) * (r.re * (nu * u).cos() + r.im * (nu * u).sin()),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let result = integrate(integrand, 0.0, upper, cfg.abs_tol, cfg.max_subdivisions);
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(result?.value)
}

fn signed_frequency(direction: Direction) -> f64 {
    match direction {
        Direction::Excite => 1.0,
        Direction::Deexcite => -1.0,
    }
}

/// Fourier transform of the two-pole counterterm over the whole line.
fn counterterm_transform(frame: &WightmanFrame, direction: Direction) -> f64 {
    match direction {
        Direction::Excite => 0.0,
        Direction::Deexcite => {
            let (d1, d2) = frame.pole_offsets();
            let spread = d1 - d2;
            let mean = if spread.abs() < 1e-8 * d1 {
                (-d2).exp() * (1.0 - spread / 2.0)
            } else {
                ((-d2).exp() - (-d1).exp()) / spread
            };
            mean / (2.0 * PI)
        }
    }
}

/// Integration window: `cutoff_multiplier` decay lengths 1/α̂, and never
/// fewer than `cutoff_multiplier` units of 1/Ω so the analytic tail is taken
/// where the regulator offsets are negligible.
fn window_length(frame: &WightmanFrame, cfg: &QuadratureConfig) -> f64 {
    cfg.cutoff_multiplier * (1.0 / frame.alpha_eff()).max(1.0)
}

/// 2·Re∫_L^∞ e^{∓is}·(−1/(4π²s²)) ds, identical for both directions.
fn counterterm_tail(l: f64) -> f64 {
    -(1.0 / (2.0 * PI * PI)) * (l.cos() / l - (PI / 2.0 - sine_integral(l)))
}

/// Infinite-time rate at a single regulator value, before extrapolation.
pub fn rate_numeric_infinite_at_eps(
    abar: f64,
    w: f64,
    eps: f64,
    direction: Direction,
    cfg: &QuadratureConfig,
) -> Result<f64, OracleError> {
    let frame = WightmanFrame::new(abar, w, eps)?;
    let l = window_length(&frame, cfg);
    let nu = signed_frequency(direction);
    let body = remainder_integral(&frame, nu, l, |_| 1.0, cfg)?;
    Ok(2.0 * body + counterterm_transform(&frame, direction) - counterterm_tail(l))
}

/// Infinite-time rate ∫ e^{∓iΔτ} W̄(Δτ) dΔτ by quadrature, valid at any w.
pub fn rate_numeric_infinite_detailed(
    abar: f64,
    w: f64,
    direction: Direction,
    cfg: &QuadratureConfig,
) -> Result<Extrapolation, OracleError> {
    validate_inputs(abar, w, cfg)?;
    extrapolate(cfg, regulator_scale(abar, w), |eps| rate_numeric_infinite_at_eps(abar, w, eps, direction, cfg))
}

pub fn rate_numeric_infinite(
    abar: f64,
    w: f64,
    direction: Direction,
    cfg: &QuadratureConfig,
) -> Result<f64, OracleError> {
    Ok(rate_numeric_infinite_detailed(abar, w, direction, cfg)?.value)
}

/// ∫ e^{−u²/(4σ²)} e^{−iνu}·(−1/(4π²(u − i0)²)) du.
pub fn gaussian_counterterm(sigma: f64, nu: f64) -> f64 {
    let s = sigma;
    s / (2.0 * PI * PI.sqrt())
        * ((-s * s * nu * nu).exp() / (2.0 * s * s) - nu * PI.sqrt() / (2.0 * s) * libm::erfc(s * nu))
}

fn window_upper(frame: &WightmanFrame, sigma: f64, cfg: &QuadratureConfig) -> f64 {
    window_length(frame, cfg).max(13.0 * sigma)
}

fn window_at_eps(abar: f64, w: f64, sigma: f64, nu: f64, eps: f64, cfg: &QuadratureConfig) -> Result<f64, OracleError> {
    let frame = WightmanFrame::new(abar, w, eps)?;
    let upper = window_upper(&frame, sigma, cfg);
    let inv = 1.0 / (4.0 * sigma * sigma);
    let body = remainder_integral(&frame, nu, upper, |u| (-u * u * inv).exp(), cfg)?;
    Ok(2.0 * body + gaussian_counterterm(sigma, nu))
}

/// Gaussian-window response F∓ = √π σ ∫ e^{−u²/(4σ²)} e^{∓iu} W̄(u) du.
/// F/(√π σ) tends to the infinite-time rate as σ → ∞.
pub fn response_numeric_finite(
    abar: f64,
    w: f64,
    sigma: f64,
    direction: Direction,
    cfg: &QuadratureConfig,
) -> Result<f64, OracleError> {
    validate_inputs(abar, w, cfg)?;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(OracleError::InvalidInput(format!("sigma = {sigma}")));
    }
    let nu = signed_frequency(direction);
    let x = extrapolate(cfg, regulator_scale(abar, w), |eps| window_at_eps(abar, w, sigma, nu, eps, cfg))?;
    Ok(PI.sqrt() * sigma * x.value)
}

/// Co-rotating moment C± = √π σ e^{−σ²} ∫ e^{−u²/(4σ²)} W̄(u) du. The value is
/// real and independent of the sign.
pub fn c_moment_numeric(
    abar: f64,
    w: f64,
    sigma: f64,
    _sign: Direction,
    cfg: &QuadratureConfig,
) -> Result<CMoment, OracleError> {
    validate_inputs(abar, w, cfg)?;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(OracleError::InvalidInput(format!("sigma = {sigma}")));
    }
    let prefactor = PI.sqrt() * sigma * (-sigma * sigma).exp();
    if prefactor == 0.0 || prefactor < f64::MIN_POSITIVE {
        return Ok(CMoment { value: Complex64::new(0.0, 0.0), underflow: true });
    }
    let x = extrapolate(cfg, regulator_scale(abar, w), |eps| window_at_eps(abar, w, sigma, 0.0, eps, cfg))?;
    Ok(CMoment { value: Complex64::new(prefactor * x.value, 0.0), underflow: false })
}

/// F∓ and C rescaled by 1/√π, so that F∓ → σR̄∓ as σ → ∞ like the
/// closed-form moments.
fn numeric_moments(
    abar: f64,
    w: f64,
    sigma: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, Complex64), OracleError> {
    let norm = 1.0 / PI.sqrt();
    let fm = response_numeric_finite(abar, w, sigma, Direction::Excite, cfg)?;
    let fp = response_numeric_finite(abar, w, sigma, Direction::Deexcite, cfg)?;
    let c = c_moment_numeric(abar, w, sigma, Direction::Excite, cfg)?;
    Ok((norm * fm, norm * fp, norm * c.value))
}

/// Numeric F∓ and C at one point with the qubit trace relation applied.
pub fn moments_numeric_qubit(
    params: &DetectorParams,
    theta: f64,
    cfg: &QuadratureConfig,
) -> Result<ResponseMoments, OracleError> {
    let (a, w, s) = (params.abar(), params.w(), params.sigma());
    let (fm, fp, c) = numeric_moments(a, w, s, cfg)?;
    Ok(ResponseMoments::for_qubit(fm, fp, c, theta))
}

/// Numeric F∓ and C at one point with the interferometer trace relation.
pub fn moments_numeric_interferometer(
    params: &DetectorParams,
    cfg: &QuadratureConfig,
) -> Result<ResponseMoments, OracleError> {
    let (a, w, s) = (params.abar(), params.w(), params.sigma());
    let (fm, fp, c) = numeric_moments(a, w, s, cfg)?;
    Ok(ResponseMoments::for_interferometer(fm, fp, c))
}

/// Second Ω-derivative correction (1/(2σ²))·∂²(ΩR̄)/∂Ω² by Richardson-refined
/// central differences of the closed-form infinite-time rate under
/// ā → ā/Ω.
pub fn finite_time_correction_fd(abar: f64, w: f64, sigma: f64, direction: Direction) -> Result<f64, OracleError> {
    const STEP: f64 = 1e-2;
    let params = DetectorParams::new(abar, w, sigma, 1e-3, Regime::NonRelativistic)
        .map_err(|e| OracleError::InvalidInput(e.to_string()))?;
    let f = |omega: f64| -> Result<f64, OracleError> {
        let p = params.with_abar(abar / omega).map_err(|e| OracleError::InvalidInput(e.to_string()))?;
        Ok(omega * rate_infinite(&p, direction)?)
    };
    let f0 = f(1.0)?;
    let second = |h: f64| -> Result<f64, OracleError> { Ok((f(1.0 + h)? - 2.0 * f0 + f(1.0 - h)?) / (h * h)) };
    let d1 = second(STEP)?;
    let d2 = second(STEP / 2.0)?;
    let d3 = second(STEP / 4.0)?;
    // Two Richardson levels remove the h² and h⁴ terms.
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    let d = (16.0 * r2 - r1) / 15.0;
    Ok(d / (2.0 * sigma * sigma))
}
