//! Output density matrices of the accelerated qubit and of the interferometric
//! circuit, and the coherence, visibility, distinguishability and
//! complementarity read off them.
//!
//! The closed forms are written in terms of the scaled responses
//! F∓ = σR̄∓, where R̄⁻ is the excitation rate and R̄⁺ the de-excitation rate.
//! The matrix builders take the same moments through [`ResponseMoments`], so
//! closed-form and matrix paths can be fed identical input and compared.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::{DetectorParams, PhaseSetting, QubitAngles, Regime};
use crate::oracle::ResponseMoments;
use crate::rates::{rates_finite, rates_infinite, RatesError};

/// Slack allowed on the smallest eigenvalue of an output matrix.
pub const POSITIVITY_SLACK: f64 = 1e-10;
/// Slack allowed on V² + D² above 1.
pub const COMPLEMENTARITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservablesError {
    #[error("closed-form observables require the non-relativistic regime, parameters are tagged {0}")]
    Regime(Regime),
    #[error(transparent)]
    Rates(#[from] RatesError),
    #[error("output matrix is not positive (smallest eigenvalue {0:e}); parameters are non-perturbative")]
    NotPositive(f64),
    #[error("{quantity} = {value} leaves the perturbative range")]
    NonPerturbative { quantity: &'static str, value: f64 },
    #[error("V² + D² = {0} exceeds 1")]
    ComplementarityViolated(f64),
}

/// Which transition rates feed F∓ = σR̄∓.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// Leading long-time rates; reproduces the printed closed forms.
    InfiniteTime,
    /// Rates including the O(σ⁻²) Gaussian-window correction.
    #[default]
    FiniteTime,
}

/// A 2×2 density matrix in the {|g⟩, |e⟩} basis. `rho_ge` is ⟨g|ρ|e⟩; the
/// other off-diagonal entry is its conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Density2 {
    pub rho_gg: f64,
    pub rho_ee: f64,
    pub rho_ge: Complex64,
}

impl Density2 {
    pub fn rho_eg(&self) -> Complex64 {
        self.rho_ge.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho_gg + self.rho_ee
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.rho_gg + self.rho_ee);
        let half_gap = 0.5 * (self.rho_gg - self.rho_ee).hypot(2.0 * self.rho_ge.norm());
        (mean - half_gap, mean + half_gap)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().0
    }

    fn checked(self) -> Result<Self, ObservablesError> {
        let m = self.min_eigenvalue();
        if m < -POSITIVITY_SLACK || !m.is_finite() {
            Err(ObservablesError::NotPositive(m))
        } else {
            Ok(self)
        }
    }
}

/// Interferometric visibility, which-path distinguishability and the
/// complementarity combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityMetrics {
    pub visibility: f64,
    pub distinguishability: f64,
    /// 1 − [1/(2π) − w²F(e^{2π/ā} − 1)]σλ²coth(π/ā): V² + D² truncated at O(λ²).
    pub complementarity: f64,
    /// V² + D² without truncation.
    pub untruncated: f64,
}

/// F∓ = σR̄∓ from the closed-form rates.
pub fn scaled_responses(params: &DetectorParams, model: RateModel) -> Result<(f64, f64), ObservablesError> {
    if params.regime() != Regime::NonRelativistic {
        return Err(ObservablesError::Regime(params.regime()));
    }
    let rates = match model {
        RateModel::InfiniteTime => rates_infinite(params)?,
        RateModel::FiniteTime => rates_finite(params)?,
    };
    let s = params.sigma();
    Ok((s * rates.excitation, s * rates.deexcitation))
}

/// Closed-form moments for the single qubit, C± = 0.
pub fn qubit_moments(
    params: &DetectorParams,
    theta: f64,
    model: RateModel,
) -> Result<ResponseMoments, ObservablesError> {
    let (fm, fp) = scaled_responses(params, model)?;
    Ok(ResponseMoments::for_qubit(fm, fp, Complex64::new(0.0, 0.0), theta))
}

/// Closed-form moments for the interferometer, C± = 0.
pub fn interferometer_moments(params: &DetectorParams, model: RateModel) -> Result<ResponseMoments, ObservablesError> {
    let (fm, fp) = scaled_responses(params, model)?;
    Ok(ResponseMoments::for_interferometer(fm, fp, Complex64::new(0.0, 0.0)))
}

/// Reduced detector state after the interaction, for the input
/// e^{iφ/2}cos(θ/2)|g⟩ + e^{−iφ/2}sin(θ/2)|e⟩.
///
/// Im(G±) is dropped and Re(G⁺) is taken equal to `moments.re_g_minus`, so
/// the trace is 1 whenever `re_g_minus` obeys the qubit trace relation.
pub fn qubit_density_out(
    params: &DetectorParams,
    angles: QubitAngles,
    moments: &ResponseMoments,
) -> Result<Density2, ObservablesError> {
    let l2 = params.coupling().powi(2);
    let (theta, phi) = (angles.theta(), angles.phi());
    let (s2, c2) = ((theta / 2.0).sin().powi(2), (theta / 2.0).cos().powi(2));
    let sin_t = theta.sin();
    let g = moments.re_g_minus;
    let phase = Complex64::from_polar(1.0, phi);

    let rho_gg = c2 + l2 * (s2 * moments.f_minus - 2.0 * c2 * g);
    let rho_ee = s2 + l2 * (c2 * moments.f_plus - 2.0 * s2 * g);
    let rho_ge = 0.5 * sin_t * phase * (1.0 - 2.0 * l2 * g) + 0.5 * l2 * sin_t * phase.conj() * moments.c_minus;
    Density2 { rho_gg, rho_ee, rho_ge }.checked()
}

/// Detector state at the output of the second Hadamard gate, for phase α.
pub fn interferometer_density_out(
    params: &DetectorParams,
    phase: PhaseSetting,
    moments: &ResponseMoments,
) -> Result<Density2, ObservablesError> {
    let l2 = params.coupling().powi(2);
    let alpha = phase.alpha();
    let (fm, fp) = (moments.f_minus, moments.f_plus);
    let c = moments.c_minus.re;
    let g = moments.re_g_minus;
    let (ca2, sa2) = ((alpha / 2.0).cos().powi(2), (alpha / 2.0).sin().powi(2));
    let (cos_a, sin_a) = (alpha.cos(), alpha.sin());

    let rho_gg = ca2 + 0.25 * l2 * (fm + fp - 8.0 * g * ca2 + 2.0 * c * cos_a);
    let rho_ee = sa2 + 0.25 * l2 * (fm + fp - 8.0 * g * sa2 - 2.0 * c * cos_a);
    let rho_ge = Complex64::new(0.25 * l2 * (fm - fp), 0.5 * sin_a - 0.5 * l2 * sin_a * (2.0 * g - c));
    Density2 { rho_gg, rho_ee, rho_ge }.checked()
}

/// l1-norm coherence: sum of the moduli of the off-diagonal entries.
pub fn coherence_l1(rho: &Density2) -> f64 {
    2.0 * rho.rho_ge.norm()
}

/// Qubit coherence |sin θ|·{1 − λ²[F⁻sin²(θ/2) + F⁺cos²(θ/2)]}.
pub fn coherence_qubit_closed(params: &DetectorParams, theta: f64, model: RateModel) -> Result<f64, ObservablesError> {
    let (fm, fp) = scaled_responses(params, model)?;
    let depletion = params.coupling().powi(2) * (fm * (theta / 2.0).sin().powi(2) + fp * (theta / 2.0).cos().powi(2));
    if !(0.0..=1.0).contains(&depletion) {
        return Err(ObservablesError::NonPerturbative { quantity: "coherence depletion", value: depletion });
    }
    Ok(theta.sin().abs() * (1.0 - depletion))
}

/// Visibility 1 − (λ²/2)(F⁻ + F⁺).
pub fn visibility_closed(params: &DetectorParams, model: RateModel) -> Result<f64, ObservablesError> {
    let (fm, fp) = scaled_responses(params, model)?;
    let v = 1.0 - 0.5 * params.coupling().powi(2) * (fm + fp);
    if !(0.0..=1.0).contains(&v) {
        return Err(ObservablesError::NonPerturbative { quantity: "visibility", value: v });
    }
    Ok(v)
}

/// Interferometer coherence |sin α|·V.
pub fn interferometer_coherence_closed(
    params: &DetectorParams,
    phase: PhaseSetting,
    model: RateModel,
) -> Result<f64, ObservablesError> {
    Ok(phase.alpha().sin().abs() * visibility_closed(params, model)?)
}

/// Which-path distinguishability λ²|F⁺ − F⁻|.
pub fn distinguishability_closed(params: &DetectorParams, model: RateModel) -> Result<f64, ObservablesError> {
    let (fm, fp) = scaled_responses(params, model)?;
    Ok(params.coupling().powi(2) * (fp - fm).abs())
}

/// V, D, their O(λ²) complementarity 1 − λ²(F⁻ + F⁺) and the exact V² + D².
pub fn complementarity_closed(params: &DetectorParams, model: RateModel) -> Result<DualityMetrics, ObservablesError> {
    let (fm, fp) = scaled_responses(params, model)?;
    let visibility = visibility_closed(params, model)?;
    let distinguishability = distinguishability_closed(params, model)?;
    let untruncated = visibility * visibility + distinguishability * distinguishability;
    if untruncated > 1.0 + COMPLEMENTARITY_SLACK {
        return Err(ObservablesError::ComplementarityViolated(untruncated));
    }
    Ok(DualityMetrics {
        visibility,
        distinguishability,
        complementarity: 1.0 - params.coupling().powi(2) * (fm + fp),
        untruncated,
    })
}

/// Ground-state probability ⟨g|ρ_I|g⟩ at phase α.
pub fn ground_probability(
    params: &DetectorParams,
    alpha: f64,
    moments: &ResponseMoments,
) -> Result<f64, ObservablesError> {
    let phase = PhaseSetting::new(alpha.rem_euclid(2.0 * PI)).expect("reduced phase is in range");
    Ok(interferometer_density_out(params, phase, moments)?.rho_gg)
}

/// Fringe contrast (P_max − P_min)/(P_max + P_min) with the extremes taken at
/// α = 0 and α = π.
pub fn visibility_from_matrix(params: &DetectorParams, moments: &ResponseMoments) -> Result<f64, ObservablesError> {
    let hi = ground_probability(params, 0.0, moments)?;
    let lo = ground_probability(params, PI, moments)?;
    Ok((hi - lo) / (hi + lo))
}

/// Path-detector probabilities (w_A, w_B).
pub fn path_probabilities(params: &DetectorParams, moments: &ResponseMoments) -> (f64, f64) {
    let half = 0.5 * params.coupling().powi(2) * (moments.f_minus - moments.f_plus);
    (0.5 + half, 0.5 - half)
}

/// |w_A − w_B|/(w_A + w_B).
pub fn distinguishability_from_probabilities(params: &DetectorParams, moments: &ResponseMoments) -> f64 {
    let (a, b) = path_probabilities(params, moments);
    (a - b).abs() / (a + b)
}
