//! Dimensionless parameter space shared by every other module.
//!
//! All quantities are measured in units of the detector gap Ω (Ω ≡ 1): the
//! acceleration is `abar = a/Ω`, the Gaussian switching width is
//! `sigma = Ω·T`, and rates are reported per unit Ω.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Above this transverse velocity the O(w²) expansion is flagged.
pub const NON_RELATIVISTIC_SOFT_LIMIT: f64 = 0.3;
/// Below this transverse velocity the w⁻⁴ asymptote is flagged.
pub const ULTRA_RELATIVISTIC_SOFT_LIMIT: f64 = 10.0;
/// Upper bound on `coupling² · sigma` before the perturbative guard warns.
pub const PERTURBATIVE_GUARD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be a finite positive number, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("w must be finite and non-negative, got {0}")]
    NegativeVelocity(f64),
    #[error("theta must lie in [0, pi], got {0}")]
    ThetaOutOfRange(f64),
    #[error("phi must lie in [0, 2pi), got {0}")]
    PhiOutOfRange(f64),
    #[error("phase alpha must lie in [0, 2pi), got {0}")]
    PhaseOutOfRange(f64),
    #[error("unknown regime '{0}' (expected non-relativistic, ultra-relativistic or exact)")]
    UnknownRegime(String),
}

/// Which analytic branch the closed-form operations use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NonRelativistic,
    UltraRelativistic,
    /// Served only by the numerical oracle.
    Exact,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::NonRelativistic => "non-relativistic",
            Regime::UltraRelativistic => "ultra-relativistic",
            Regime::Exact => "exact",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "non-relativistic" | "nonrelativistic" | "nr" => Ok(Regime::NonRelativistic),
            "ultra-relativistic" | "ultrarelativistic" | "ur" => Ok(Regime::UltraRelativistic),
            "exact" => Ok(Regime::Exact),
            _ => Err(ModelError::UnknownRegime(s.to_string())),
        }
    }
}

/// Physical configuration of the detector, immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorParams {
    abar: f64,
    w: f64,
    sigma: f64,
    coupling: f64,
    regime: Regime,
}

fn positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::NotPositive { name, value })
    }
}

impl DetectorParams {
    pub fn new(abar: f64, w: f64, sigma: f64, coupling: f64, regime: Regime) -> Result<Self, ModelError> {
        if !(w.is_finite() && w >= 0.0) {
            return Err(ModelError::NegativeVelocity(w));
        }
        Ok(DetectorParams {
            abar: positive("abar", abar)?,
            w,
            sigma: positive("sigma", sigma)?,
            coupling: positive("coupling", coupling)?,
            regime,
        })
    }

    pub fn abar(&self) -> f64 {
        self.abar
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn with_abar(self, abar: f64) -> Result<Self, ModelError> {
        Self::new(abar, self.w, self.sigma, self.coupling, self.regime)
    }

    pub fn with_w(self, w: f64) -> Result<Self, ModelError> {
        Self::new(self.abar, w, self.sigma, self.coupling, self.regime)
    }

    pub fn with_sigma(self, sigma: f64) -> Result<Self, ModelError> {
        Self::new(self.abar, self.w, sigma, self.coupling, self.regime)
    }

    pub fn with_coupling(self, coupling: f64) -> Result<Self, ModelError> {
        Self::new(self.abar, self.w, self.sigma, coupling, self.regime)
    }

    pub fn with_regime(self, regime: Regime) -> Self {
        DetectorParams { regime, ..self }
    }

    /// Boltzmann exponent 2π/ā of the Unruh temperature.
    pub fn boltzmann_exponent(&self) -> f64 {
        2.0 * PI / self.abar
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// Bloch-sphere angles of the input qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitAngles {
    theta: f64,
    phi: f64,
}

impl QubitAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self, ModelError> {
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(ModelError::ThetaOutOfRange(theta));
        }
        if !(phi.is_finite() && (0.0..2.0 * PI).contains(&phi)) {
            return Err(ModelError::PhiOutOfRange(phi));
        }
        Ok(QubitAngles { theta, phi })
    }

    pub fn equator() -> Self {
        QubitAngles { theta: PI / 2.0, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Angle of the interferometer phase-shift gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSetting {
    alpha: f64,
}

impl PhaseSetting {
    pub fn new(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha.is_finite() && (0.0..2.0 * PI).contains(&alpha)) {
            return Err(ModelError::PhaseOutOfRange(alpha));
        }
        Ok(PhaseSetting { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Outcome of [`validate`]: hard errors make a configuration unusable for the
/// selected branch, warnings flag soft guards.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate(params: &DetectorParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let w = params.w;

    // Constructors already enforce these; re-checked so the report is complete
    // on its own.
    for (name, v) in [("abar", params.abar), ("sigma", params.sigma), ("coupling", params.coupling)] {
        if !(v.is_finite() && v > 0.0) {
            report.errors.push(format!("{name} must be positive, got {v}"));
        }
    }

    match params.regime {
        Regime::NonRelativistic => {
            if w >= 1.0 {
                report.errors.push(format!("w ≥ 1 outside non-relativistic branch (w = {w})"));
            } else if w > NON_RELATIVISTIC_SOFT_LIMIT {
                report
                    .warnings
                    .push(format!("w = {w} exceeds {NON_RELATIVISTIC_SOFT_LIMIT}; O(w²) truncation may be inaccurate"));
            }
        }
        Regime::UltraRelativistic => {
            if w == 0.0 {
                report.errors.push("w = 0 has no ultra-relativistic asymptote".to_string());
            } else if w < ULTRA_RELATIVISTIC_SOFT_LIMIT {
                report
                    .warnings
                    .push(format!("w = {w} is below {ULTRA_RELATIVISTIC_SOFT_LIMIT}; w⁻⁴ asymptote may be inaccurate"));
            }
        }
        Regime::Exact => {}
    }

    let strength = params.coupling * params.coupling * params.sigma;
    if strength >= PERTURBATIVE_GUARD {
        report.warnings.push(format!(
            "coupling²·sigma = {strength} is not below {PERTURBATIVE_GUARD}; perturbative results may be unreliable"
        ));
    }
    report
}
