//! Evaluation of the requested quantities at one parameter point, and the
//! single-point report behind `udw eval`.

use std::f64::consts::PI;

use serde::Serialize;
use udw_core::model::Regime;
use udw_core::observables::{
    coherence_l1, coherence_qubit_closed, complementarity_closed, distinguishability_closed,
    distinguishability_from_probabilities, interferometer_coherence_closed, interferometer_density_out,
    qubit_density_out, visibility_closed, visibility_from_matrix, RateModel,
};
use udw_core::oracle::{
    moments_numeric_interferometer, moments_numeric_qubit, rate_numeric_infinite, response_numeric_finite,
};
use udw_core::rates::{rate_finite, rate_infinite, rate_ultra, Direction};

use crate::config::{rate_model_name, Point, Quantity};
use crate::error::CliError;

pub const SUPPRESSED_REASON: &str = "suppressed — detector does not respond";

/// Value of one quantity: a number, or `None` when the regime suppresses it.
pub type Value = Option<f64>;

fn rate(point: &Point, direction: Direction) -> Result<f64, CliError> {
    let p = &point.params;
    match p.regime() {
        Regime::NonRelativistic => Ok(match point.rate_model {
            RateModel::InfiniteTime => rate_infinite(p, direction)?,
            RateModel::FiniteTime => rate_finite(p, direction)?,
        }),
        Regime::UltraRelativistic => Ok(rate_ultra(p, direction)?),
        Regime::Exact => Ok(match point.rate_model {
            RateModel::InfiniteTime => rate_numeric_infinite(p.abar(), p.w(), direction, &point.quad)?,
            RateModel::FiniteTime => {
                let s = p.sigma();
                response_numeric_finite(p.abar(), p.w(), s, direction, &point.quad)? / (PI.sqrt() * s)
            }
        }),
    }
}

fn closed_form(point: &Point, q: Quantity) -> Result<f64, CliError> {
    let (p, m) = (&point.params, point.rate_model);
    Ok(match q {
        Quantity::CoherenceQubit => coherence_qubit_closed(p, point.angles.theta(), m)?,
        Quantity::Visibility => visibility_closed(p, m)?,
        Quantity::InterferometerCoherence => interferometer_coherence_closed(p, point.phase, m)?,
        Quantity::Distinguishability => distinguishability_closed(p, m)?,
        Quantity::Complementarity => complementarity_closed(p, m)?.complementarity,
        Quantity::ExcitationRate | Quantity::DeexcitationRate => unreachable!("rates handled separately"),
    })
}

/// Observables from quadrature moments through the density matrices; used
/// when the closed-form rates do not apply.
fn from_matrices(point: &Point, q: Quantity) -> Result<f64, CliError> {
    let p = &point.params;
    let cfg = &point.quad;
    Ok(match q {
        Quantity::CoherenceQubit => {
            let m = moments_numeric_qubit(p, point.angles.theta(), cfg)?;
            coherence_l1(&qubit_density_out(p, point.angles, &m)?)
        }
        Quantity::Visibility => visibility_from_matrix(p, &moments_numeric_interferometer(p, cfg)?)?,
        Quantity::InterferometerCoherence => {
            let m = moments_numeric_interferometer(p, cfg)?;
            coherence_l1(&interferometer_density_out(p, point.phase, &m)?)
        }
        Quantity::Distinguishability => {
            distinguishability_from_probabilities(p, &moments_numeric_interferometer(p, cfg)?)
        }
        // V² + D² truncated at O(λ²) is 2V − 1.
        Quantity::Complementarity => 2.0 * visibility_from_matrix(p, &moments_numeric_interferometer(p, cfg)?)? - 1.0,
        Quantity::ExcitationRate | Quantity::DeexcitationRate => unreachable!("rates handled separately"),
    })
}

pub fn evaluate(point: &Point, q: Quantity) -> Result<Value, CliError> {
    match q {
        Quantity::ExcitationRate => return rate(point, Direction::Excite).map(Some),
        Quantity::DeexcitationRate => return rate(point, Direction::Deexcite).map(Some),
        _ => {}
    }
    match point.params.regime() {
        Regime::NonRelativistic => closed_form(point, q).map(Some),
        Regime::UltraRelativistic => Ok(None),
        Regime::Exact => from_matrices(point, q).map(Some),
    }
}

/// Reject parameter points that fail the model's hard checks; returns the
/// soft warnings otherwise.
pub fn validate_point(point: &Point) -> Result<Vec<String>, CliError> {
    let report = point.params.validate();
    if !report.is_ok() {
        return Err(CliError::Validation(report.errors.join("; ")));
    }
    Ok(report.warnings)
}

/// Flat single-point report.
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub abar: f64,
    pub w: f64,
    pub sigma: f64,
    pub coupling: f64,
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub regime: String,
    pub rate_model: String,
    pub excitation_rate: f64,
    pub deexcitation_rate: f64,
    pub excitation_rate_infinite: Option<f64>,
    pub deexcitation_rate_infinite: Option<f64>,
    pub excitation_rate_finite: Option<f64>,
    pub deexcitation_rate_finite: Option<f64>,
    pub coherence_qubit: Value,
    pub visibility: Value,
    pub interferometer_coherence: Value,
    pub distinguishability: Value,
    pub complementarity: Value,
    pub complementarity_untruncated: Value,
    pub suppressed_reason: Option<String>,
    pub warnings: Vec<String>,
}

impl PointReport {
    /// (key, value) pairs in report order, for CSV output.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let num = |v: f64| format!("{v:.16e}");
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        vec![
            ("abar", num(self.abar)),
            ("w", num(self.w)),
            ("sigma", num(self.sigma)),
            ("coupling", num(self.coupling)),
            ("theta", num(self.theta)),
            ("phi", num(self.phi)),
            ("alpha", num(self.alpha)),
            ("regime", self.regime.clone()),
            ("rate_model", self.rate_model.clone()),
            ("excitation_rate", num(self.excitation_rate)),
            ("deexcitation_rate", num(self.deexcitation_rate)),
            ("excitation_rate_infinite", opt(self.excitation_rate_infinite)),
            ("deexcitation_rate_infinite", opt(self.deexcitation_rate_infinite)),
            ("excitation_rate_finite", opt(self.excitation_rate_finite)),
            ("deexcitation_rate_finite", opt(self.deexcitation_rate_finite)),
            ("coherence_qubit", opt(self.coherence_qubit)),
            ("visibility", opt(self.visibility)),
            ("interferometer_coherence", opt(self.interferometer_coherence)),
            ("distinguishability", opt(self.distinguishability)),
            ("complementarity", opt(self.complementarity)),
            ("complementarity_untruncated", opt(self.complementarity_untruncated)),
            ("suppressed_reason", self.suppressed_reason.clone().unwrap_or_default()),
            ("warnings", self.warnings.join("; ")),
        ]
    }
}

/// Everything computable at one point.
pub fn eval_point(point: &Point) -> Result<PointReport, CliError> {
    let warnings = validate_point(point)?;
    let p = &point.params;
    let with_model = |m: RateModel| Point { rate_model: m, ..point.clone() };

    let (inf, fin) = if p.regime() == Regime::NonRelativistic {
        let i = with_model(RateModel::InfiniteTime);
        let f = with_model(RateModel::FiniteTime);
        (
            (Some(rate(&i, Direction::Excite)?), Some(rate(&i, Direction::Deexcite)?)),
            (Some(rate(&f, Direction::Excite)?), Some(rate(&f, Direction::Deexcite)?)),
        )
    } else {
        ((None, None), (None, None))
    };

    let value = |q: Quantity| evaluate(point, q);
    let untruncated = match p.regime() {
        Regime::NonRelativistic => Some(complementarity_closed(p, point.rate_model)?.untruncated),
        Regime::UltraRelativistic => None,
        Regime::Exact => {
            let v = from_matrices(point, Quantity::Visibility)?;
            let d = from_matrices(point, Quantity::Distinguishability)?;
            Some(v * v + d * d)
        }
    };

    Ok(PointReport {
        abar: p.abar(),
        w: p.w(),
        sigma: p.sigma(),
        coupling: p.coupling(),
        theta: point.angles.theta(),
        phi: point.angles.phi(),
        alpha: point.phase.alpha(),
        regime: p.regime().as_str().to_string(),
        rate_model: rate_model_name(point.rate_model).to_string(),
        excitation_rate: rate(point, Direction::Excite)?,
        deexcitation_rate: rate(point, Direction::Deexcite)?,
        excitation_rate_infinite: inf.0,
        deexcitation_rate_infinite: inf.1,
        excitation_rate_finite: fin.0,
        deexcitation_rate_finite: fin.1,
        coherence_qubit: value(Quantity::CoherenceQubit)?,
        visibility: value(Quantity::Visibility)?,
        interferometer_coherence: value(Quantity::InterferometerCoherence)?,
        distinguishability: value(Quantity::Distinguishability)?,
        complementarity: value(Quantity::Complementarity)?,
        complementarity_untruncated: untruncated,
        suppressed_reason: (p.regime() == Regime::UltraRelativistic).then(|| SUPPRESSED_REASON.to_string()),
        warnings,
    })
}
