//! Run settings: command-line flags layered over an optional flat
//! `key = value` file, then over built-in defaults.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use udw_core::model::{DetectorParams, PhaseSetting, QubitAngles, Regime};
use udw_core::observables::RateModel;
use udw_core::oracle::QuadratureConfig;

use crate::error::CliError;

pub const DEFAULT_ABAR: f64 = 100.0;
pub const DEFAULT_W: f64 = 0.0;
pub const DEFAULT_SIGMA: f64 = 10.0;
pub const DEFAULT_COUPLING: f64 = 0.01;
pub const DEFAULT_THETA: f64 = FRAC_PI_2;
pub const DEFAULT_PHI: f64 = 0.0;
pub const DEFAULT_ALPHA: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Observable or rate that can be requested as an output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    ExcitationRate,
    DeexcitationRate,
    CoherenceQubit,
    Visibility,
    InterferometerCoherence,
    Distinguishability,
    Complementarity,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::ExcitationRate,
        Quantity::DeexcitationRate,
        Quantity::CoherenceQubit,
        Quantity::Visibility,
        Quantity::InterferometerCoherence,
        Quantity::Distinguishability,
        Quantity::Complementarity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::ExcitationRate => "excitation_rate",
            Quantity::DeexcitationRate => "deexcitation_rate",
            Quantity::CoherenceQubit => "coherence_qubit",
            Quantity::Visibility => "visibility",
            Quantity::InterferometerCoherence => "interferometer_coherence",
            Quantity::Distinguishability => "distinguishability",
            Quantity::Complementarity => "complementarity",
        }
    }

    pub fn is_rate(self) -> bool {
        matches!(self, Quantity::ExcitationRate | Quantity::DeexcitationRate)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Quantity::ALL.into_iter().find(|q| q.as_str() == key).ok_or_else(|| format!("unknown quantity '{s}'"))
    }
}

/// Requested quantities, deduplicated and put in canonical column order.
pub fn parse_quantities(s: &str) -> Result<Vec<Quantity>, String> {
    let mut out: Vec<Quantity> =
        s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("empty quantity list".into());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sample points `start..=stop`, `points` of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize, spacing: Spacing) -> Result<Self, String> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if start >= stop {
            return Err(format!("grid needs start < stop, got {start}:{stop}"));
        }
        if points < 2 {
            return Err(format!("grid needs at least 2 points, got {points}"));
        }
        if spacing == Spacing::Log && start <= 0.0 {
            return Err("log spacing needs start > 0".into());
        }
        Ok(Grid { start, stop, points, spacing })
    }

    /// Ascending sample values; the end points are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == 0 {
                    return self.start;
                }
                if k == last {
                    return self.stop;
                }
                let t = k as f64 / last as f64;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    /// `start:stop:points[:log]`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("grid '{s}' is not start:stop:points[:log]"));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}' in grid"));
        let points = parts[2].trim().parse::<usize>().map_err(|_| format!("bad point count '{}'", parts[2]))?;
        let spacing = match parts.get(3).map(|t| t.trim().to_ascii_lowercase()) {
            None => Spacing::Linear,
            Some(t) if t == "log" => Spacing::Log,
            Some(t) if t == "lin" || t == "linear" => Spacing::Linear,
            Some(t) => return Err(format!("unknown spacing '{t}'")),
        };
        Grid::new(num(parts[0])?, num(parts[1])?, points, spacing)
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let out: Vec<f64> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'")))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_rate_model(s: &str) -> Result<RateModel, String> {
    match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "finite" | "finite-time" => Ok(RateModel::FiniteTime),
        "infinite" | "infinite-time" => Ok(RateModel::InfiniteTime),
        other => Err(format!("unknown rate model '{other}' (expected finite or infinite)")),
    }
}

pub fn rate_model_name(m: RateModel) -> &'static str {
    match m {
        RateModel::FiniteTime => "finite",
        RateModel::InfiniteTime => "infinite",
    }
}

pub fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse::<Regime>().map_err(|e| e.to_string())
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("bad number '{s}'"))
}

/// Every setting that can come from a flag or the config file. `None` means
/// "not given at this layer".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub abar: Option<f64>,
    pub w: Option<f64>,
    pub sigma: Option<f64>,
    pub coupling: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub alpha: Option<f64>,
    pub regime: Option<Regime>,
    pub rate_model: Option<RateModel>,
    pub quantities: Option<Vec<Quantity>>,
    pub grid: Option<Grid>,
    pub w_set: Option<Vec<f64>>,
    pub abar_set: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub eps_schedule: Option<Vec<f64>>,
    pub quad_tol: Option<f64>,
}

impl Overrides {
    /// Values from `self` win; gaps are filled from `base`.
    pub fn layered_over(self, base: Overrides) -> Overrides {
        Overrides {
            abar: self.abar.or(base.abar),
            w: self.w.or(base.w),
            sigma: self.sigma.or(base.sigma),
            coupling: self.coupling.or(base.coupling),
            theta: self.theta.or(base.theta),
            phi: self.phi.or(base.phi),
            alpha: self.alpha.or(base.alpha),
            regime: self.regime.or(base.regime),
            rate_model: self.rate_model.or(base.rate_model),
            quantities: self.quantities.or(base.quantities),
            grid: self.grid.or(base.grid),
            w_set: self.w_set.or(base.w_set),
            abar_set: self.abar_set.or(base.abar_set),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            eps_schedule: self.eps_schedule.or(base.eps_schedule),
            quad_tol: self.quad_tol.or(base.quad_tol),
        }
    }

    /// Set one key as spelled on the command line (without the dashes);
    /// underscores and dashes are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "abar" => self.abar = Some(parse_f64(value)?),
            "w" => self.w = Some(parse_f64(value)?),
            "sigma" => self.sigma = Some(parse_f64(value)?),
            "coupling" => self.coupling = Some(parse_f64(value)?),
            "theta" => self.theta = Some(parse_f64(value)?),
            "phi" => self.phi = Some(parse_f64(value)?),
            "alpha" => self.alpha = Some(parse_f64(value)?),
            "regime" => self.regime = Some(parse_regime(value)?),
            "rate-model" => self.rate_model = Some(parse_rate_model(value)?),
            "quantities" => self.quantities = Some(parse_quantities(value)?),
            "grid" => self.grid = Some(value.parse()?),
            "w-set" => self.w_set = Some(parse_list(value)?),
            "abar-set" => self.abar_set = Some(parse_list(value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = Some(value.parse()?),
            "eps-schedule" => self.eps_schedule = Some(parse_list(value)?),
            "quad-tol" => self.quad_tol = Some(parse_f64(value)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Parse a flat `key = value` file. Blank lines and lines starting with
    /// `#` are skipped.
    pub fn from_config_text(text: &str) -> Result<Overrides, String> {
        let mut out = Overrides::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            out.set(k, v).map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(out)
    }

    pub fn from_config_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Overrides::from_config_text(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig, CliError> {
        let mut cfg = QuadratureConfig::default();
        if let Some(s) = &self.eps_schedule {
            cfg.eps_schedule = s.clone();
        }
        if let Some(t) = self.quad_tol {
            cfg.abs_tol = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn point(&self) -> Result<Point, CliError> {
        let regime = self.regime.unwrap_or(Regime::NonRelativistic);
        let params = DetectorParams::new(
            self.abar.unwrap_or(DEFAULT_ABAR),
            self.w.unwrap_or(DEFAULT_W),
            self.sigma.unwrap_or(DEFAULT_SIGMA),
            self.coupling.unwrap_or(DEFAULT_COUPLING),
            regime,
        )?;
        Ok(Point {
            params,
            angles: QubitAngles::new(self.theta.unwrap_or(DEFAULT_THETA), self.phi.unwrap_or(DEFAULT_PHI))?,
            phase: PhaseSetting::new(self.alpha.unwrap_or(DEFAULT_ALPHA))?,
            rate_model: self.rate_model.unwrap_or_default(),
            quad: self.quadrature()?,
        })
    }
}

/// One fully resolved parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub params: DetectorParams,
    pub angles: QubitAngles,
    pub phase: PhaseSetting,
    pub rate_model: RateModel,
    pub quad: QuadratureConfig,
}
