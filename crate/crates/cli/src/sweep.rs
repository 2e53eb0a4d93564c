//! One-dimensional parameter sweeps. Points are evaluated in parallel and
//! written in ascending order of the swept value.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value as Json};

use crate::config::{Grid, Point, Quantity};
use crate::error::{CliError, EXIT_EVALUATION, EXIT_NON_CONVERGENCE, EXIT_OK};
use crate::evaluate::{evaluate, validate_point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Abar,
    W,
    Sigma,
    Theta,
    AlphaPhase,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Abar => "abar",
            SweepVariable::W => "w",
            SweepVariable::Sigma => "sigma",
            SweepVariable::Theta => "theta",
            SweepVariable::AlphaPhase => "alpha_phase",
        }
    }

    /// `base` with this variable set to `x`.
    pub fn apply(self, base: &Point, x: f64) -> Result<Point, CliError> {
        let mut p = base.clone();
        match self {
            SweepVariable::Abar => p.params = p.params.with_abar(x)?,
            SweepVariable::W => p.params = p.params.with_w(x)?,
            SweepVariable::Sigma => p.params = p.params.with_sigma(x)?,
            SweepVariable::Theta => {
                p.angles = udw_core::model::QubitAngles::new(x, p.angles.phi())?;
            }
            SweepVariable::AlphaPhase => p.phase = udw_core::model::PhaseSetting::new(x)?,
        }
        Ok(p)
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "abar" => Ok(SweepVariable::Abar),
            "w" => Ok(SweepVariable::W),
            "sigma" => Ok(SweepVariable::Sigma),
            "theta" => Ok(SweepVariable::Theta),
            "alpha" | "alpha_phase" => Ok(SweepVariable::AlphaPhase),
            other => Err(format!("unknown sweep variable '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Grid,
    pub fixed: Point,
    /// Canonical order, no duplicates.
    pub quantities: Vec<Quantity>,
}

/// Failure at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub value: f64,
    pub quantity: Quantity,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub value: f64,
    /// One entry per requested quantity, same order. `None` is an empty cell.
    pub cells: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub records: Vec<SweepRecord>,
    pub failures: Vec<PointFailure>,
    pub suppressed: usize,
    pub warnings: Vec<String>,
}

impl SweepResult {
    pub fn exit_code(&self) -> i32 {
        self.failures.iter().map(|f| f.exit_code).max().unwrap_or(EXIT_OK)
    }

    pub fn column(&self, q: Quantity) -> Option<Vec<Option<f64>>> {
        let k = self.spec.quantities.iter().position(|&x| x == q)?;
        Some(self.records.iter().map(|r| r.cells[k]).collect())
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} points over {} in [{}, {}], {} quantities",
            self.records.len(),
            self.spec.variable,
            self.spec.grid.start,
            self.spec.grid.stop,
            self.spec.quantities.len()
        );
        if self.suppressed > 0 {
            s.push_str(&format!(", {} suppressed cells", self.suppressed));
        }
        if !self.failures.is_empty() {
            s.push_str(&format!(", {} failed cells", self.failures.len()));
        }
        s
    }
}

/// Check a sweep before any evaluation: every grid point must form a valid
/// parameter point.
pub fn validate_spec(spec: &SweepSpec) -> Result<Vec<String>, CliError> {
    if spec.quantities.is_empty() {
        return Err(CliError::Validation("no quantities requested".into()));
    }
    let mut warnings = Vec::new();
    for x in spec.grid.values() {
        let p = spec.variable.apply(&spec.fixed, x)?;
        for w in validate_point(&p)? {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    Ok(warnings)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, CliError> {
    let warnings = validate_spec(spec)?;
    let values = spec.grid.values();
    let rows: Vec<(SweepRecord, Vec<PointFailure>, usize)> = values
        .par_iter()
        .map(|&x| {
            let point = spec.variable.apply(&spec.fixed, x).expect("grid validated");
            let mut cells = Vec::with_capacity(spec.quantities.len());
            let mut failures = Vec::new();
            let mut suppressed = 0;
            for &q in &spec.quantities {
                match evaluate(&point, q) {
                    Ok(Some(v)) => cells.push(Some(v)),
                    Ok(None) => {
                        suppressed += 1;
                        cells.push(None);
                    }
                    Err(e) => {
                        let exit_code = match e {
                            CliError::NonConvergence(_) => EXIT_NON_CONVERGENCE,
                            _ => EXIT_EVALUATION,
                        };
                        failures.push(PointFailure { value: x, quantity: q, message: e.to_string(), exit_code });
                        cells.push(None);
                    }
                }
            }
            (SweepRecord { value: x, cells }, failures, suppressed)
        })
        .collect();

    let mut result = SweepResult {
        spec: spec.clone(),
        records: Vec::with_capacity(rows.len()),
        failures: Vec::new(),
        suppressed: 0,
        warnings,
    };
    for (record, failures, suppressed) in rows {
        result.records.push(record);
        result.failures.extend(failures);
        result.suppressed += suppressed;
    }
    Ok(result)
}

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with a header row; empty cells for suppressed or failed values.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<(), csv::Error> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec![result.spec.variable.as_str().to_string()];
    header.extend(result.spec.quantities.iter().map(|q| q.as_str().to_string()));
    wtr.write_record(&header)?;
    for r in &result.records {
        let mut row = vec![format_number(r.value)];
        row.extend(r.cells.iter().map(|c| c.map(format_number).unwrap_or_default()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Array of flat objects keyed by column name; missing values are null.
pub fn to_json(result: &SweepResult) -> Json {
    let rows = result
        .records
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert(result.spec.variable.as_str().into(), Json::from(r.value));
            for (q, c) in result.spec.quantities.iter().zip(&r.cells) {
                m.insert(q.as_str().into(), c.map(Json::from).unwrap_or(Json::Null));
            }
            Json::Object(m)
        })
        .collect();
    Json::Array(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;
    use udw_core::model::Regime;

    fn spec(variable: SweepVariable, grid: &str, quantities: &[Quantity], o: Overrides) -> SweepSpec {
        SweepSpec { variable, grid: grid.parse().unwrap(), fixed: o.point().unwrap(), quantities: quantities.to_vec() }
    }

    #[test]
    fn coherence_rises_with_velocity() {
        let s = spec(SweepVariable::W, "0:0.2:51", &[Quantity::CoherenceQubit], Overrides::default());
        let r = run_sweep(&s).unwrap();
        let col: Vec<f64> = r.column(Quantity::CoherenceQubit).unwrap().into_iter().map(Option::unwrap).collect();
        assert_eq!(col.len(), 51);
        assert!(col.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn complementarity_falls_with_acceleration() {
        let s = spec(SweepVariable::Abar, "10:200:40:log", &[Quantity::Complementarity], Overrides::default());
        let r = run_sweep(&s).unwrap();
        let col: Vec<f64> = r.column(Quantity::Complementarity).unwrap().into_iter().map(Option::unwrap).collect();
        assert!(col.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn two_point_sweep_has_two_rows() {
        let s = spec(SweepVariable::Sigma, "5:50:2", &[Quantity::Visibility], Overrides::default());
        let r = run_sweep(&s).unwrap();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("sigma,visibility\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn columns_follow_canonical_order() {
        let q = crate::config::parse_quantities("complementarity,excitation_rate").unwrap();
        let s = spec(SweepVariable::Theta, "0:3:3", &q, Overrides::default());
        let mut buf = Vec::new();
        write_csv(&run_sweep(&s).unwrap(), &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("theta,excitation_rate,complementarity\n"));
    }

    #[test]
    fn out_of_domain_grid_is_rejected_up_front() {
        let s = spec(SweepVariable::Theta, "0:4:5", &[Quantity::CoherenceQubit], Overrides::default());
        assert_eq!(run_sweep(&s).unwrap_err().exit_code(), 2);
        let s = spec(SweepVariable::W, "0:1.5:4", &[Quantity::Visibility], Overrides::default());
        assert_eq!(run_sweep(&s).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn point_failures_become_empty_cells() {
        // Strong coupling drives the visibility out of [0, 1] at long times.
        let o = Overrides { coupling: Some(0.5), ..Default::default() };
        let s = spec(SweepVariable::Sigma, "1:100:3", &[Quantity::ExcitationRate, Quantity::Visibility], o);
        let r = run_sweep(&s).unwrap();
        assert!(!r.failures.is_empty());
        assert_eq!(r.exit_code(), 1);
        assert!(r.records.iter().all(|rec| rec.cells[0].is_some()));
        assert!(r.records.last().unwrap().cells[1].is_none());
    }

    #[test]
    fn suppressed_cells_are_counted() {
        let o =
            Overrides { abar: Some(1.0), w: Some(10.0), regime: Some(Regime::UltraRelativistic), ..Default::default() };
        let s = spec(SweepVariable::W, "10:20:3", &[Quantity::ExcitationRate, Quantity::CoherenceQubit], o);
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.suppressed, 3);
        assert_eq!(r.exit_code(), 0);
        let json = to_json(&r);
        assert!(json[0]["coherence_qubit"].is_null());
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let s = spec(
            SweepVariable::Abar,
            "10:1000:97:log",
            &Quantity::ALL,
            Overrides { w: Some(0.1), ..Default::default() },
        );
        let render = || {
            let mut buf = Vec::new();
            write_csv(&run_sweep(&s).unwrap(), &mut buf).unwrap();
            buf
        };
        let a = render();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = single.install(render);
        assert_eq!(a, b);
    }
}
