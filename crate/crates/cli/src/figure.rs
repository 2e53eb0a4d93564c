//! Datasets behind the five coherence and complementarity plots: one CSV
//! per curve, each a sweep over the plot's horizontal axis.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use udw_core::observables::RateModel;

use crate::config::{Grid, Overrides, Quantity, Spacing};
use crate::error::CliError;
use crate::sweep::{format_number, run_sweep, write_csv, SweepResult, SweepSpec, SweepVariable};

pub const DEFAULT_W_SET: [f64; 4] = [0.0, 0.05, 0.10, 0.15];
pub const DEFAULT_ABAR_SET: [f64; 3] = [10.0, 50.0, 100.0];

const SIGMA: f64 = 10.0;
const COUPLING: f64 = 0.01;
const THETA: f64 = FRAC_PI_2;
const FIG3_ABAR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    One = 1,
    Two = 2,
    Three = 3,
    Four = 4,
    Five = 5,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::One, FigureId::Two, FigureId::Three, FigureId::Four, FigureId::Five];

    pub fn number(self) -> u8 {
        self as u8
    }

    fn axis(self) -> (SweepVariable, Grid) {
        let grid = |a, b, n| Grid::new(a, b, n, Spacing::Linear).expect("static grid");
        match self {
            FigureId::One | FigureId::Four => (SweepVariable::Abar, grid(10.0, 200.0, 191)),
            FigureId::Two | FigureId::Five => (SweepVariable::W, grid(0.0, 0.2, 51)),
            FigureId::Three => (SweepVariable::Theta, grid(0.0, PI, 181)),
        }
    }

    /// The variable held fixed on each curve.
    fn family(self) -> SweepVariable {
        match self {
            FigureId::One | FigureId::Three | FigureId::Four => SweepVariable::W,
            FigureId::Two | FigureId::Five => SweepVariable::Abar,
        }
    }

    pub fn quantities(self) -> Vec<Quantity> {
        match self {
            FigureId::One | FigureId::Two | FigureId::Three => vec![Quantity::CoherenceQubit],
            FigureId::Four | FigureId::Five => {
                vec![Quantity::Visibility, Quantity::Distinguishability, Quantity::Complementarity]
            }
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches("fig");
        match t {
            "1" => Ok(FigureId::One),
            "2" => Ok(FigureId::Two),
            "3" => Ok(FigureId::Three),
            "4" => Ok(FigureId::Four),
            "5" => Ok(FigureId::Five),
            _ => Err(CliError::Validation(format!("unknown figure '{s}' (expected 1 to 5)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub family: SweepVariable,
    pub family_value: f64,
    pub result: SweepResult,
}

impl Curve {
    pub fn file_name(&self, fig: FigureId) -> String {
        format!("fig{}_{}_{}.csv", fig.number(), self.family, self.family_value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: FigureId,
    pub curves: Vec<Curve>,
    /// Whether the family values came from an override rather than the defaults.
    pub family_overridden: bool,
}

/// Build every curve of a figure. `w_set` and `abar_set` replace the default
/// curve families; the one not used by this figure is ignored.
pub fn figure_dataset(id: FigureId, w_set: Option<&[f64]>, abar_set: Option<&[f64]>) -> Result<Figure, CliError> {
    let family = id.family();
    let (values, overridden): (Vec<f64>, bool) = match family {
        SweepVariable::W => w_set.map_or((DEFAULT_W_SET.to_vec(), false), |s| (s.to_vec(), true)),
        _ => abar_set.map_or((DEFAULT_ABAR_SET.to_vec(), false), |s| (s.to_vec(), true)),
    };
    if values.is_empty() {
        return Err(CliError::Validation(format!("empty {family} set")));
    }
    let (variable, grid) = id.axis();
    let base = Overrides {
        abar: Some(FIG3_ABAR),
        sigma: Some(SIGMA),
        coupling: Some(COUPLING),
        theta: Some(THETA),
        rate_model: Some(RateModel::InfiniteTime),
        ..Default::default()
    }
    .point()?;

    let mut curves = Vec::with_capacity(values.len());
    for v in values {
        let fixed = family.apply(&base, v)?;
        let spec = SweepSpec { variable, grid, fixed, quantities: id.quantities() };
        let result = run_sweep(&spec)?;
        if let Some(f) = result.failures.first() {
            return Err(CliError::Evaluation(format!("{family} = {v}, {variable} = {}: {}", f.value, f.message)));
        }
        curves.push(Curve { family, family_value: v, result });
    }
    Ok(Figure { id, curves, family_overridden: overridden })
}

fn write_header<W: Write>(fig: &Figure, curve: &Curve, out: &mut W) -> std::io::Result<()> {
    let p = &curve.result.spec.fixed;
    let (variable, _) = fig.id.axis();
    writeln!(out, "# figure {}: {} vs {}", fig.id.number(), quantity_list(fig.id), variable)?;
    writeln!(out, "# curve: {} = {}", curve.family, format_number(curve.family_value))?;
    let mut fixed = vec![
        format!("sigma = {}", format_number(p.params.sigma())),
        format!("coupling = {}", format_number(p.params.coupling())),
    ];
    if variable != SweepVariable::Abar && curve.family != SweepVariable::Abar {
        fixed.push(format!("abar = {}", format_number(p.params.abar())));
    }
    if fig.id.quantities().contains(&Quantity::CoherenceQubit) && variable != SweepVariable::Theta {
        fixed.push(format!("theta = {}", format_number(p.angles.theta())));
    }
    writeln!(out, "# fixed: {}", fixed.join(", "))?;
    writeln!(out, "# rates: infinite-time")?;
    let flag = match curve.family {
        SweepVariable::W => "--w-set",
        _ => "--abar-set",
    };
    if fig.family_overridden {
        writeln!(out, "# {} values given by {flag}", curve.family)?;
    } else {
        writeln!(
            out,
            "# {} values are an artifact default, not read off the plot; override with {flag}",
            curve.family
        )?;
    }
    Ok(())
}

fn quantity_list(id: FigureId) -> String {
    id.quantities().iter().map(|q| q.as_str()).collect::<Vec<_>>().join(", ")
}

/// One curve as bytes: `#` metadata lines, then the sweep CSV.
pub fn render_curve(fig: &Figure, curve: &Curve) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_header(fig, curve, &mut buf).expect("writing to a Vec");
    write_csv(&curve.result, &mut buf).map_err(|e| CliError::Evaluation(e.to_string()))?;
    Ok(buf)
}

/// Write every curve into `dir`, creating it if needed. Returns the paths in
/// curve order.
pub fn write_figure(fig: &Figure, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths = Vec::with_capacity(fig.curves.len());
    for curve in &fig.curves {
        let path = dir.join(curve.file_name(fig.id));
        fs::write(&path, render_curve(fig, curve)?).map_err(|e| CliError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
