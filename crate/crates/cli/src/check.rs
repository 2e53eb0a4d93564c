//! Closed forms against the quadrature oracle at one parameter point.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;
use udw_core::model::{DetectorParams, Regime, ULTRA_RELATIVISTIC_SOFT_LIMIT};
use udw_core::oracle::{finite_time_correction_fd, rate_numeric_infinite, response_numeric_finite, QuadratureConfig};
use udw_core::rates::{
    finite_time_correction, planck_rate, rate_finite, rate_infinite, rate_ultra, velocity_factor_f,
    velocity_factor_f_direct, velocity_factor_f_series, Direction,
};

use crate::error::{CliError, EXIT_EVALUATION, EXIT_NON_CONVERGENCE, EXIT_OK};

pub const THERMAL_TOL: f64 = 1e-6;
pub const CLOSED_BALANCE_TOL: f64 = 1e-12;
pub const ORACLE_BALANCE_TOL: f64 = 1e-5;
pub const SLOPE_TOL: f64 = 5e-2;
pub const ULTRA_TOL: f64 = 0.1;
pub const FD_TOL: f64 = 1e-6;
pub const WINDOW_TOL: f64 = 1e-3;
pub const CROSSOVER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub deviation: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub message: Option<String>,
    #[serde(skip)]
    non_convergence: bool,
}

impl CheckResult {
    fn measured(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        let verdict = if deviation <= tolerance { Verdict::Pass } else { Verdict::Fail };
        CheckResult { name, deviation: Some(deviation), tolerance, verdict, message: None, non_convergence: false }
    }

    fn from_outcome(name: &'static str, tolerance: f64, outcome: Result<f64, CliError>) -> Self {
        match outcome {
            Ok(d) => CheckResult::measured(name, d, tolerance),
            Err(e) => CheckResult {
                name,
                deviation: None,
                tolerance,
                verdict: Verdict::Error,
                non_convergence: matches!(e, CliError::NonConvergence(_)),
                message: Some(e.to_string()),
            },
        }
    }

    fn with_message(mut self, m: String) -> Self {
        self.message = Some(m);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub abar: f64,
    pub w: f64,
    pub sigma: f64,
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    /// 1 if any check fails, else 3 if an oracle failed to converge, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.verdict == Verdict::Fail) {
            EXIT_EVALUATION
        } else if self.checks.iter().any(|c| c.non_convergence) {
            EXIT_NON_CONVERGENCE
        } else if self.checks.iter().any(|c| c.verdict == Verdict::Error) {
            EXIT_EVALUATION
        } else {
            EXIT_OK
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn nr_params(abar: f64, w: f64, sigma: f64) -> Result<DetectorParams, CliError> {
    Ok(DetectorParams::new(abar, w, sigma, 1e-3, Regime::NonRelativistic)?)
}

/// Copy of a shared oracle result so several checks can build on it.
fn reuse(r: &Result<f64, CliError>) -> Result<f64, CliError> {
    match r {
        Ok(v) => Ok(*v),
        Err(CliError::Validation(m)) => Err(CliError::Validation(m.clone())),
        Err(CliError::NonConvergence(m)) => Err(CliError::NonConvergence(m.clone())),
        Err(e) => Err(CliError::Evaluation(e.to_string())),
    }
}

fn numeric(abar: f64, w: f64, d: Direction, cfg: &QuadratureConfig) -> Result<f64, CliError> {
    Ok(rate_numeric_infinite(abar, w, d, cfg)?)
}

/// Run every check that applies at (ā, w, σ). Checks tied to the small-w
/// expansion are skipped for w ≥ 1; the large-w asymptote is checked only for
/// w at or above the ultra-relativistic guard.
pub fn oracle_check(abar: f64, w: f64, sigma: f64, cfg: &QuadratureConfig) -> Result<CheckReport, CliError> {
    let _ = DetectorParams::new(abar, w, sigma, 1e-3, Regime::Exact)?;
    cfg.validate()?;
    let small_w = w < 1.0;
    let x = 2.0 * PI / abar;
    let mut checks = Vec::new();

    if w == 0.0 {
        checks.push(CheckResult::from_outcome(
            "thermal",
            THERMAL_TOL,
            numeric(abar, 0.0, Direction::Excite, cfg).map(|r| rel(r, planck_rate(abar))),
        ));
    }

    if small_w {
        let closed = nr_params(abar, w, sigma).and_then(|p| {
            let lo = rate_infinite(&p, Direction::Excite)?;
            let hi = rate_infinite(&p, Direction::Deexcite)?;
            Ok(rel(hi / lo, x.exp()))
        });
        checks.push(CheckResult::from_outcome("detailed_balance_closed", CLOSED_BALANCE_TOL, closed));
    }

    let excite = numeric(abar, w, Direction::Excite, cfg);
    let oracle_balance = reuse(&excite).and_then(|lo| {
        let hi = numeric(abar, w, Direction::Deexcite, cfg)?;
        Ok(rel(hi / lo, x.exp()))
    });
    checks.push(CheckResult::from_outcome("detailed_balance_oracle", ORACLE_BALANCE_TOL, oracle_balance));

    if w > 0.0 && small_w {
        let slope = reuse(&excite).and_then(|r| {
            let r0 = numeric(abar, 0.0, Direction::Excite, cfg)?;
            Ok(rel((r - r0) / (w * w), -velocity_factor_f(abar)))
        });
        checks.push(CheckResult::from_outcome("velocity_slope", SLOPE_TOL, slope));
    }

    if w >= ULTRA_RELATIVISTIC_SOFT_LIMIT {
        let ultra = reuse(&excite).and_then(|r| {
            let p = DetectorParams::new(abar, w, sigma, 1e-3, Regime::UltraRelativistic)?;
            let asym = rate_ultra(&p, Direction::Excite)?;
            Ok((r, asym))
        });
        let result = match ultra {
            Ok((r, asym)) => {
                let mut c = CheckResult::measured("ultra_asymptote", rel(r, asym), ULTRA_TOL);
                if r < asym {
                    c.verdict = Verdict::Fail;
                }
                c.with_message(format!("oracle {r:.6e}, asymptote {asym:.6e}"))
            }
            Err(e) => CheckResult::from_outcome("ultra_asymptote", ULTRA_TOL, Err(e)),
        };
        checks.push(result);
    }

    let halved =
        reuse(&excite).and_then(|r| Ok((numeric(abar, w, Direction::Excite, &cfg.with_scaled_eps(0.5))? - r).abs()));
    checks.push(CheckResult::from_outcome("eps_halving", cfg.abs_tol, halved));

    let widened = reuse(&excite).and_then(|r| {
        let wide = QuadratureConfig { cutoff_multiplier: cfg.cutoff_multiplier * 1.5, ..cfg.clone() };
        Ok((numeric(abar, w, Direction::Excite, &wide)? - r).abs())
    });
    checks.push(CheckResult::from_outcome("cutoff_widening", cfg.abs_tol, widened));

    if small_w {
        let fd = (|| {
            let mut worst: f64 = 0.0;
            for d in [Direction::Excite, Direction::Deexcite] {
                let analytic = finite_time_correction(abar, w, sigma, d);
                let numeric = finite_time_correction_fd(abar, w, sigma, d)?;
                worst = worst.max(rel(numeric, analytic));
            }
            Ok(worst)
        })();
        checks.push(CheckResult::from_outcome("finite_difference_correction", FD_TOL, fd));

        let window = (|| {
            let p = nr_params(abar, w, sigma)?;
            let mut worst: f64 = 0.0;
            for d in [Direction::Excite, Direction::Deexcite] {
                let n = response_numeric_finite(abar, w, sigma, d, cfg)? / (PI.sqrt() * sigma);
                worst = worst.max(rel(n, rate_finite(&p, d)?));
            }
            Ok(worst)
        })();
        checks.push(CheckResult::from_outcome("gaussian_window", WINDOW_TOL, window));
    }

    let crossover = (0..=40)
        .map(|i| 18.0 + 0.1 * i as f64)
        .map(|a| rel(velocity_factor_f_series(a), velocity_factor_f_direct(a)))
        .fold(0.0, f64::max);
    checks.push(CheckResult::measured("f_branch_crossover", crossover, CROSSOVER_TOL));

    Ok(CheckReport { abar, w, sigma, checks })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|d| format!("{d:.3e}")).unwrap_or_else(|| "-".into())
}

/// Aligned plain-text table; `color` wraps verdicts in ANSI codes.
pub fn render_text(report: &CheckReport, color: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "oracle check at abar = {}, w = {}, sigma = {}", report.abar, report.w, report.sigma);
    let _ = writeln!(s, "{:<30} {:>11} {:>11}  verdict", "check", "deviation", "tolerance");
    for c in &report.checks {
        let v = c.verdict.as_str().to_ascii_uppercase();
        let v = match (color, c.verdict) {
            (false, _) => v,
            (true, Verdict::Pass) => format!("\x1b[32m{v}\x1b[0m"),
            (true, _) => format!("\x1b[31m{v}\x1b[0m"),
        };
        let _ = write!(s, "{:<30} {:>11} {:>11}  {v}", c.name, fmt_opt(c.deviation), format!("{:.1e}", c.tolerance));
        if let Some(m) = &c.message {
            let _ = write!(s, "  ({m})");
        }
        s.push('\n');
    }
    s
}

pub fn write_csv<W: std::io::Write>(report: &CheckReport, out: W) -> Result<(), csv::Error> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    wtr.write_record(["check", "deviation", "tolerance", "verdict", "message"])?;
    for c in &report.checks {
        wtr.write_record([
            c.name.to_string(),
            c.deviation.map(|d| format!("{d:.16e}")).unwrap_or_default(),
            format!("{:.16e}", c.tolerance),
            c.verdict.as_str().to_string(),
            c.message.clone().unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
