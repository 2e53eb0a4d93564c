use std::fs::File;
use std::io::{self, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use udw_cli::check::{oracle_check, render_text};
use udw_cli::config::{Format, Overrides, Quantity};
use udw_cli::error::CliError;
use udw_cli::evaluate::eval_point;
use udw_cli::figure::{figure_dataset, write_figure, FigureId};
use udw_cli::sweep::{run_sweep, to_json, write_csv, SweepSpec, SweepVariable};

/// Coherence, visibility and which-path information of a uniformly
/// accelerated, transversally moving two-level detector.
#[derive(Debug, Parser)]
#[command(name = "udw", version)]
struct Cli {
    /// Flat key = value file; flags win over its entries.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every quantity at one parameter point (JSON by default).
    Eval(Common),
    /// Sweep one variable over a grid (CSV by default).
    Sweep {
        /// abar, w, sigma, theta or alpha
        variable: String,
        #[command(flatten)]
        common: Common,
    },
    /// Write the CSV files behind one of the five figures.
    Figure {
        /// Figure number, 1 to 5
        fig: String,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the closed forms with the quadrature oracle at one point.
    Check(Common),
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Acceleration over gap, a/Ω
    #[arg(long)]
    abar: Option<String>,
    /// Transverse four-velocity component
    #[arg(long)]
    w: Option<String>,
    /// Interaction time in units of 1/Ω
    #[arg(long)]
    sigma: Option<String>,
    /// Coupling λ
    #[arg(long)]
    coupling: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    /// Interferometer phase
    #[arg(long)]
    alpha: Option<String>,
    /// non-relativistic, ultra-relativistic or exact
    #[arg(long)]
    regime: Option<String>,
    /// finite or infinite
    #[arg(long)]
    rate_model: Option<String>,
    /// Comma-separated quantity names
    #[arg(long)]
    quantities: Option<String>,
    /// start:stop:points[:log]
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated w values, one curve each
    #[arg(long)]
    w_set: Option<String>,
    /// Comma-separated abar values, one curve each
    #[arg(long)]
    abar_set: Option<String>,
    /// Output file (directory for `figure`)
    #[arg(long)]
    out: Option<String>,
    /// csv or json (check also accepts text)
    #[arg(long)]
    format: Option<String>,
    /// Comma-separated, strictly decreasing regulator values
    #[arg(long)]
    eps_schedule: Option<String>,
    /// Absolute quadrature tolerance
    #[arg(long)]
    quad_tol: Option<String>,
}

impl Common {
    fn overrides(&self, config: Option<&Path>) -> Result<Overrides, CliError> {
        let mut flags = Overrides::default();
        let pairs = [
            ("abar", &self.abar),
            ("w", &self.w),
            ("sigma", &self.sigma),
            ("coupling", &self.coupling),
            ("theta", &self.theta),
            ("phi", &self.phi),
            ("alpha", &self.alpha),
            ("regime", &self.regime),
            ("rate-model", &self.rate_model),
            ("quantities", &self.quantities),
            ("grid", &self.grid),
            ("w-set", &self.w_set),
            ("abar-set", &self.abar_set),
            ("out", &self.out),
            ("eps-schedule", &self.eps_schedule),
            ("quad-tol", &self.quad_tol),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v).map_err(|e| CliError::Validation(format!("--{key}: {e}")))?;
            }
        }
        let base = match config {
            Some(path) => Overrides::from_config_file(path)?,
            None => Overrides::default(),
        };
        Ok(flags.layered_over(base))
    }

    fn format(&self, o: &Overrides, default: Format) -> Result<Format, CliError> {
        match &self.format {
            Some(f) => f.parse().map_err(CliError::Validation),
            None => Ok(o.format.unwrap_or(default)),
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn out_error(path: Option<&Path>, e: io::Error) -> CliError {
    CliError::io(path.unwrap_or(Path::new("<stdout>")), e)
}

fn eval(common: &Common, config: Option<&Path>) -> Result<i32, CliError> {
    let o = common.overrides(config)?;
    let format = common.format(&o, Format::Json)?;
    let report = eval_point(&o.point()?)?;
    let path = o.out.as_deref();
    let mut out = open_out(path)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| CliError::Evaluation(e.to_string()))?;
            writeln!(out).map_err(|e| out_error(path, e))?;
        }
        Format::Csv => {
            let fields = report.fields();
            let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            let io = |e: csv::Error| CliError::Evaluation(e.to_string());
            wtr.write_record(fields.iter().map(|(k, _)| *k)).map_err(io)?;
            wtr.write_record(fields.iter().map(|(_, v)| v.as_str())).map_err(io)?;
            wtr.flush().map_err(|e| out_error(path, e))?;
        }
    }
    out.flush().map_err(|e| out_error(path, e))?;
    Ok(0)
}

fn sweep(variable: &str, common: &Common, config: Option<&Path>) -> Result<i32, CliError> {
    let o = common.overrides(config)?;
    let variable: SweepVariable = variable.parse().map_err(CliError::Validation)?;
    let format = common.format(&o, Format::Csv)?;
    let grid = o.grid.ok_or_else(|| CliError::Validation("sweep needs --grid start:stop:points".into()))?;
    let spec = SweepSpec {
        variable,
        grid,
        fixed: o.point()?,
        quantities: o.quantities.clone().unwrap_or_else(|| Quantity::ALL.to_vec()),
    };
    let result = run_sweep(&spec)?;
    let path = o.out.as_deref();
    let mut out = open_out(path)?;
    match format {
        Format::Csv => write_csv(&result, &mut out).map_err(|e| CliError::Evaluation(e.to_string()))?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &to_json(&result))
                .map_err(|e| CliError::Evaluation(e.to_string()))?;
            writeln!(out).map_err(|e| out_error(path, e))?;
        }
    }
    out.flush().map_err(|e| out_error(path, e))?;

    let mut err = io::stderr().lock();
    for w in &result.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    for f in &result.failures {
        let _ = writeln!(err, "{variable} = {}: {}: {}", f.value, f.quantity, f.message);
    }
    let _ = writeln!(err, "{}", result.summary());
    Ok(result.exit_code())
}

fn figure(fig: &str, common: &Common, config: Option<&Path>) -> Result<i32, CliError> {
    let o = common.overrides(config)?;
    let id: FigureId = fig.parse()?;
    let figure = figure_dataset(id, o.w_set.as_deref(), o.abar_set.as_deref())?;
    let dir = o.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    let mut stdout = io::stdout().lock();
    for path in write_figure(&figure, &dir)? {
        writeln!(stdout, "{}", path.display()).map_err(|e| out_error(None, e))?;
    }
    Ok(0)
}

fn check(common: &Common, config: Option<&Path>) -> Result<i32, CliError> {
    let o = common.overrides(config)?;
    let text_requested = common.format.as_deref().map(str::trim) == Some("text");
    let format = if text_requested || (common.format.is_none() && o.format.is_none()) {
        None
    } else {
        Some(common.format(&o, Format::Csv)?)
    };
    let p = o.point()?.params;
    let report = oracle_check(p.abar(), p.w(), p.sigma(), &o.quadrature()?)?;
    let path = o.out.as_deref();
    let mut out = open_out(path)?;
    match format {
        None => {
            let color = path.is_none() && io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none();
            out.write_all(render_text(&report, color).as_bytes()).map_err(|e| out_error(path, e))?;
        }
        Some(Format::Csv) => {
            udw_cli::check::write_csv(&report, &mut out).map_err(|e| CliError::Evaluation(e.to_string()))?
        }
        Some(Format::Json) => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| CliError::Evaluation(e.to_string()))?;
            writeln!(out).map_err(|e| out_error(path, e))?;
        }
    }
    out.flush().map_err(|e| out_error(path, e))?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.config.as_deref();
    let outcome = match &cli.command {
        Command::Eval(c) => eval(c, config),
        Command::Sweep { variable, common } => sweep(variable, common, config),
        Command::Figure { fig, common } => figure(fig, common, config),
        Command::Check(c) => check(c, config),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let msg = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
