//! Command-line driver.
//!
//! Every command reads a [`RunConfig`], writes its tables through a
//! [`Sink`] and maps the outcome to an exit code: 0 on success, 1 for usage,
//! I/O or schema errors, 2 when a numerical method did not converge (any
//! partial output has been written by then).

mod commands;
mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_bounds_table, cmd_examples, cmd_moments, cmd_simulate, cmd_solve_moments, cmd_synthesize,
    Status,
};
pub use output::{Cell, Format, Sink, Table};

use crate::error::{Error, Result};
use crate::heat::{OddState, StepControl};
use crate::hermite::HermiteExpansion;
use crate::numerics::{Domain, Grid, QuadratureSpec};

/// Overrides the absolute quadrature tolerance of every command.
pub const QUAD_TOL_ENV: &str = "HEATREACH_QUAD_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "heatreach",
    version,
    about = "Boundary-control synthesis and verification for the heat equation on a half-axis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Power moments of a target state.
    Moments,
    /// Bang-bang control matching the first 2P moments of a target.
    SolveMoments,
    /// Explicit step control approximating a target.
    Synthesize,
    /// End state of a control read from a JSON file.
    Simulate,
    /// Error bounds for the Gaussian-sine target, with measured errors.
    BoundsTable,
    /// Controls, end states and error norms for the three worked examples.
    Examples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetKind {
    /// `v(ξ) = ξ`.
    Example1,
    /// `v(ξ) = 1 - ξ`.
    Example2,
    /// The Gaussian-sine state.
    Example3,
    /// A Hermite expansion read from `--expansion`.
    CustomExpansionFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum InitialKind {
    #[default]
    Zero,
    Example1,
    Example2,
    Example3,
}

/// Extra `bounds-table` row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtraRow {
    pub truncation: usize,
    pub l: u64,
}

fn parse_extra_row(s: &str) -> std::result::Result<ExtraRow, String> {
    let (mut n, mut l) = (None, None);
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=VALUE, got `{part}`"))?;
        match key.trim() {
            "N" => n = Some(value.trim().parse().map_err(|e| format!("N: {e}"))?),
            "l" => l = Some(value.trim().parse().map_err(|e| format!("l: {e}"))?),
            other => return Err(format!("unknown key `{other}` (expected N or l)")),
        }
    }
    match (n, l) {
        (Some(truncation), Some(l)) => Ok(ExtraRow { truncation, l }),
        _ => Err("need both N and l, as in N=3,l=1000".into()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long, value_enum, global = true)]
    pub target: Option<TargetKind>,
    /// Horizon `T`.
    #[arg(long = "T", global = true)]
    pub horizon: Option<f64>,
    /// Control bound `L`.
    #[arg(long = "L", global = true)]
    pub bound: Option<f64>,
    /// Truncation index `N`.
    #[arg(long = "N", global = true)]
    pub truncation: Option<usize>,
    /// Number of ON intervals `P` of a bang-bang control.
    #[arg(long = "P", global = true)]
    pub pairs: Option<usize>,
    /// Step resolution, one value or one per index `p = 0..=N`.
    #[arg(long = "l", value_delimiter = ',', global = true)]
    pub l: Vec<u64>,
    /// Directory for output files; tables go to stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, global = true, default_value_t = 6.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, global = true, default_value_t = 121)]
    pub points: usize,
    #[arg(long, value_enum, global = true, default_value = "csv")]
    pub format: Format,
    /// JSON expansion file `{"T": real, "omegas": [reals]}`.
    #[arg(long, global = true)]
    pub expansion: Option<PathBuf>,
    /// JSON control file `{"T": real, "breakpoints": [reals], "levels": [reals]}`.
    #[arg(long, global = true)]
    pub control: Option<PathBuf>,
    #[arg(long, value_enum, global = true, default_value = "zero")]
    pub initial_state: InitialKind,
    /// Additional bounds-table row, e.g. `N=3,l=1000`.
    #[arg(long, value_parser = parse_extra_row, global = true)]
    pub extra_row: Vec<ExtraRow>,
    /// Weight `T* > T` for the necessary reachability test.
    #[arg(long = "t-star", global = true)]
    pub t_star: Option<f64>,
}

/// Validated inputs of one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub target: Option<TargetKind>,
    pub horizon: f64,
    pub bound: f64,
    pub truncation: Option<usize>,
    pub pairs: Option<usize>,
    pub l: Vec<u64>,
    pub output: Option<PathBuf>,
    pub grid: Grid,
    pub format: Format,
    pub expansion: Option<HermiteExpansion>,
    pub control: Option<StepControl>,
    pub initial_state: InitialKind,
    pub extra_rows: Vec<ExtraRow>,
    pub t_star: Option<f64>,
    /// Value of [`QUAD_TOL_ENV`], if set.
    pub quad_tol: Option<f64>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{what} file {} does not match the schema: {e}", path.display())))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    /// Checks the options and loads referenced files. `quad_tol` is the raw
    /// value of [`QUAD_TOL_ENV`].
    pub fn new(command: Command, o: Options, quad_tol: Option<&str>) -> Result<Self> {
        let quad_tol = quad_tol
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("{QUAD_TOL_ENV}={s}: {e}")))
                    .and_then(|v| positive(QUAD_TOL_ENV, v))
            })
            .transpose()?;
        let expansion = o
            .expansion
            .as_deref()
            .map(|p| read_json::<HermiteExpansion>(p, "expansion")?.validated())
            .transpose()?;
        let control = o
            .control
            .as_deref()
            .map(|p| read_json::<StepControl>(p, "control"))
            .transpose()?;

        let horizon = match (&expansion, o.target, o.horizon) {
            (Some(e), Some(TargetKind::CustomExpansionFile), Some(t)) if t != e.horizon() => {
                return Err(Error::InvalidArgument(format!(
                    "--T {t} disagrees with T = {} in the expansion file",
                    e.horizon()
                )))
            }
            (Some(e), Some(TargetKind::CustomExpansionFile), _) => e.horizon(),
            (_, _, t) => positive("T", t.unwrap_or(1.0))?,
        };
        let bound = positive("L", o.bound.unwrap_or(1.0))?;
        if o.target == Some(TargetKind::CustomExpansionFile) && expansion.is_none() {
            return Err(Error::InvalidArgument(
                "--target custom-expansion-file needs --expansion FILE".into(),
            ));
        }
        if let Some(l) = o.l.iter().find(|&&l| l == 0) {
            return Err(Error::InvalidArgument(format!("step resolution l must be at least 1, got {l}")));
        }
        if let Some(ts) = o.t_star {
            positive("T*", ts)?;
        }
        let domain = if o.x_min >= 0.0 { Domain::HalfLine } else { Domain::FullLine };
        let grid = Grid::linspace(o.x_min, o.x_max, o.points, domain)?;

        let needs_target = matches!(
            command,
            Command::Moments | Command::SolveMoments | Command::Synthesize | Command::Examples
        );
        if needs_target && o.target.is_none() {
            return Err(Error::InvalidArgument("this command needs --target".into()));
        }
        if command == Command::Simulate && control.is_none() {
            return Err(Error::InvalidArgument("simulate needs --control FILE".into()));
        }

        Ok(Self {
            command,
            target: o.target,
            horizon,
            bound,
            truncation: o.truncation,
            pairs: o.pairs,
            l: o.l,
            output: o.output,
            grid,
            format: o.format,
            expansion,
            control,
            initial_state: o.initial_state,
            extra_rows: o.extra_row,
            t_star: o.t_star,
            quad_tol,
        })
    }

    /// Default quadrature with the given absolute tolerance unless the
    /// environment overrides it.
    pub fn spec(&self, abs_tol: f64) -> QuadratureSpec {
        QuadratureSpec::default().with_abs_tol(self.quad_tol.unwrap_or(abs_tol))
    }

    /// The selected target as a state.
    pub fn target_state(&self) -> Result<OddState> {
        let horizon = self.horizon;
        match self.target {
            Some(TargetKind::Example1) => Ok(OddState::Example1 { horizon }),
            Some(TargetKind::Example2) => Ok(OddState::Example2 { horizon }),
            Some(TargetKind::Example3) => Ok(OddState::Example3 { horizon }),
            Some(TargetKind::CustomExpansionFile) => Ok(OddState::Expansion(
                self.expansion.clone().expect("checked when the config was built"),
            )),
            None => Err(Error::InvalidArgument("no target selected".into())),
        }
    }

    pub fn initial(&self, horizon: f64) -> OddState {
        match self.initial_state {
            InitialKind::Zero => OddState::Zero,
            InitialKind::Example1 => OddState::Example1 { horizon },
            InitialKind::Example2 => OddState::Example2 { horizon },
            InitialKind::Example3 => OddState::Example3 { horizon },
        }
    }

    pub fn truncation(&self) -> Result<usize> {
        self.truncation
            .ok_or_else(|| Error::InvalidArgument("this command needs --N".into()))
    }
}

/// Exit code for an error: 2 for numerical non-convergence, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::NonConvergent { .. } => 2,
        _ => 1,
    }
}

/// Dispatches a validated configuration.
pub fn execute(config: &RunConfig, sink: &mut Sink) -> Result<Status> {
    match config.command {
        Command::Moments => cmd_moments(config, sink),
        Command::SolveMoments => cmd_solve_moments(config, sink),
        Command::Synthesize => cmd_synthesize(config, sink),
        Command::Simulate => cmd_simulate(config, sink),
        Command::BoundsTable => cmd_bounds_table(config, sink),
        Command::Examples => cmd_examples(config, sink),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let env_tol = std::env::var(QUAD_TOL_ENV).ok();
    let config = match RunConfig::new(cli.command, cli.options, env_tol.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut sink = Sink::new(config.output.clone(), config.format);
    let outcome = execute(&config, &mut sink);
    if let Err(e) = sink.finish() {
        eprintln!("error: {e}");
        return 1;
    }
    match outcome {
        Ok(Status::Done) => 0,
        Ok(Status::Partial) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("heatreach").chain(args.iter().copied()))
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        RunConfig::new(cli.command, cli.options, None)
    }

    #[test]
    fn parses_flags_after_the_command() {
        let c = config(&["examples", "--target", "example3", "--N", "1", "--l", "10,20", "--T", "2"]).unwrap();
        assert_eq!(c.command, Command::Examples);
        assert_eq!(c.target, Some(TargetKind::Example3));
        assert_eq!(c.truncation, Some(1));
        assert_eq!(c.l, vec![10, 20]);
        assert_eq!(c.horizon, 2.0);
        assert_eq!(c.bound, 1.0);
    }

    #[test]
    fn extra_rows() {
        assert_eq!(parse_extra_row("N=3,l=1000"), Ok(ExtraRow { truncation: 3, l: 1000 }));
        assert!(parse_extra_row("N=3").is_err());
        assert!(parse_extra_row("M=3,l=1").is_err());
        let c = config(&["bounds-table", "--extra-row", "N=3,l=1000", "--extra-row", "N=0,l=5"]).unwrap();
        assert_eq!(c.extra_rows.len(), 2);
    }

    #[test]
    fn rejects_invalid_configurations() {
        assert!(config(&["examples", "--target", "example1", "--T", "-1"]).is_err());
        assert!(config(&["examples", "--target", "example1", "--L", "0"]).is_err());
        assert!(config(&["examples"]).is_err());
        assert!(config(&["simulate"]).is_err());
        assert!(config(&["synthesize", "--target", "custom-expansion-file"]).is_err());
        assert!(config(&["synthesize", "--target", "example3", "--l", "0"]).is_err());
        assert!(config(&["simulate", "--x-min", "3", "--x-max", "1"]).is_err());
    }

    #[test]
    fn environment_tolerance() {
        let cli = Cli::try_parse_from(["heatreach", "bounds-table"]).unwrap();
        let c = RunConfig::new(cli.command, cli.options.clone(), Some("1e-9")).unwrap();
        assert_eq!(c.spec(1e-14).abs_tol, 1e-9);
        assert!(RunConfig::new(cli.command, cli.options.clone(), Some("abc")).is_err());
        assert!(RunConfig::new(cli.command, cli.options, Some("-1")).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["heatreach", "--help"]), 0);
        assert_eq!(run(["heatreach", "no-such-command"]), 1);
        assert_eq!(exit_code(&Error::NonConvergent { value: 0.0, err_estimate: 1.0 }), 2);
        assert_eq!(exit_code(&Error::InvalidArgument(String::new())), 1);
    }
}
