//! Command-line front end: argument parsing into a [`RunConfig`] and a
//! [`run`] that maps outcomes onto exit codes.
//!
//! Exit codes: 0 success, 1 a check came out false, 2 usage or input errors,
//! 3 numerical failures.

mod commands;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use critgeom_core::experiments::{ExperimentConfig, SearchConfig};
use critgeom_core::surface::MonodromyConfig;
use critgeom_core::{Complex64, Error};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Roots,
    CriticalRadius,
    Sendov,
    Grr,
    Track,
    BranchLocus,
    BranchReport,
    Sheets,
    Monodromy,
    VerifyIdentity,
    Blowup,
    BoundaryCompare,
    SearchMaximal,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Overridable tolerances and step parameters, applied by name.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tolerances {
    pub experiment: ExperimentConfig,
    pub monodromy: MonodromyConfig,
    pub search: SearchConfig,
}

const TOL_NAMES: [&str; 17] = [
    "residual_tol",
    "start_tol",
    "step_floor",
    "initial_step",
    "max_step",
    "jump_bound",
    "branch_flag",
    "cluster_tol",
    "quadrature_tol",
    "singular_clearance",
    "clearance",
    "loop_fraction",
    "initial_sigma",
    "restart_sigma",
    "polish_initial",
    "polish_floor",
    "max_level",
];

impl Tolerances {
    fn set(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(CliError::Usage(format!("tolerance {name} must be positive and finite, got {value}")));
        }
        let track = &mut self.experiment.track;
        match name {
            "residual_tol" => track.residual_tol = value,
            "start_tol" => track.start_tol = value,
            "step_floor" => track.step_floor = value,
            "initial_step" => track.initial_step = value,
            "max_step" => track.max_step = value,
            "jump_bound" => track.jump_bound = value,
            "branch_flag" => track.branch_flag = value,
            "cluster_tol" => track.cluster_tol = value,
            "quadrature_tol" => self.experiment.quadrature_tol = value,
            "singular_clearance" => self.experiment.singular_clearance = value,
            "clearance" => self.monodromy.clearance = value,
            "loop_fraction" => self.monodromy.loop_fraction = value,
            "initial_sigma" => self.search.initial_sigma = value,
            "restart_sigma" => self.search.restart_sigma = value,
            "polish_initial" => self.search.polish_initial = value,
            "polish_floor" => self.search.polish_floor = value,
            "max_level" if value.fract() == 0.0 && value <= 30.0 => self.experiment.max_level = value as u32,
            "max_level" => return Err(CliError::Usage(format!("max_level must be an integer up to 30, got {value}"))),
            _ => {
                return Err(CliError::Usage(format!("unknown tolerance {name}; known: {}", TOL_NAMES.join(", "))))
            }
        }
        self.monodromy.track = self.experiment.track;
        Ok(())
    }
}

/// Validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub poly: Option<PathBuf>,
    pub q: Option<PathBuf>,
    pub path: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub at: Option<Complex64>,
    pub w0: Option<Complex64>,
    pub zeta: Option<Complex64>,
    pub r_list: Option<Vec<f64>>,
    pub seed: u64,
    pub count: Option<usize>,
    pub budget: Option<u64>,
    pub degree: Option<usize>,
    pub radius: Option<f64>,
    pub z1_index: Option<usize>,
    pub zeta_index: Option<usize>,
    pub unit_disk: bool,
    pub format: Format,
    pub tolerances: Tolerances,
}

#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` or `--version`; printed to standard output with exit 0.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => EXIT_OK,
            CliError::Usage(_) | CliError::Read { .. } | CliError::Parse { .. } | CliError::Write(_) => EXIT_USAGE,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

/// Input that the library rejects maps to 2; failures of the numerics to 3.
fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidPolynomial(_)
        | Error::DegreeTooLow { .. }
        | Error::NotAZero { .. }
        | Error::RootOutsideDisk { .. }
        | Error::DegenerateConfiguration(_)
        | Error::StartNotCritical { .. }
        | Error::LoopNotClosed(_)
        | Error::InsufficientClearance { .. }
        | Error::InvalidPath(_)
        | Error::Precondition(_) => EXIT_USAGE,
        Error::NonConvergence { .. }
        | Error::BranchPointSingularity { .. }
        | Error::PathNearBranchPoint { .. }
        | Error::CorrectorFailure { .. }
        | Error::SheetCollision { .. }
        | Error::ProjectionSingular { .. }
        | Error::SingularEvaluation(_)
        | Error::QuadratureNotConverged { .. } => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Clone, PartialEq)]
struct RList(Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
struct TolOverride(String, f64);

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Parser, Debug)]
#[command(name = "critgeom", version, about = "Critical points of complex polynomials")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Polynomial p as {"coeffs": [[re, im], ...]}, ascending degree.
    #[arg(long)]
    poly: Option<PathBuf>,
    /// Cofactor q, same format as --poly.
    #[arg(long)]
    q: Option<PathBuf>,
    /// Path as {"segments": [{"kind": "line", "a": [..], "b": [..]}, ...]}.
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Point RE,IM (evaluation point, path end or basepoint depending on the command).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    at: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    w0: Option<Complex64>,
    /// Starting critical point RE,IM for `track`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    zeta: Option<Complex64>,
    /// Radii a:b:steps, geometrically spaced from a to b.
    #[arg(long, value_parser = parse_r_list)]
    r_list: Option<RList>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    z1_index: Option<usize>,
    #[arg(long)]
    zeta_index: Option<usize>,
    /// Require the roots to lie in the closed unit disk (`sendov`).
    #[arg(long)]
    unit_disk: bool,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Override a tolerance, NAME=VALUE; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<TolOverride>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let z = Complex64::new(parse(re)?, parse(im)?);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite value {s:?}"));
    }
    Ok(z)
}

fn parse_r_list(s: &str) -> Result<RList, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, steps] = parts[..] else {
        return Err(format!("expected a:b:steps, got {s:?}"));
    };
    let a: f64 = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
    let steps: usize = steps.parse().map_err(|e| format!("{steps:?}: {e}"))?;
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b >= a) {
        return Err(format!("need 0 < a <= b, got {a}:{b}"));
    }
    match steps {
        0 => Err("steps must be at least 1".into()),
        1 if a == b => Ok(RList(vec![a])),
        1 => Err("a single step needs a = b".into()),
        _ => {
            let ratio = (b / a).ln() / (steps - 1) as f64;
            let mut rs: Vec<f64> = (0..steps).map(|k| a * (ratio * k as f64).exp()).collect();
            rs[0] = a;
            rs[steps - 1] = b;
            Ok(RList(rs))
        }
    }
}

fn parse_tol(s: &str) -> Result<TolOverride, String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let value: f64 = value.parse().map_err(|e| format!("{value:?}: {e}"))?;
    Ok(TolOverride(name.trim().to_string(), value))
}

/// Parses arguments (without the program name).
pub fn parse_args<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let full = std::iter::once(std::ffi::OsString::from("critgeom")).chain(argv.into_iter().map(Into::into));
    let args = Args::try_parse_from(full).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let mut tolerances = Tolerances::default();
    for TolOverride(name, value) in &args.tol {
        tolerances.set(name, *value)?;
    }
    if let Some(r) = args.radius {
        if !(r.is_finite() && r > 0.0) {
            return Err(CliError::Usage(format!("--radius must be positive, got {r}")));
        }
    }
    Ok(RunConfig {
        command: args.command,
        poly: args.poly,
        q: args.q,
        path: args.path,
        out: args.out,
        at: args.at,
        w0: args.w0,
        zeta: args.zeta,
        r_list: args.r_list.map(|r| r.0),
        seed: args.seed,
        count: args.count,
        budget: args.budget,
        degree: args.degree,
        radius: args.radius,
        z1_index: args.z1_index,
        zeta_index: args.zeta_index,
        unit_disk: args.unit_disk,
        format: if args.csv { Format::Csv } else { Format::Json },
        tolerances,
    })
}

/// Executes the command; machine output goes to `--out` or standard output,
/// messages to standard error. Returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    match commands::execute(config) {
        Ok(outcome) => {
            if let Some(msg) = outcome.message {
                eprintln!("{msg}");
            }
            if outcome.check_passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("critgeom: {e}");
            e.exit_code()
        }
    }
}

/// Parse and run; what `main` calls.
pub fn main_with_args<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cfg) => run(&cfg),
        Err(CliError::Info(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
