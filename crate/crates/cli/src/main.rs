//! `s3modes`: eigenmodes of the three-sphere from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "s3modes", version, about = "Laplacian eigenmodes on S3, their rotations and quotients")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    output: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate basis functions at points.
    Eval(EvalArgs),
    /// Change-of-basis matrix between B2 and B3.
    BasisMatrix(BasisMatrixArgs),
    /// Matrix of a rotation acting on V^k.
    Rotate(RotateArgs),
    /// Invariant subspace of V^k under a holonomy group.
    Invariants(InvariantsArgs),
    /// Dimension of the invariant subspace, for one level or a range.
    Multiplicity(MultiplicityArgs),
    /// Run the oracle checks and report residuals.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    B2,
    B3,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub basis: BasisArg,
    #[arg(long)]
    pub k: u32,
    /// B2 index m1 (integer or half-integer); all modes when omitted.
    #[arg(long, allow_hyphen_values = true, requires = "m2")]
    pub m1: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "m1")]
    pub m2: Option<f64>,
    /// B3 index I; all modes when omitted.
    #[arg(long = "i", requires = "j")]
    pub i: Option<u32>,
    #[arg(long = "j", requires = "i")]
    pub j: Option<u32>,
    /// Point as `chi,theta,phi` in radians; repeatable.
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    pub points: Vec<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Rows: scaled B2 functions; columns: B3 functions.
    TFromPhi,
    /// Rows: B3 functions; columns: scaled B2 functions.
    PhiFromT,
    /// Like t-from-phi for the unscaled B2 functions.
    TPlainFromPhi,
}

#[derive(Args, Debug)]
pub struct BasisMatrixArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = Direction::TFromPhi)]
    pub direction: Direction,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form, oracle only on degenerate rows.
    Closed,
    /// Least-squares fit on sample points.
    Oracle,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Frame {
    B3,
    B2,
}

#[derive(Args, Debug)]
pub struct RotateArgs {
    #[arg(long)]
    pub k: u32,
    /// Eight numbers `a0,a1,a2,a3,b0,b1,b2,b3`: left then right unit quaternion.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "space", required_unless_present = "space")]
    pub rotation: Option<String>,
    /// Use a generator of `lens:p,q` or `prism:P`.
    #[arg(long)]
    pub space: Option<String>,
    /// Which generator of the space (1-based).
    #[arg(long, default_value_t = 1, requires = "space")]
    pub generator: usize,
    /// Normalize the quaternions instead of requiring unit norm.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
    /// B2 conjugates the matrix to the scaled toroidal functions.
    #[arg(long, value_enum, default_value_t = Frame::B3)]
    pub frame: Frame,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "group_source")]
pub struct GroupSource {
    /// `lens:p,q` or `prism:P`.
    #[arg(long)]
    pub space: Option<String>,
    /// JSON file `{"generators": [{"q_left": [..], "q_right": [..]}]}`.
    #[arg(long)]
    pub group_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[arg(long)]
    pub k: u32,
    /// Relative singular-value cut for the projector rank.
    #[arg(long, default_value_t = s3modes::quotients::RANK_TOLERANCE)]
    pub rank_tol: f64,
}

#[derive(Args, Debug)]
pub struct MultiplicityArgs {
    #[command(flatten)]
    pub source: GroupSource,
    /// Single level.
    #[arg(long, conflicts_with = "k_max", required_unless_present = "k_max")]
    pub k: Option<u32>,
    /// Every level from 0 to this one.
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub k: u32,
    /// `all` or a comma-separated list of algebra, bases, quad, rotations, quotients.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Args, Debug)]
pub struct ToleranceArgs {
    #[arg(long)]
    pub tol_algebra: Option<f64>,
    #[arg(long)]
    pub tol_gram: Option<f64>,
    #[arg(long)]
    pub tol_transform: Option<f64>,
    #[arg(long)]
    pub tol_membership: Option<f64>,
    #[arg(long)]
    pub tol_coefficient: Option<f64>,
    #[arg(long)]
    pub tol_harmonic: Option<f64>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long)]
    pub tol_rotation: Option<f64>,
    #[arg(long)]
    pub tol_invariance: Option<f64>,
    #[arg(long)]
    pub rank_tol: Option<f64>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("S3MODES_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("S3MODES_THREADS must be a nonnegative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let report = match cli.command {
        Command::Eval(a) => commands::eval(&a)?,
        Command::BasisMatrix(a) => commands::basis_matrix(&a)?,
        Command::Rotate(a) => commands::rotate(&a)?,
        Command::Invariants(a) => commands::invariants(&a)?,
        Command::Multiplicity(a) => commands::multiplicity(&a)?,
        Command::Verify(a) => commands::verify(&a)?,
    };
    let text = report.render(cli.output)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if report.failed {
        return Err(CliError::Numerical("verification failed: residual above tolerance".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
