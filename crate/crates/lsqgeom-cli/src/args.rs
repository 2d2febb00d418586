use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

/// Penalized least-squares toolbox: proximal solver, LASSO path and
/// covariance test, degrees of freedom, and the Gaussian-geometry
/// estimators (widths, tubes, cones, EC densities, critical radii).
///
/// Every command writes a single JSON document with the fields
/// `command`, `config`, `library_version`, `results`, `warnings`.
/// Exit codes: 0 success, 2 invalid input, 3 budget exhausted before
/// convergence (document still written).
#[derive(Parser)]
#[command(name = "lsqgeom", version, max_term_width = 100)]
pub struct Cli {
    /// Write the result document to this file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Solve min 1/2 ||y - X b||^2 + lambda h(b) at a fixed lambda
    Solve(SolveArgs),
    /// Trace the LASSO solution path over all lambda
    Path(PathArgs),
    /// Covariance test at the k-th path knot
    Covtest(CovtestArgs),
    /// Degrees of freedom of a polyhedral-penalty fit, optionally with SURE
    Dof(DofArgs),
    /// Monte Carlo Gaussian width of a convex target
    Width(WidthArgs),
    /// Tube volume around a planar convex body, or a fit of its intrinsic volumes
    Tube(TubeArgs),
    /// Intrinsic-volume weights of a signed orthant cone
    Cone(ConeArgs),
    /// Euler-characteristic density rho_j(u)
    Ecdensity(EcdensityArgs),
    /// Critical radius of a covariance model over a grid
    Critradius(CritradiusArgs),
}

pub const PENALTY_HELP: &str = "Penalty descriptor: `l1` (unit box, dimension from X), `l1=DIM`, \
`box=R1,R2,...` (per-coordinate radii), `balls=LO-HI:R;LO-HI:R;...` (disjoint coordinate groups, \
one Euclidean radius each), or `cone=S,S,...` with S in {+,-,0} (orthant sign constraints)";

#[derive(Args, Serialize)]
pub struct SolveArgs {
    /// Design matrix CSV: n rows, p comma-separated columns, no header
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,
    /// Response CSV: single column, no header
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,
    #[arg(long, default_value = "l1", help = PENALTY_HELP)]
    pub penalty: String,
    /// Regularization weight, nonnegative
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Known noise standard deviation (recorded with the problem)
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Duality-gap stopping tolerance
    #[arg(long, value_name = "TOL")]
    pub tol_gap: Option<f64>,
    /// Iteration budget
    #[arg(long, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Plain proximal gradient instead of the accelerated variant
    #[arg(long)]
    pub plain: bool,
}

#[derive(Args, Serialize)]
pub struct PathArgs {
    /// Design matrix CSV: n rows, p comma-separated columns, no header
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,
    /// Response CSV: single column, no header
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,
    /// Knot budget for the homotopy
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    pub max_steps: usize,
}

#[derive(Args, Serialize)]
pub struct CovtestArgs {
    /// Design matrix CSV: n rows, p comma-separated columns, no header
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,
    /// Response CSV: single column, no header
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,
    /// Knot to test, 1-based
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Noise standard deviation under the null
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
}

#[derive(Args, Serialize)]
pub struct DofArgs {
    /// Design matrix CSV: n rows, p comma-separated columns, no header
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,
    /// Response CSV: single column, no header
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,
    #[arg(long, default_value = "l1", help = PENALTY_HELP)]
    pub penalty: String,
    /// Regularization weight, nonnegative
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Noise standard deviation; when given, the unbiased risk estimate is added
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct WidthArgs {
    /// Target set: `interval:LO,HI`, `penalty:DESC` (bounded penalty descriptor),
    /// `square`, `disk:R`, or `polygon:X,Y;X,Y;...`
    #[arg(long)]
    pub target: String,
    /// Monte Carlo sample count
    #[arg(long, value_name = "N")]
    pub mc_samples: u64,
    /// Root seed for the sample stream
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Serialize)]
pub struct TubeArgs {
    /// Planar body: `square`, `disk:R`, or `polygon:X,Y;X,Y;...`
    #[arg(long)]
    pub body: String,
    /// Estimate the volume of the tube at this single radius
    #[arg(long, conflicts_with = "fit_radii", allow_hyphen_values = true)]
    pub radius: Option<f64>,
    /// Comma-separated tube radii; fits the volume expansion in r and
    /// reports the intrinsic volumes
    #[arg(long, value_name = "R1,R2,...")]
    pub fit_radii: Option<String>,
    /// Monte Carlo sample count (per radius when fitting)
    #[arg(long, value_name = "N")]
    pub mc_samples: u64,
    /// Root seed for the sample stream
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Serialize)]
pub struct ConeArgs {
    /// Orthant sign pattern, e.g. `+,+,0`: + nonnegative, - nonpositive, 0 free
    #[arg(long)]
    pub signs: String,
    /// Also validate the tail P(||proj(g)|| > u) against the weight series
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// Monte Carlo sample count
    #[arg(long, value_name = "N")]
    pub mc_samples: u64,
    /// Root seed for the sample stream
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Serialize)]
pub struct EcdensityArgs {
    /// Density order, j >= 0
    #[arg(long)]
    pub j: usize,
    /// Excursion level
    #[arg(long, allow_hyphen_values = true)]
    pub u: f64,
}

#[derive(Args, Serialize)]
pub struct CritradiusArgs {
    /// Covariance model: `cosine` or `sqexp:LENGTH_SCALE`
    #[arg(long)]
    pub kernel: String,
    /// Evaluation grid `LO,HI,COUNT` (uniform, COUNT >= 2)
    #[arg(long, value_name = "LO,HI,COUNT")]
    pub grid: String,
    /// Minimum pair separation; defaults to twice the grid spacing
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
}
