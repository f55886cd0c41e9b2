use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use manifoldkit::interp::BasePolicy;
use manifoldkit::MetricTag;

use crate::config::{parse_base, SchemeKind};

const FORMATS: &str = "\
MATRIX FILES
  # manifold=<id> n=<rows> p=<cols>
  followed by <rows> lines of <cols> whitespace-separated reals.
  <id> is gl, on, spd, st, gr (points), tangent (tangent vectors) or matrix.
  Output numbers use 17 significant digits (e.g. 1.0000000000000001e-1),
  which reproduces every double exactly when read back. Blank lines and
  '#' lines after the header are ignored.

MANIFESTS
  One sample per line: 'mu_1 [mu_2 ...] <path>'. The parameter dimension is
  the number of columns before the path; relative paths are resolved against
  the manifest's directory. Blank lines and '#' lines are ignored.
  --mu-star takes comma-separated coordinates for multi-dimensional parameters.

REPORTS
  interp writes one 'key=value' line per item: status, method, mu_star,
  metric, samples and, depending on the method, scheme, weights, base_index,
  iterations, gradient_norm, objective, error.

CONFIGURATION
  --config or MANIFOLDKIT_CONFIG names a TOML file with any of
  membership_tol, round_trip_tol, karcher_tau, max_iter, stiefel_tau,
  stiefel_max_iter, metric, scheme, rbf_shape, rbf_normalize, base.
  Command-line flags take precedence. All tolerances must be positive.

EXIT CODES
  0 success, 2 parse/I-O/usage error, 3 domain error (input outside a
  manifold, logarithm undefined, ...), 4 an iteration did not converge.";

#[derive(Debug, Parser)]
#[command(
    name = "manifoldkit",
    version,
    about = "Exponentials, logarithms, distances, interpolation and extrapolation on matrix manifolds",
    after_long_help = FORMATS
)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "MANIFOLDKIT_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Riemannian metric (euclidean, canonical, natural, left_invariant);
    /// defaults to the manifold's own.
    #[arg(long, global = true)]
    pub metric: Option<MetricTag>,

    /// Skip the membership and tangency checks on input files.
    #[arg(long, global = true)]
    pub no_validate: bool,

    /// Membership tolerance for input points.
    #[arg(long, global = true, value_name = "TOL")]
    pub membership_tol: Option<f64>,

    /// Tolerance of the exp(log) check done by `log`.
    #[arg(long, global = true, value_name = "TOL")]
    pub round_trip_tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Riemannian exponential Exp_base(tangent).
    Exp {
        base: PathBuf,
        tangent: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Riemannian logarithm Log_base(target), checked by mapping it back.
    Log {
        base: PathBuf,
        target: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Riemannian distance, printed to standard output.
    Dist { a: PathBuf, b: PathBuf },
    /// Interpolate manifold-valued samples at new parameters.
    Interp(InterpArgs),
    /// Extrapolate along a geodesic or a POD basis.
    Extrapolate(ExtrapolateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Weighted combination in normal coordinates at a base sample.
    Tangent,
    /// Piecewise geodesic between neighbouring samples (1-d parameters).
    Geodesic,
    /// Weighted Riemannian center of mass.
    Karcher,
}

impl Method {
    pub fn id(self) -> &'static str {
        match self {
            Method::Tangent => "tangent",
            Method::Geodesic => "geodesic",
            Method::Karcher => "karcher",
        }
    }
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    /// Sample manifest.
    pub manifest: PathBuf,

    /// Target parameter; repeat for several targets.
    #[arg(long = "mu-star", required = true, allow_negative_numbers = true, value_name = "MU")]
    pub mu_star: Vec<String>,

    #[arg(long, value_enum, default_value_t = Method::Tangent)]
    pub method: Method,

    /// Weight scheme: linear, lagrange, rbf-gaussian, rbf-thin-plate.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<SchemeKind>,

    /// RBF shape parameter.
    #[arg(long)]
    pub shape: Option<f64>,

    /// Rescale RBF weights to sum to one.
    #[arg(long)]
    pub normalize: bool,

    /// Base sample of the tangent method: first, medoid or an index.
    #[arg(long, value_parser = parse_base)]
    pub base: Option<BasePolicy>,

    /// Karcher stopping tolerance on the gradient norm.
    #[arg(long)]
    pub tau: Option<f64>,

    /// Karcher iteration limit.
    #[arg(long)]
    pub max_iter: Option<usize>,

    /// Output file. With several --mu-star values it must contain `{}`,
    /// replaced by the target's position in the list.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Report file, same `{}` rule; defaults to the output path + ".report".
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Evaluate up to N targets in parallel.
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub jobs: usize,
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse()
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["base", "snapshot"])))]
pub struct ExtrapolateArgs {
    /// Point at mu = 0 (geodesic mode, with --tangent).
    #[arg(long, requires = "tangent", conflicts_with_all = ["snapshot", "derivative", "rank"])]
    pub base: Option<PathBuf>,

    /// Velocity at mu = 0 (geodesic mode).
    #[arg(long, requires = "base")]
    pub tangent: Option<PathBuf>,

    /// Snapshot matrix S(0) (POD mode, with --derivative and --rank).
    #[arg(long, requires_all = ["derivative", "rank"])]
    pub snapshot: Option<PathBuf>,

    /// Snapshot derivative dS/dmu at 0 (POD mode).
    #[arg(long, requires = "snapshot")]
    pub derivative: Option<PathBuf>,

    /// Number of POD modes.
    #[arg(long, requires = "snapshot")]
    pub rank: Option<usize>,

    #[arg(long = "mu-star", allow_negative_numbers = true, value_name = "MU")]
    pub mu_star: f64,

    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
