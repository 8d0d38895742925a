use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "nlcone", version, about = "Apertures and stability of nonlocal Lawson cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Report surface integrals at the unit point instead of table values.
    #[arg(long, global = true)]
    pub raw: bool,

    /// Absolute tolerance of the radial quadratures; angular ones are kept
    /// two decades tighter.
    #[arg(long, env = "NLCONE_QUAD_ABS_TOL", global = true)]
    pub quad_abs_tol: Option<f64>,

    /// Relative tolerance of the radial quadratures.
    #[arg(long, env = "NLCONE_QUAD_REL_TOL", global = true)]
    pub quad_rel_tol: Option<f64>,

    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    pub samples: usize,

    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aperture α(s, m, n) making the cone nonlocal minimal (s = 0 gives α₀).
    Alpha(Dims),
    /// Limiting aperture α₀(m, n) as s → 0.
    Alpha0 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Bisection tolerance on α.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Hardy constant, A₀² and the stability verdict.
    Stability(Point),
    /// The s = 0 table over 2 ≤ m ≤ 7, 1 ≤ n ≤ m.
    Table1,
    /// Stability along a grid of s values.
    Scan(ScanArgs),
    /// Compare a Monte Carlo estimate with the quadrature value.
    McCheck(McArgs),
    /// Evaluate the homogeneity identity for |x|^{−β} by two routes.
    JacobiProbe(ProbeArgs),
    /// Closed forms, cross-route identities and oracle agreement.
    SelfCheck,
}

#[derive(Debug, Args)]
pub struct Dims {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Bisection tolerance on α.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Point {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Use this aperture instead of solving for it.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s_from: f64,
    #[arg(long)]
    pub s_to: f64,
    #[arg(long, default_value_t = 4)]
    pub steps: usize,
    /// Bisect the first sign change of H − A₀² on the grid.
    #[arg(long)]
    pub bracket_threshold: bool,
    /// Width of the threshold bracket in s.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Mean curvature at the unit point.
    Curvature,
    /// C(m,n,s,β) (default β: the Hardy midpoint).
    Hardy,
    /// A₀².
    Alignment,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: f64,
    /// Aperture (default: the minimal one).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = Quantity::Curvature)]
    pub quantity: Quantity,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Aperture (default: the minimal one).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Exponent (default: the Hardy midpoint (N−2−s)/2).
    #[arg(long)]
    pub beta: Option<f64>,
}
