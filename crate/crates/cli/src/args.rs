use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Continuous-time quantum walks via spectral distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph as an edge list.
    Gen(GenArgs),
    /// Distance partition from the start vertex.
    Stratify(ReportArgs),
    /// Jacobi coefficients and orthonormal basis from the start vertex.
    Lanczos(ReportArgs),
    /// Spectral measure (atoms and Gauss weights) at the start vertex.
    Measure(ReportArgs),
    /// Stratum and vertex amplitudes on a time grid.
    Walk(WalkArgs),
    /// Compare vertex amplitudes against dense exact evolution.
    Verify(VerifyArgs),
    /// Certify the graph as QD, GQD or neither from the start vertex.
    Gqd(GqdArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Path,
    Kite,
    #[value(name = "tree-fig4")]
    TreeFig4,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct GenParams {
    /// Vertex count (path, random) or number of levels (kite).
    #[arg(long)]
    pub n: Option<usize>,
    /// Kite dimension.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Edge probability of the random graph.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    /// Seed of the random graph.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    pub kind: GenKind,
    #[command(flatten)]
    pub params: GenParams,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct SourceArgs {
    /// Edge-list file.
    #[arg(long, group = "source")]
    pub graph: Option<PathBuf>,
    /// Generator name.
    #[arg(long = "gen", value_name = "NAME", group = "source")]
    pub generator: Option<GenKind>,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub params: GenParams,
    #[arg(long, default_value_t = 0)]
    pub start: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TimeArgs {
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// Number of grid points on [0, t_max].
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Evolve under A / time_scale.
    #[arg(long, default_value_t = 1.0)]
    pub time_scale: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Tolerance for the GQD certificate in the metadata.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Largest accepted componentwise deviation.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GqdArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Relative support tolerance for the certificate.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}
