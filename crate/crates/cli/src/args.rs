//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thetacut::report::Format;
use thetacut::{FamilyToggles, Problem};

#[derive(Debug, Parser)]
#[command(
    name = "thetacut",
    version,
    about = "Theta-based bounds on alpha(G) and chi(G) with cutting planes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Relative primal and dual infeasibility target.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub feastol: f64,

    /// Relative duality gap target.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub gaptol: f64,

    /// Violations must exceed this to be counted or added.
    #[arg(long, global = true, default_value_t = 0.025)]
    pub threshold: f64,

    /// At most cap-factor * n cuts per family per round.
    #[arg(long, global = true, default_value_t = 2)]
    pub cap_factor: usize,

    /// Cut rounds per phase.
    #[arg(long, global = true, default_value_t = 10)]
    pub max_iters: usize,

    /// Seed for random generators and clique-join sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Wall-clock budget per phase, in seconds.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format: json, csv or md.
    #[arg(long, global = true)]
    pub format: Option<Format>,

    /// Cut family groups: nonneg, tri, clique, c5, oddcycle or all.
    #[arg(long, global = true, default_value = "all")]
    pub families: FamilyToggles,

    /// Chordless cycle lengths for the odd-cycle families.
    #[arg(long, global = true, value_delimiter = ',', default_value = "5")]
    pub cycle_lengths: Vec<usize>,

    /// Use only maximal cliques as clique candidates.
    #[arg(long, global = true)]
    pub maximal_only: bool,

    /// Drop pooled cuts whose slack exceeds this after every solve.
    #[arg(long, global = true)]
    pub purge_slack: Option<f64>,

    /// Log verbosity; repeat for solver iterations.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph in DIMACS format.
    Generate(GraphArgs),
    /// Exact stability or chromatic number of a small graph.
    Exact(ExactArgs),
    /// Lovász theta for the stable set or coloring model.
    Theta(ProblemArgs),
    /// Theta, BOUND 1 and BOUND 2 with the full report.
    Bound(BoundArgs),
    /// Rerun published benchmark rows and compare.
    Reproduce(ReproduceArgs),
    /// Merge bound reports into one table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Torus,
    Queen,
    Mycielski,
    Cycle,
    NearRegular,
    ErdosRenyi,
}

/// A DIMACS file, or a generator family with its parameters.
#[derive(Debug, Args)]
pub struct GraphArgs {
    /// DIMACS file.
    #[arg(conflicts_with = "family")]
    pub file: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,

    /// Side length for torus and queen graphs.
    #[arg(long)]
    pub d: Option<usize>,

    /// Mycielskian levels above C5 (3 gives myciel5).
    #[arg(long)]
    pub levels: Option<usize>,

    /// Cycle length.
    #[arg(long)]
    pub length: Option<usize>,

    /// Vertex count for random families.
    #[arg(long)]
    pub n: Option<usize>,

    /// Target degree for near-regular graphs.
    #[arg(long)]
    pub r: Option<usize>,

    /// Edge probability for G(n, p).
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Stable,
    Coloring,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Stable => Problem::Stable,
            ProblemArg::Coloring => Problem::Coloring,
        }
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("which").required(true).args(["alpha", "chi"])))]
pub struct ExactArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[arg(long)]
    pub alpha: bool,

    #[arg(long)]
    pub chi: bool,

    /// Raise the alpha size guard (default 60, at most 256). The chi guard is fixed at 40.
    #[arg(long, value_name = "N")]
    pub max_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[arg(long, value_enum, default_value = "stable")]
    pub problem: ProblemArg,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub inner: ProblemArgs,

    /// Run through phase 2. This is the default; the flag makes scripts explicit.
    #[arg(long)]
    pub phase2: bool,

    /// Also compute the exact optimum (small graphs only).
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Table ids such as table3 or 6, or all.
    #[arg(default_value = "all")]
    pub tables: Vec<String>,

    /// Directory holding DIMACS files for rows that cannot be generated.
    #[arg(long)]
    pub instances_dir: Option<PathBuf>,

    /// Also run generated rows above desk scale.
    #[arg(long)]
    pub include_large: bool,

    /// Rows solved concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Bound report JSON files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}
