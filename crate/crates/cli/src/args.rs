use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use asch::selection::{Direction, Objective};

/// Stooge selection experiments on Friedkin–Johnsen opinion dynamics.
#[derive(Debug, Parser)]
#[command(name = "asch", version, args_override_self = true)]
pub struct Cli {
    /// Read default flag values from a `key = value` file; keys are long
    /// flag names without dashes. Flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Default directory for output files.
    #[arg(long, global = true, env = "ASCH_OUT_DIR", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic instance (edge list, opinions, instance JSON).
    Generate(GenerateArgs),
    /// Compute the equilibrium of an instance and print its metrics.
    Equilibrium(EquilibriumArgs),
    /// Run one selection algorithm and append one CSV row per stooge.
    Select(SelectArgs),
    /// Run algorithms x objectives x directions x seeds and append all rows.
    Sweep(SweepArgs),
    /// Stooge set overlap and cross-objective loss.
    Compare(CompareArgs),
    /// Check the counterexamples to submodularity and supermodularity.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Gnp,
    Communities,
    Tree,
    Star,
    Grid,
    Lollipop,
    Nonsubmod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    ClippedNormal,
    Uniform,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Unit,
    ZeroTen,
}

/// Where the instance comes from: a saved instance, a dataset, or a generator.
#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance JSON written by `generate`.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["edges", "model"])]
    pub instance: Option<PathBuf>,

    /// Edge list (`n m` header, then `u v` lines).
    #[arg(long, value_name = "FILE", requires = "opinions", conflicts_with = "model")]
    pub edges: Option<PathBuf>,
    /// One opinion per line, aligned with node ids.
    #[arg(long, value_name = "FILE", requires = "edges")]
    pub opinions: Option<PathBuf>,
    /// One tweet count per line; resistances are drawn from count bands.
    #[arg(long, value_name = "FILE", requires = "edges")]
    pub tweets: Option<PathBuf>,
    /// Scale of the opinion file.
    #[arg(long, value_enum, default_value = "unit")]
    pub scale: Scale,

    /// Synthetic graph model.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Node count for gnp and tree.
    #[arg(long, default_value_t = 150)]
    pub n: usize,
    /// Edge probability for gnp.
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Leaves of the star.
    #[arg(long, default_value_t = 150)]
    pub leaves: usize,
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    #[arg(long, default_value_t = 10)]
    pub cols: usize,
    /// Clique size of the lollipop.
    #[arg(long, default_value_t = 20)]
    pub clique: usize,
    /// Path length of the lollipop.
    #[arg(long, default_value_t = 30)]
    pub path: usize,
    /// Size of each block of the non-submodular fixture.
    #[arg(long, default_value_t = 1000)]
    pub size: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Innate opinion distribution for synthetic graphs.
    #[arg(long, value_enum, default_value = "clipped-normal")]
    pub dist: Dist,
    /// Resistance of every node (without tweet counts).
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix; `.edges`, `.opinions` and `.json` are appended.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Solve,
    Iterate,
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct EquilibriumArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "solve")]
    pub method: Method,
    /// Tolerance of the iterative method.
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = asch::dynamics::DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
    /// Walks per node for monte-carlo.
    #[arg(long, default_value_t = 100_000)]
    pub walks: usize,
    /// Nodes to estimate with monte-carlo (repeatable).
    #[arg(long = "node", value_name = "NODE")]
    pub nodes: Vec<usize>,
    /// Write the equilibrium opinions, one per line.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Greedy,
    Random,
    Maxdegree,
    Centrality,
    Brute,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Greedy => "greedy",
            Algo::Random => "random",
            Algo::Maxdegree => "maxdegree",
            Algo::Centrality => "centrality",
            Algo::Brute => "brute",
        }
    }
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e: asch::Error| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: asch::Error| e.to_string())
}

/// Selection parameters shared by `select`, `sweep` and `compare`.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Number of stooges.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Convergence tolerance of the incremental equilibrium updates.
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    /// Lazy-evaluation slack; `inf` recomputes every gain.
    #[arg(long, default_value_t = 1.1)]
    pub phi: f64,
    /// Use exact solves instead of incremental updates for every gain.
    #[arg(long)]
    pub exact: bool,
    /// Smallest improvement worth a stooge; smaller gains stop selection.
    #[arg(long, default_value_t = asch::selection::DEFAULT_MIN_GAIN)]
    pub min_gain: f64,
    /// Evaluation budget of brute force.
    #[arg(long, default_value_t = asch::selection::DEFAULT_BRUTE_FORCE_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "greedy")]
    pub algo: Algo,
    #[arg(long, value_parser = parse_objective, default_value = "mse")]
    pub objective: Objective,
    #[arg(long, value_parser = parse_direction, default_value = "max")]
    pub direction: Direction,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Results CSV to append to; defaults to `results.csv` in the output directory.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "greedy,random,maxdegree,centrality")]
    pub algos: Vec<Algo>,
    #[arg(long, value_parser = parse_objective, value_delimiter = ',', default_value = "mse")]
    pub objectives: Vec<Objective>,
    #[arg(long, value_parser = parse_direction, value_delimiter = ',', default_value = "max")]
    pub directions: Vec<Direction>,
    /// Seeds; each seed regenerates a synthetic instance.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub seeds: Vec<u64>,
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_parser = parse_direction, value_delimiter = ',', default_value = "max,min")]
    pub directions: Vec<Direction>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub seeds: Vec<u64>,
    /// Compare two recorded runs of this results CSV instead.
    #[arg(long, value_name = "FILE", requires_all = ["run_a", "run_b"])]
    pub results: Option<PathBuf>,
    #[arg(long, value_name = "RUN_ID")]
    pub run_a: Option<String>,
    #[arg(long, value_name = "RUN_ID")]
    pub run_b: Option<String>,
    /// Write the comparison table as CSV.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Block size of the non-submodular fixture.
    #[arg(long, default_value_t = 1000)]
    pub size: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 20)]
    pub clique: usize,
    #[arg(long, default_value_t = 30)]
    pub path: usize,
    /// Allowed deviation of the non-submodular gains from their limits.
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
}
