//! `qwalk` command-line driver.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 invalid input or flag
//! combination, 4 numerical failure, 5 I/O failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Classical and quantum walks on networks")]
struct Cli {
    /// Worker threads for ensemble replicates (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph.
    Gen(GenArgs),
    /// Monte Carlo reweighting of a graph toward a target quantumness.
    Randomize(RandomizeArgs),
    /// Long-time classical and quantum distributions of a walk.
    Walk(WalkArgs),
    /// Quantumness with both evaluation routes and its bounds.
    Quantumness(QuantumnessArgs),
    /// Hierarchical community detection.
    Communities(CommunitiesArgs),
    /// Normalized mutual information between two partitions.
    Nmi(NmiArgs),
    /// Mean NMI against the zero-phase partition under random phases.
    Perturb(PerturbArgs),
    /// Quantumness against mean degree over a model ensemble.
    Sweep(SweepArgs),
}

/// Where the graph or Hamiltonian comes from. Exactly one must be given.
#[derive(Args, Serialize, Clone)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Graph file: JSON, or an edge list for any other extension.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Hamiltonian JSON file.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Bundled fixture: karate, two-triangles, toy-disconnected,
    /// toy-coherent, toy-canceling, toy-random.
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Args, Serialize, Clone)]
pub struct OutArgs {
    /// Output file; stdout when omitted. A `.manifest.json` sidecar is
    /// written next to it.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Ba,
    Er,
    Ws,
    Rg,
    Planted,
}

#[derive(Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Node count (ignored for planted).
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Edge count for er, ws and rg.
    #[arg(long, default_value_t = 1500)]
    pub m: usize,
    /// Edges per new node for ba.
    #[arg(long, default_value_t = 3)]
    pub m_attach: usize,
    /// Ring-lattice half-width for ws.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Community sizes for planted.
    #[arg(long, value_delimiter = ',', default_value = "15,15,15,15")]
    pub sizes: Vec<usize>,
    /// Intra-community edge probability for planted.
    #[arg(long)]
    pub p_intra: Option<f64>,
    /// Inter-community edge probability for planted.
    #[arg(long)]
    pub p_inter: Option<f64>,
    #[arg(long, env = "QWALK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Also write the planted partition here.
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize)]
pub struct RandomizeArgs {
    #[command(flatten)]
    pub input: Input,
    /// Target quantumness in (0, 1).
    #[arg(long)]
    pub target: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    #[arg(long, env = "QWALK_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize)]
pub struct WalkArgs {
    #[command(flatten)]
    pub input: Input,
    /// uniform, node:i, or a density-matrix JSON file.
    #[arg(long, default_value = "uniform")]
    pub initial: String,
    /// Also report the distribution averaged over [0, t]; `inf` allowed.
    #[arg(long)]
    pub t: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize)]
pub struct QuantumnessArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize)]
pub struct CommunitiesArgs {
    #[command(flatten)]
    pub input: Input,
    /// transport-short, transport-inf, transport-t=T, fidelity-inf,
    /// fidelity-t=T, purity-inf, purity-t=T.
    #[arg(long, default_value = "transport-inf")]
    pub closeness: String,
    /// Initial phases for fidelity: zero, or random:SAMPLES.
    #[arg(long, default_value = "zero")]
    pub phases: String,
    /// modularity, or k=K for the level with K communities.
    #[arg(long, default_value = "modularity")]
    pub select: String,
    /// Relative random perturbation of closeness values to break ties.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, env = "QWALK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Also write the dendrogram here.
    #[arg(long)]
    pub dendrogram: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize)]
pub struct NmiArgs {
    /// Partition JSON files.
    pub first: PathBuf,
    pub second: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Serialize)]
pub struct PerturbArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value = "fidelity-inf")]
    pub closeness: String,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2")]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, env = "QWALK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    DegreeMoments,
    GiantComponent,
}

#[derive(Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "er")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,12,16")]
    pub degrees: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[arg(long, value_enum, default_value = "degree-moments")]
    pub estimator: EstimatorArg,
    #[arg(long, env = "QWALK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Emit the rows as CSV instead of rows plus fit as JSON.
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<qwalk::Error>() {
            return if matches!(e, qwalk::Error::Io(_)) {
                5
            } else if e.is_parse() {
                2
            } else if e.is_numerical() {
                4
            } else {
                3
            };
        }
        if cause.is::<std::io::Error>() {
            return 5;
        }
        if cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Randomize(a) => commands::randomize(a),
        Command::Walk(a) => commands::walk(a),
        Command::Quantumness(a) => commands::quantumness(a),
        Command::Communities(a) => commands::communities(a),
        Command::Nmi(a) => commands::nmi_cmd(a),
        Command::Perturb(a) => commands::perturb(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
