//! `imict`: command-line front end for tri-objective influence maximization.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data (missing or
//! malformed files, invalid configuration), 3 runtime failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "imict",
    version,
    about = "Influence maximization over spread, cost and propagation time"
)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed overriding the configuration's seeds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Output file or directory.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect or sample networks.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Train or inspect node embeddings.
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// One optimization run (needs --config).
    Solve,
    /// A repetition grid over networks and algorithms (needs --config or --replay).
    Bench(BenchArgs),
    /// Hypervolume of a front file.
    Hv(HvArgs),
    /// Emit built-in test networks.
    #[command(subcommand)]
    Fixture(FixtureCommand),
    /// Where to download the benchmark networks (nothing is fetched).
    Datasets,
}

#[derive(Subcommand, Debug)]
pub enum GraphCommand {
    /// Print size, degree and cost statistics.
    Info(GraphArgs),
    /// BFS-induced subgraph; writes JSON for a `.json` output, else an edge list.
    Sample {
        #[command(flatten)]
        graph: GraphArgs,
        /// Nodes to keep.
        #[arg(long)]
        nodes: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum EmbedCommand {
    /// Random walks plus skip-gram; walk settings come from the `[walk]` table of --config.
    Train(GraphArgs),
    /// Summarize an embedding file, optionally listing a node's nearest neighbours.
    Inspect {
        /// Embedding file.
        embedding: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        /// Original id of the node to query.
        #[arg(long)]
        node: Option<u64>,
        /// Neighbours to list.
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum FixtureCommand {
    /// The ten-node supermarket network, nodes A to J.
    #[command(visible_alias = "figure1")]
    Supermarket {
        /// Probability on every arc.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge list (`src dst` per line), or a graph JSON file ending in `.json`.
    pub input: PathBuf,
    /// Treat edge-list lines as directed arcs.
    #[arg(long)]
    pub directed: bool,
    /// `weighted-cascade` or `constant=<p>`.
    #[arg(long, default_value = "weighted-cascade", value_parser = config::parse_prob)]
    pub prob: imict_core::ProbabilityModel,
    /// `degree`, `unit` or `file=<path>`.
    #[arg(long, default_value = "degree", value_parser = config::parse_cost)]
    pub cost: imict_core::CostModel,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Re-run the grid recorded in a manifest and compare outputs byte for byte.
    #[arg(long, value_name = "MANIFEST")]
    pub replay: Option<PathBuf>,
    /// Recompute every run instead of reusing finished records.
    #[arg(long)]
    pub fresh: bool,
}

#[derive(Args, Debug)]
pub struct HvArgs {
    /// CSV with `influence,cost,time` columns (and optionally `generation`).
    pub front: PathBuf,
    /// Columns already hold normalized minimization coordinates in [0, 1].
    #[arg(long, conflicts_with = "manifest")]
    pub normalized: bool,
    /// Take normalization bounds from this experiment manifest.
    #[arg(long, requires = "network")]
    pub manifest: Option<PathBuf>,
    /// Network whose bounds to use.
    #[arg(long)]
    pub network: Option<String>,
    /// Generation to score; defaults to the last one in the file.
    #[arg(long)]
    pub generation: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", commands::describe(&e));
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
