//! Repetition grids: every algorithm runs on every network once per
//! repetition, then results are compared under shared normalization bounds.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! manifest.json                      replayable description of the whole grid
//! summary.csv                        mean and std of HV per network and algorithm
//! wilcoxon.csv                       EVEA against each baseline, paired by repetition
//! traces.csv                         HV per generation of every run
//! embeddings/<network>.emb           the embedding shared by all runs on a network
//! runs/<network>/<algo>/rep-<r>.json complete run record, written atomically
//! fronts/<network>/<algo>/rep-<r>.csv front-0 of every generation
//! ```
//!
//! Every CSV starts with a `#` line naming the config hash and the seeds that
//! produced it. Completed run records are reused on restart when they match
//! the expected configuration, so an interrupted grid resumes where it stopped.
//! Each cell derives its own random streams from `master_seed`, and the output
//! does not depend on the number of worker threads.

mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embedding::{self, EmbeddingTable, WalkConfig};
use crate::error::{Error, Result};
use crate::evolution::{self, AlgoConfig, RunResult, Variant};
use crate::graph::{self, CostModel, Graph, ProbabilityModel};
use crate::metrics::{
    convergence_trace, generations_to_fraction, wilcoxon_signed_rank, NormalizationBounds,
    WilcoxonResult,
};
use crate::objectives::EvalConfig;
use crate::rng::derive_path;

pub use output::{front_csv, read_front_csv, FrontRow};

/// Significance level for the EVEA-vs-baseline comparisons.
pub const SIGNIFICANCE: f64 = 0.05;

/// Public sources for the benchmark networks. Nothing is downloaded
/// automatically; fetch these by hand and point an `edge_list` source at the
/// extracted file.
pub const KNOWN_DATASETS: [(&str, &str); 2] = [
    ("ca-GrQc", "https://snap.stanford.edu/data/ca-GrQc.txt.gz"),
    (
        "facebook",
        "https://snap.stanford.edu/data/facebook_combined.txt.gz",
    ),
];

const SEED_ALGO: u64 = 1;
const SEED_EVAL: u64 = 2;
const SEED_WALK: u64 = 3;

/// Where a network comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkSource {
    /// Whitespace-separated `src dst` lines.
    EdgeList {
        path: PathBuf,
        #[serde(default)]
        directed: bool,
    },
    /// A graph saved with [`graph::write_json`]; its own models apply.
    GraphJson { path: PathBuf },
    /// Holme-Kim powerlaw-cluster graph (undirected).
    PowerlawCluster {
        nodes: usize,
        edges_per_node: usize,
        triangle_prob: f64,
        seed: u64,
    },
    /// The ten-node supermarket example with uniform arc probability `p`.
    Supermarket { p: f64 },
}

/// BFS-induced subgraph taken after loading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphSpec {
    pub nodes: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    /// Used as a directory name: ASCII letters, digits, `-`, `_` and `.`.
    pub name: String,
    pub source: NetworkSource,
    #[serde(default)]
    pub prob_model: ProbabilityModel,
    #[serde(default)]
    pub cost_model: CostModel,
    #[serde(default)]
    pub subgraph: Option<SubgraphSpec>,
}

impl NetworkSpec {
    /// Loads (or generates) the graph, then samples the subgraph if requested.
    pub fn load(&self) -> Result<Graph> {
        let g = match &self.source {
            NetworkSource::EdgeList { path, directed } => {
                graph::load_edge_list(
                    path,
                    *directed,
                    self.prob_model.clone(),
                    self.cost_model.clone(),
                )?
                .0
            }
            NetworkSource::GraphJson { path } => graph::read_json(path)?,
            NetworkSource::PowerlawCluster {
                nodes,
                edges_per_node,
                triangle_prob,
                seed,
            } => graph::powerlaw_cluster(
                *nodes,
                *edges_per_node,
                *triangle_prob,
                *seed,
                self.prob_model.clone(),
                self.cost_model.clone(),
            )?,
            NetworkSource::Supermarket { p } => graph::supermarket(*p)?,
        };
        match self.subgraph {
            Some(sub) => graph::induced_subgraph(&g, sub.nodes, sub.seed),
            None => Ok(g),
        }
    }

    fn input_files(&self) -> Vec<&Path> {
        let mut files = Vec::new();
        match &self.source {
            NetworkSource::EdgeList { path, .. } | NetworkSource::GraphJson { path } => {
                files.push(path.as_path())
            }
            _ => {}
        }
        if let CostModel::File { path } = &self.cost_model {
            files.push(path.as_path());
        }
        files
    }
}

fn default_repetitions() -> usize {
    10
}

fn default_algorithms() -> Vec<AlgoConfig> {
    Variant::ALL
        .iter()
        .map(|&variant| AlgoConfig {
            variant,
            ..AlgoConfig::default()
        })
        .collect()
}

/// A full grid: networks × algorithms × repetitions.
///
/// Each algorithm's `rng_seed`, the evaluation `base_seed` and the walk
/// `rng_seed` are ignored: they are derived from `master_seed`, per network
/// and repetition, and shared by all algorithms of the same repetition so
/// that results pair up for the signed-rank test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub networks: Vec<NetworkSpec>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<AlgoConfig>,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub walk: WalkConfig,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// Checks everything that can be checked without loading data.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.networks.is_empty() {
            return bad("no networks given".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms given".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for net in &self.networks {
            let valid = !net.name.is_empty()
                && net.name != "."
                && net.name != ".."
                && net
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
            if !valid {
                return bad(format!(
                    "network name {:?} must use only letters, digits, '-', '_' and '.'",
                    net.name
                ));
            }
            if !names.insert(net.name.as_str()) {
                return bad(format!("duplicate network name {:?}", net.name));
            }
        }
        let mut variants = std::collections::BTreeSet::new();
        for cfg in &self.algorithms {
            if !variants.insert(cfg.variant) {
                return bad(format!("algorithm {} listed twice", cfg.variant));
            }
            cfg.validate()?;
        }
        self.eval.validate()?;
        if self.needs_embedding() {
            self.walk.validate()?;
        }
        Ok(())
    }

    fn needs_embedding(&self) -> bool {
        self.algorithms.iter().any(|a| a.variant.needs_embedding())
    }

    /// Hex digest of everything that determines results (`output_dir` excluded).
    pub fn config_hash(&self) -> String {
        let canonical = ExperimentSpec {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        let bytes = serde_json::to_vec(&canonical).expect("spec serializes");
        Sha256::digest(&bytes)[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Algorithm seed and evaluation base seed of one repetition on one network.
    pub fn cell_seeds(&self, network: usize, repetition: usize) -> (u64, u64) {
        let path = |stream| {
            derive_path(
                self.master_seed,
                &[stream, network as u64, repetition as u64],
            )
        };
        (path(SEED_ALGO), path(SEED_EVAL))
    }

    /// Walk configuration actually used for one network.
    pub fn walk_for(&self, network: usize) -> WalkConfig {
        WalkConfig {
            rng_seed: derive_path(self.master_seed, &[SEED_WALK, network as u64]),
            ..self.walk.clone()
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub threads: Option<usize>,
    /// Reuse matching run records already in `output_dir`.
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: None,
            resume: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub variant: Variant,
    /// Final-front HV per repetition under the network's shared bounds.
    pub hv: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    /// First generation reaching 90% of the run's final HV, per repetition.
    pub g90: Vec<Option<usize>>,
    pub median_g90: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: Variant,
    pub test: WilcoxonResult,
    pub evea_mean: f64,
    pub baseline_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub name: String,
    pub nodes: usize,
    pub arcs: usize,
    pub graph_fingerprint: String,
    pub embedding_fingerprint: Option<String>,
    pub bounds: NormalizationBounds,
    pub algorithms: Vec<AlgorithmSummary>,
    pub comparisons: Vec<Comparison>,
    /// Baselines with no test, and why (too few non-zero differences, ...).
    pub skipped_comparisons: Vec<(Variant, String)>,
}

impl NetworkReport {
    pub fn summary(&self, variant: Variant) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.variant == variant)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub config_hash: String,
    pub networks: Vec<NetworkReport>,
    pub runs_executed: usize,
    pub runs_reused: usize,
    pub manifest: PathBuf,
}

/// Replayable record of a finished grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: String,
    pub config_hash: String,
    pub spec: ExperimentSpec,
    pub networks: Vec<ManifestNetwork>,
    pub runs: Vec<ManifestRun>,
    /// SHA-256 of every CSV output, keyed by path relative to `output_dir`.
    pub outputs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestNetwork {
    pub name: String,
    pub graph_fingerprint: String,
    pub embedding_fingerprint: Option<String>,
    pub bounds: NormalizationBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRun {
    pub network: String,
    pub variant: Variant,
    pub repetition: usize,
    pub rng_seed: u64,
    pub eval_base_seed: u64,
    pub record: String,
    pub front: String,
}

const MANIFEST_FORMAT: &str = "imict-manifest";

struct Prepared {
    graph: Graph,
    embedding: Option<EmbeddingTable>,
}

struct Cell {
    network: usize,
    algorithm: usize,
    repetition: usize,
}

/// Runs the whole grid and writes all reports.
pub fn run_experiment(spec: &ExperimentSpec, opts: RunOptions) -> Result<ExperimentReport> {
    match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?
            .install(|| run_in_pool(spec, opts)),
        None => run_in_pool(spec, opts),
    }
}

fn run_in_pool(spec: &ExperimentSpec, opts: RunOptions) -> Result<ExperimentReport> {
    spec.validate()?;
    for net in &spec.networks {
        for file in net.input_files() {
            if !file.is_file() {
                return Err(Error::io(
                    file,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "dataset file not found"),
                ));
            }
        }
    }
    output::check_writable(&spec.output_dir)?;
    let graphs = spec
        .networks
        .iter()
        .map(NetworkSpec::load)
        .collect::<Result<Vec<_>>>()?;
    for (net, g) in spec.networks.iter().zip(&graphs) {
        for cfg in &spec.algorithms {
            cfg.validate_graph(g)
                .map_err(|e| Error::Config(format!("network {:?}: {e}", net.name)))?;
        }
    }

    let config_hash = spec.config_hash();
    let mut prepared = Vec::with_capacity(graphs.len());
    for (i, graph) in graphs.into_iter().enumerate() {
        let embedding = if spec.needs_embedding() {
            let table = embedding::train(&graph, &spec.walk_for(i))?;
            let path = spec
                .output_dir
                .join("embeddings")
                .join(format!("{}.emb", spec.networks[i].name));
            output::ensure_parent(&path)?;
            embedding::save_embeddings(&table, &graph, &path)?;
            Some(table)
        } else {
            None
        };
        prepared.push(Prepared { graph, embedding });
    }

    let cells: Vec<Cell> = (0..spec.networks.len())
        .flat_map(|network| {
            (0..spec.algorithms.len()).flat_map(move |algorithm| {
                (0..spec.repetitions).map(move |repetition| Cell {
                    network,
                    algorithm,
                    repetition,
                })
            })
        })
        .collect();

    let outcomes: Vec<(RunResult, bool)> = cells
        .par_iter()
        .map(|cell| run_cell(spec, &prepared, cell, opts.resume))
        .collect::<Result<_>>()?;
    let runs_reused = outcomes.iter().filter(|(_, reused)| *reused).count();
    let runs: Vec<RunResult> = outcomes.into_iter().map(|(r, _)| r).collect();

    let mut reports = Vec::new();
    let mut outputs = BTreeMap::new();
    let mut manifest_runs = Vec::new();
    let mut trace_rows = Vec::new();
    let per_network = spec.algorithms.len() * spec.repetitions;
    for (ni, net) in spec.networks.iter().enumerate() {
        let net_runs = &runs[ni * per_network..(ni + 1) * per_network];
        let bounds = NormalizationBounds::from_points(
            net_runs.iter().flat_map(|r| r.final_front().front.iter()),
        )
        .ok_or_else(|| {
            Error::InvalidArgument(format!("network {:?} produced no fronts", net.name))
        })?;

        let mut algorithms = Vec::new();
        for (ai, cfg) in spec.algorithms.iter().enumerate() {
            let mut hv = Vec::new();
            let mut g90 = Vec::new();
            for rep in 0..spec.repetitions {
                let run = &net_runs[ai * spec.repetitions + rep];
                let trace = convergence_trace(run, &bounds);
                hv.push(trace.last().map_or(0.0, |t| t.1));
                g90.push(generations_to_fraction(&trace, 0.9));

                let front_rel = output::cell_path("fronts", &net.name, cfg.variant, rep, "csv");
                let origin = format!(
                    "config_hash={config_hash} network={} algorithm={} repetition={rep} rng_seed={} eval_seed={}",
                    net.name, cfg.variant, run.provenance.rng_seed, run.provenance.eval_base_seed
                );
                let text = output::front_csv(&origin, run, &trace);
                output::write_atomic(&spec.output_dir.join(&front_rel), text.as_bytes())?;
                outputs.insert(front_rel.clone(), output::sha256_hex(text.as_bytes()));
                for (generation, value) in &trace {
                    trace_rows.push((net.name.clone(), cfg.variant, rep, *generation, *value));
                }
                manifest_runs.push(ManifestRun {
                    network: net.name.clone(),
                    variant: cfg.variant,
                    repetition: rep,
                    rng_seed: run.provenance.rng_seed,
                    eval_base_seed: run.provenance.eval_base_seed,
                    record: output::cell_path("runs", &net.name, cfg.variant, rep, "json"),
                    front: front_rel,
                });
            }
            let (mean, std) = mean_std(&hv);
            algorithms.push(AlgorithmSummary {
                variant: cfg.variant,
                median_g90: median(g90.iter().flatten().map(|&g| g as f64).collect()),
                hv,
                mean,
                std,
                g90,
            });
        }

        let (comparisons, skipped_comparisons) = compare_to_evea(&algorithms);
        let p = &prepared[ni];
        reports.push(NetworkReport {
            name: net.name.clone(),
            nodes: p.graph.node_count(),
            arcs: p.graph.arc_count(),
            graph_fingerprint: p.graph.fingerprint(),
            embedding_fingerprint: p.embedding.as_ref().map(EmbeddingTable::fingerprint),
            bounds,
            algorithms,
            comparisons,
            skipped_comparisons,
        });
    }

    for (name, text) in [
        (
            "summary.csv",
            output::summary_csv(&config_hash, spec.master_seed, &reports),
        ),
        (
            "wilcoxon.csv",
            output::wilcoxon_csv(&config_hash, spec.master_seed, &reports),
        ),
        (
            "traces.csv",
            output::traces_csv(&config_hash, spec.master_seed, &trace_rows),
        ),
    ] {
        output::write_atomic(&spec.output_dir.join(name), text.as_bytes())?;
        outputs.insert(name.to_string(), output::sha256_hex(text.as_bytes()));
    }

    let manifest = Manifest {
        format: MANIFEST_FORMAT.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash.clone(),
        spec: spec.clone(),
        networks: reports
            .iter()
            .map(|r| ManifestNetwork {
                name: r.name.clone(),
                graph_fingerprint: r.graph_fingerprint.clone(),
                embedding_fingerprint: r.embedding_fingerprint.clone(),
                bounds: r.bounds,
            })
            .collect(),
        runs: manifest_runs,
        outputs,
    };
    let manifest_path = spec.output_dir.join("manifest.json");
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    output::write_atomic(&manifest_path, &json)?;

    Ok(ExperimentReport {
        config_hash,
        networks: reports,
        runs_executed: runs.len() - runs_reused,
        runs_reused,
        manifest: manifest_path,
    })
}

fn run_cell(
    spec: &ExperimentSpec,
    prepared: &[Prepared],
    cell: &Cell,
    resume: bool,
) -> Result<(RunResult, bool)> {
    let net = &spec.networks[cell.network];
    let p = &prepared[cell.network];
    let (rng_seed, base_seed) = spec.cell_seeds(cell.network, cell.repetition);
    let cfg = AlgoConfig {
        rng_seed,
        ..spec.algorithms[cell.algorithm].clone()
    };
    let eval = EvalConfig {
        base_seed,
        ..spec.eval
    };
    let emb = if cfg.variant.needs_embedding() {
        p.embedding.as_ref()
    } else {
        None
    };
    let path = spec.output_dir.join(output::cell_path(
        "runs",
        &net.name,
        cfg.variant,
        cell.repetition,
        "json",
    ));

    let graph_fp = p.graph.fingerprint();
    let emb_fp = emb.map(EmbeddingTable::fingerprint);
    if resume {
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(prev) = serde_json::from_str::<RunResult>(&text) {
                if prev.config == cfg
                    && prev.eval == eval
                    && prev.provenance.graph_fingerprint == graph_fp
                    && prev.provenance.embedding_fingerprint == emb_fp
                {
                    return Ok((prev, true));
                }
            }
            log::info!("{}: stale run record, recomputing", path.display());
        }
    }

    let result = evolution::run(&p.graph, emb, &cfg, &eval)?;
    if result.provenance.embedding_fingerprint != emb_fp {
        return Err(Error::InvalidArgument(format!(
            "run on {:?} used an embedding other than the network's shared one",
            net.name
        )));
    }
    let mut json = serde_json::to_vec(&result)?;
    json.push(b'\n');
    output::write_atomic(&path, &json)?;
    Ok((result, false))
}

fn compare_to_evea(algorithms: &[AlgorithmSummary]) -> (Vec<Comparison>, Vec<(Variant, String)>) {
    let mut comparisons = Vec::new();
    let mut skipped = Vec::new();
    let Some(evea) = algorithms.iter().find(|a| a.variant == Variant::Evea) else {
        return (comparisons, skipped);
    };
    for base in algorithms.iter().filter(|a| a.variant != Variant::Evea) {
        match wilcoxon_signed_rank(&evea.hv, &base.hv) {
            Ok(test) => comparisons.push(Comparison {
                baseline: base.variant,
                test,
                evea_mean: evea.mean,
                baseline_mean: base.mean,
            }),
            Err(e) => skipped.push((base.variant, e.to_string())),
        }
    }
    (comparisons, skipped)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    })
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.format != MANIFEST_FORMAT {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("not a manifest (format {:?})", manifest.format),
        });
    }
    Ok(manifest)
}

#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub report: ExperimentReport,
    /// CSV outputs whose bytes differ from the manifest, or that are missing.
    pub mismatches: Vec<String>,
}

impl ReplayReport {
    pub fn is_identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-runs a manifest's grid from scratch into `output_dir` and compares
/// every CSV output with the recorded digests.
pub fn replay(
    manifest: &Manifest,
    output_dir: impl Into<PathBuf>,
    threads: Option<usize>,
) -> Result<ReplayReport> {
    let spec = ExperimentSpec {
        output_dir: output_dir.into(),
        ..manifest.spec.clone()
    };
    for (net, recorded) in spec.networks.iter().zip(&manifest.networks) {
        let fp = net.load()?.fingerprint();
        if fp != recorded.graph_fingerprint {
            return Err(Error::InvalidArgument(format!(
                "network {:?} no longer matches the manifest (fingerprint {fp}, recorded {})",
                net.name, recorded.graph_fingerprint
            )));
        }
    }
    let report = run_experiment(
        &spec,
        RunOptions {
            threads,
            resume: false,
        },
    )?;
    let replayed = read_manifest(&report.manifest)?;
    let mut mismatches: Vec<String> = manifest
        .outputs
        .iter()
        .filter(|(path, digest)| replayed.outputs.get(*path) != Some(*digest))
        .map(|(path, _)| path.clone())
        .collect();
    mismatches.extend(
        replayed
            .outputs
            .keys()
            .filter(|p| !manifest.outputs.contains_key(*p))
            .cloned(),
    );
    Ok(ReplayReport { report, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dir: &Path, reps: usize) -> ExperimentSpec {
        ExperimentSpec {
            networks: vec![NetworkSpec {
                name: "tiny".into(),
                source: NetworkSource::PowerlawCluster {
                    nodes: 40,
                    edges_per_node: 2,
                    triangle_prob: 0.5,
                    seed: 3,
                },
                prob_model: ProbabilityModel::WeightedCascade,
                cost_model: CostModel::Degree,
                subgraph: None,
            }],
            algorithms: Variant::ALL
                .iter()
                .map(|&variant| AlgoConfig {
                    variant,
                    population_size: 8,
                    max_generations: 5,
                    init_size_range: (1, 6),
                    max_seeds: 10,
                    ..AlgoConfig::default()
                })
                .collect(),
            eval: EvalConfig {
                mc_samples: 20,
                ..EvalConfig::default()
            },
            walk: WalkConfig {
                walks_per_node: 2,
                walk_length: 10,
                dims: 8,
                epochs: 1,
                ..WalkConfig::default()
            },
            repetitions: reps,
            output_dir: dir.to_path_buf(),
            master_seed: 11,
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let dir = tempfile::tempdir().unwrap();
        let ok = tiny(dir.path(), 1);
        assert!(ok.validate().is_ok());
        let mut s = ok.clone();
        s.repetitions = 0;
        assert!(s.validate().is_err());
        let mut s = ok.clone();
        s.networks[0].name = "../x".into();
        assert!(s.validate().is_err());
        let mut s = ok.clone();
        s.algorithms.push(s.algorithms[0].clone());
        assert!(s.validate().is_err());
        let mut s = ok.clone();
        s.algorithms[1].population_size = 3;
        assert!(s.validate().is_err());
    }

    #[test]
    fn missing_dataset_fails_before_any_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let mut s = tiny(&out, 1);
        s.networks[0].source = NetworkSource::EdgeList {
            path: dir.path().join("absent.txt"),
            directed: false,
        };
        let err = run_experiment(&s, RunOptions::default()).unwrap_err();
        assert!(err.is_data_error());
        assert!(!out.exists());
    }

    #[test]
    fn graph_dependent_config_error_precedes_training() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = tiny(dir.path(), 1);
        s.algorithms[0].init_size_range = (1, 50);
        s.algorithms[0].max_seeds = 60;
        assert!(matches!(
            run_experiment(&s, RunOptions::default()),
            Err(Error::Config(_))
        ));
        assert!(!dir.path().join("embeddings").exists());
    }

    #[test]
    fn single_repetition_has_no_statistics() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_experiment(&tiny(dir.path(), 1), RunOptions::default()).unwrap();
        let net = &report.networks[0];
        assert_eq!(net.algorithms.len(), 4);
        assert!(net
            .algorithms
            .iter()
            .all(|a| a.hv.len() == 1 && a.std == 0.0));
        assert!(net.comparisons.is_empty());
        assert_eq!(net.skipped_comparisons.len(), 3);
        let wilcoxon = fs::read_to_string(dir.path().join("wilcoxon.csv")).unwrap();
        assert_eq!(wilcoxon.lines().filter(|l| !l.starts_with('#')).count(), 1);
    }

    #[test]
    fn seeds_are_shared_across_algorithms_and_distinct_across_repetitions() {
        let dir = tempfile::tempdir().unwrap();
        let s = tiny(dir.path(), 3);
        assert_ne!(s.cell_seeds(0, 0), s.cell_seeds(0, 1));
        assert_ne!(s.cell_seeds(0, 0), s.cell_seeds(1, 0));
        let report = run_experiment(&s, RunOptions::default()).unwrap();
        let manifest = read_manifest(&report.manifest).unwrap();
        for rep in 0..3 {
            let seeds: Vec<_> = manifest
                .runs
                .iter()
                .filter(|r| r.repetition == rep)
                .map(|r| (r.rng_seed, r.eval_base_seed))
                .collect();
            assert_eq!(seeds.len(), 4);
            assert!(seeds.iter().all(|&x| x == s.cell_seeds(0, rep)));
        }
    }

    #[test]
    fn resume_reuses_records_and_reproduces_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let s = tiny(dir.path(), 2);
        let first = run_experiment(&s, RunOptions::default()).unwrap();
        assert_eq!((first.runs_executed, first.runs_reused), (8, 0));
        let summary = fs::read(dir.path().join("summary.csv")).unwrap();

        // A record truncated by a crash is recomputed; the rest are reused.
        let rec = dir
            .path()
            .join(output::cell_path("runs", "tiny", Variant::Nsga2, 1, "json"));
        fs::write(&rec, b"{ truncated").unwrap();
        let second = run_experiment(&s, RunOptions::default()).unwrap();
        assert_eq!((second.runs_executed, second.runs_reused), (1, 7));
        assert_eq!(fs::read(dir.path().join("summary.csv")).unwrap(), summary);
        assert_eq!(first.networks, second.networks);
    }

    #[test]
    fn replay_is_byte_identical_across_thread_counts() {
        let dir = tempfile::tempdir().unwrap();
        let s = tiny(&dir.path().join("a"), 2);
        let report = run_experiment(
            &s,
            RunOptions {
                threads: Some(1),
                resume: false,
            },
        )
        .unwrap();
        let manifest = read_manifest(&report.manifest).unwrap();
        let replayed = replay(&manifest, dir.path().join("b"), Some(4)).unwrap();
        assert!(replayed.is_identical(), "{:?}", replayed.mismatches);
        for run in &manifest.runs {
            let a = fs::read(dir.path().join("a").join(&run.front)).unwrap();
            let b = fs::read(dir.path().join("b").join(&run.front)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn front_files_round_trip_and_name_their_origin() {
        let dir = tempfile::tempdir().unwrap();
        let s = tiny(dir.path(), 1);
        let report = run_experiment(&s, RunOptions::default()).unwrap();
        let manifest = read_manifest(&report.manifest).unwrap();
        let run = &manifest.runs[0];
        let text = fs::read_to_string(dir.path().join(&run.front)).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with('#') && first.contains(&report.config_hash));
        assert!(first.contains(&format!("rng_seed={}", run.rng_seed)));
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "generation,influence,cost,time,hv"
        );
        let rows = read_front_csv(dir.path().join(&run.front)).unwrap();
        assert_eq!(rows.first().unwrap().generation, 0);
        assert_eq!(rows.last().unwrap().generation, 5);
    }

    #[test]
    fn stats_helpers() {
        assert_eq!(mean_std(&[1.0, 2.0, 3.0]), (2.0, 1.0));
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
        assert_eq!(median(vec![3.0, 1.0, 2.0, 10.0]), Some(2.5));
        assert_eq!(median(vec![]), None);
    }
}
