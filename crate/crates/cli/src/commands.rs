use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

use imict_core::embedding::{self, EmbeddingTable};
use imict_core::evolution::{self, RunResult};
use imict_core::experiment::{self, ExperimentReport, RunOptions};
use imict_core::graph::{self, SUPERMARKET_LABELS};
use imict_core::metrics::{self, NormalizationBounds, DEFAULT_REFERENCE};
use imict_core::rng::derive;
use imict_core::Graph;

use crate::config;
use crate::{
    BenchArgs, Cli, Command, EmbedCommand, FixtureCommand, GraphArgs, GraphCommand, HvArgs,
};

/// Marks failures caused by the command line itself.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

/// The error chain on one line, skipping causes already quoted by their parent.
pub fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    let mut last = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !last.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
        last = msg;
    }
    out
}

/// Maps an error chain to the documented exit codes.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() {
            return 1;
        }
        if let Some(core) = cause.downcast_ref::<imict_core::Error>() {
            let data = core.is_data_error() || matches!(core, imict_core::Error::Config(_));
            return if data { 2 } else { 3 };
        }
        if cause.is::<std::io::Error>()
            || cause.is::<toml::de::Error>()
            || cause.is::<serde_json::Error>()
        {
            return 2;
        }
    }
    3
}

pub fn dispatch(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .context("cannot configure worker threads")?;
    }
    match &cli.command {
        Command::Graph(GraphCommand::Info(args)) => graph_info(args, cli.output.as_deref()),
        Command::Graph(GraphCommand::Sample { graph, nodes }) => {
            graph_sample(graph, *nodes, cli.seed.unwrap_or(0), cli.output.as_deref())
        }
        Command::Embed(EmbedCommand::Train(args)) => embed_train(&cli, args),
        Command::Embed(EmbedCommand::Inspect {
            embedding,
            graph,
            node,
            top,
        }) => embed_inspect(embedding, graph, *node, *top),
        Command::Solve => solve(&cli),
        Command::Bench(args) => bench(&cli, args),
        Command::Hv(args) => hv(args),
        Command::Fixture(FixtureCommand::Supermarket { p }) => {
            fixture_supermarket(*p, cli.output.as_deref())
        }
        Command::Datasets => {
            for (name, url) in experiment::KNOWN_DATASETS {
                println!("{name}\t{url}");
            }
            println!("Download and decompress by hand, then use an edge_list source pointing at the file.");
            Ok(())
        }
    }
}

fn is_json(p: &Path) -> bool {
    p.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load_graph(args: &GraphArgs) -> Result<Graph> {
    if is_json(&args.input) {
        return Ok(graph::read_json(&args.input)?);
    }
    let (g, report) = graph::load_edge_list(
        &args.input,
        args.directed,
        args.prob.clone(),
        args.cost.clone(),
    )?;
    if report.duplicate_pairs > 0 {
        log::info!(
            "{}: {} duplicate pair(s) merged",
            args.input.display(),
            report.duplicate_pairs
        );
    }
    Ok(g)
}

/// Writes `text` to `output`, or stdout when absent.
fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
            }
            fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn graph_info(args: &GraphArgs, output: Option<&Path>) -> Result<()> {
    let g = load_graph(args)?;
    let n = g.node_count();
    let degrees: Vec<usize> = (0..n).map(|v| g.out_degree(v)).collect();
    let (min, max) = (
        degrees.iter().min().copied().unwrap_or(0),
        degrees.iter().max().copied().unwrap_or(0),
    );
    let mean = g.arc_count() as f64 / n.max(1) as f64;
    let total_cost: f64 = g.costs().iter().sum();
    let mut s = String::new();
    let _ = writeln!(s, "nodes: {n}");
    let _ = writeln!(s, "arcs: {}", g.arc_count());
    let _ = writeln!(s, "directed: {}", g.is_directed());
    let _ = writeln!(s, "probability model: {:?}", g.prob_model());
    let _ = writeln!(s, "cost model: {:?}", g.cost_model());
    let _ = writeln!(s, "out-degree: min {min} mean {mean:.3} max {max}");
    let _ = writeln!(s, "total cost: {total_cost}");
    let _ = writeln!(s, "fingerprint: {}", g.fingerprint());
    emit(output, &s)
}

fn write_graph(g: &Graph, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) if is_json(p) => Ok(graph::write_json(g, p)?),
        _ => {
            let mut buf = Vec::new();
            graph::write_edge_list(g, &mut buf)?;
            emit(
                output,
                &String::from_utf8(buf).expect("edge lists are ASCII"),
            )
        }
    }
}

fn graph_sample(args: &GraphArgs, nodes: usize, seed: u64, output: Option<&Path>) -> Result<()> {
    let g = load_graph(args)?;
    let sub = graph::induced_subgraph(&g, nodes, seed)?;
    log::info!(
        "sampled {} nodes, {} arcs",
        sub.node_count(),
        sub.arc_count()
    );
    write_graph(&sub, output)
}

fn embed_train(cli: &Cli, args: &GraphArgs) -> Result<()> {
    let out = cli
        .output
        .as_deref()
        .ok_or_else(|| usage("embed train needs --output"))?;
    let mut walk = config::load_walk(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        walk.rng_seed = seed;
    }
    walk.validate()?;
    let g = load_graph(args)?;
    let table = embedding::train(&g, &walk)?;
    embedding::save_embeddings(&table, &g, out)?;
    println!("nodes: {}", table.node_count());
    println!("dims: {}", table.dims());
    println!("fingerprint: {}", table.fingerprint());
    Ok(())
}

fn embed_inspect(path: &Path, args: &GraphArgs, node: Option<u64>, top: usize) -> Result<()> {
    let g = load_graph(args)?;
    let table = embedding::load_embeddings(path, &g)?;
    println!("nodes: {}", table.node_count());
    println!("dims: {}", table.dims());
    println!("fingerprint: {}", table.fingerprint());
    match table.trained_on() {
        Some(fp) if fp == g.fingerprint() => println!("trained on: this graph"),
        Some(fp) => println!("trained on: another graph ({fp})"),
        None => println!("trained on: unknown"),
    }
    if let Some(id) = node {
        let v = *g
            .dense_ids()
            .get(&id)
            .ok_or_else(|| usage(format!("node {id} is not in the graph")))?;
        let mut sims: Vec<(f64, usize)> = (0..g.node_count())
            .filter(|&u| u != v)
            .map(|u| Ok((table.cosine_similarity(v, u)?, u)))
            .collect::<Result<_>>()?;
        sims.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        println!("nearest to {id}:");
        for (sim, u) in sims.into_iter().take(top) {
            println!("  {}\t{sim:.4}", g.original_id(u));
        }
    }
    Ok(())
}

fn digest_json(value: &impl serde::Serialize) -> String {
    let bytes = serde_json::to_vec(value).expect("configuration serializes");
    Sha256::digest(&bytes)[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn solve(cli: &Cli) -> Result<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| usage("solve needs --config"))?;
    let mut cfg = config::load_solve(path)?;
    if let Some(seed) = cli.seed {
        cfg.algorithm.rng_seed = seed;
        cfg.eval.base_seed = derive(seed, 2);
        cfg.walk.rng_seed = derive(seed, 3);
    }
    cfg.algorithm.validate()?;
    cfg.eval.validate()?;
    let g = cfg.network.load()?;
    cfg.algorithm.validate_graph(&g)?;

    let emb: Option<EmbeddingTable> = if cfg.algorithm.variant.needs_embedding() {
        Some(match &cfg.embedding {
            Some(p) => embedding::load_embeddings(p, &g)?,
            None => {
                cfg.walk.validate()?;
                embedding::train(&g, &cfg.walk)?
            }
        })
    } else {
        None
    };
    let run = evolution::run(&g, emb.as_ref(), &cfg.algorithm, &cfg.eval)?;

    let front = &run.final_front();
    println!("influence\tcost\ttime\tseeds");
    for (p, s) in front.front.iter().zip(&front.front_seeds) {
        let ids: Vec<String> = s.iter().map(|v| g.original_id(v).to_string()).collect();
        println!("{}\t{}\t{}\t{}", p.spread, p.cost, p.time, ids.join(" "));
    }
    if let Some(out) = &cli.output {
        write_solve_outputs(out, &cfg, &run)?;
    }
    Ok(())
}

fn write_solve_outputs(out: &Path, cfg: &config::SolveConfig, run: &RunResult) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let trace: Vec<(usize, f64)> = run
        .generations
        .iter()
        .map(|g| g.generation)
        .zip(run.hv_trace.iter().copied())
        .collect();
    let origin = format!(
        "config_hash={} network={} algorithm={} rng_seed={} eval_seed={}",
        digest_json(cfg),
        cfg.network.name,
        run.config.variant,
        run.provenance.rng_seed,
        run.provenance.eval_base_seed
    );
    fs::write(
        out.join("front.csv"),
        experiment::front_csv(&origin, run, &trace),
    )?;
    let mut json = serde_json::to_vec_pretty(run)?;
    json.push(b'\n');
    fs::write(out.join("run.json"), json)?;
    Ok(())
}

fn print_report(report: &ExperimentReport) {
    for net in &report.networks {
        println!("{} ({} nodes, {} arcs)", net.name, net.nodes, net.arcs);
        println!("  algorithm\thv mean\thv std\tg90 median");
        for a in &net.algorithms {
            let g90 = a
                .median_g90
                .map(|g| g.to_string())
                .unwrap_or_else(|| "-".into());
            println!("  {}\t{:.4}\t{:.4}\t{g90}", a.variant, a.mean, a.std);
        }
        for c in &net.comparisons {
            println!(
                "  EVEA vs {}: W = {}, p = {:.4}",
                c.baseline, c.test.statistic, c.test.p_value
            );
        }
        for (v, why) in &net.skipped_comparisons {
            println!("  EVEA vs {v}: no test ({why})");
        }
    }
    println!(
        "runs: {} executed, {} reused; manifest {}",
        report.runs_executed,
        report.runs_reused,
        report.manifest.display()
    );
}

fn bench(cli: &Cli, args: &BenchArgs) -> Result<()> {
    if let Some(manifest_path) = &args.replay {
        let out: PathBuf = cli
            .output
            .clone()
            .ok_or_else(|| usage("bench --replay needs --output"))?;
        let manifest = experiment::read_manifest(manifest_path)?;
        let replayed = experiment::replay(&manifest, out, None)?;
        print_report(&replayed.report);
        if !replayed.is_identical() {
            bail!(
                "replay differs from the manifest in: {}",
                replayed.mismatches.join(", ")
            );
        }
        println!("replay identical: {} outputs", manifest.outputs.len());
        return Ok(());
    }
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| usage("bench needs --config or --replay"))?;
    let mut spec = config::load_experiment(path, cli.output.as_deref())?;
    if let Some(seed) = cli.seed {
        spec.master_seed = seed;
    }
    let report = experiment::run_experiment(
        &spec,
        RunOptions {
            threads: None,
            resume: !args.fresh,
        },
    )?;
    print_report(&report);
    Ok(())
}

fn hv(args: &HvArgs) -> Result<()> {
    let rows = experiment::read_front_csv(&args.front)?;
    let generation = match args.generation {
        Some(g) => g,
        None => rows.iter().map(|r| r.generation).max().ok_or_else(|| {
            anyhow!(imict_core::Error::Parse {
                path: args.front.clone(),
                line: 1,
                message: "no data rows".into(),
            })
        })?,
    };
    let front: Vec<_> = rows
        .iter()
        .filter(|r| r.generation == generation)
        .map(|r| r.objectives)
        .collect();
    if front.is_empty() {
        return Err(usage(format!("no rows for generation {generation}")));
    }
    let value = if args.normalized {
        let pts: Vec<[f64; 3]> = front.iter().map(|p| [p.spread, p.cost, p.time]).collect();
        metrics::hypervolume_3d(&pts, DEFAULT_REFERENCE)?
    } else {
        let bounds = match (&args.manifest, &args.network) {
            (Some(m), Some(name)) => {
                let manifest = experiment::read_manifest(m)?;
                manifest
                    .networks
                    .iter()
                    .find(|n| &n.name == name)
                    .map(|n| n.bounds)
                    .ok_or_else(|| usage(format!("manifest has no network {name:?}")))?
            }
            _ => NormalizationBounds::from_points(&front).expect("front is non-empty"),
        };
        metrics::normalized_hypervolume(&front, &bounds)
    };
    println!("{value}");
    Ok(())
}

fn fixture_supermarket(p: f64, output: Option<&Path>) -> Result<()> {
    let g = graph::supermarket(p)?;
    if let Some(path) = output.filter(|p| is_json(p)) {
        return Ok(graph::write_json(&g, path)?);
    }
    let mut s = format!("# ten-node supermarket network, arc probability {p}\n# id label degree\n");
    for (v, label) in SUPERMARKET_LABELS.iter().enumerate() {
        let _ = writeln!(s, "# {v} {label} {}", g.in_degree(v) + g.out_degree(v));
    }
    let mut buf = Vec::new();
    graph::write_edge_list(&g, &mut buf)?;
    s.push_str(&String::from_utf8(buf).expect("edge lists are ASCII"));
    emit(output, &s)
}
