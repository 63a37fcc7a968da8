//! The evolutionary main loop and its NSGA-II building blocks.
//!
//! Four variants share the loop and differ only in their operators:
//!
//! | variant    | crossover                         | mutation                   |
//! |------------|-----------------------------------|----------------------------|
//! | `EVEA`     | embedding-aligned                 | variable-length            |
//! | `NSGA2`    | fixed-length uniform              | replace one seed           |
//! | `NSGA2+VC` | one-point, common cut (variable)  | none                       |
//! | `NSGA2+VM` | uniform over the common prefix    | variable-length            |

mod nsga;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{normalized_hypervolume, pareto_front_indices, NormalizationBounds};
use crate::objectives::{EvalConfig, EvalMode, Evaluator, ObjectiveVector};
use crate::operators::{self, AlignedCrossoverOptions};
use crate::rng::{self, Rng};
use crate::SeedSet;

pub use nsga::{
    assign_rank_and_crowding, crowding_distance, environmental_selection,
    environmental_selection_indices, fast_nondominated_sort, rank_and_crowding,
    tournament_selection,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub seeds: SeedSet,
    pub objectives: Option<ObjectiveVector>,
    pub rank: usize,
    /// Infinite for boundary members; not serialized.
    #[serde(skip, default)]
    pub crowding: f64,
}

impl Individual {
    pub fn new(seeds: SeedSet) -> Self {
        Individual {
            seeds,
            objectives: None,
            rank: 0,
            crowding: 0.0,
        }
    }
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Variant {
    #[default]
    #[serde(rename = "EVEA")]
    Evea,
    #[serde(rename = "NSGA2")]
    Nsga2,
    #[serde(rename = "NSGA2+VC")]
    Nsga2Vc,
    #[serde(rename = "NSGA2+VM")]
    Nsga2Vm,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Evea,
        Variant::Nsga2,
        Variant::Nsga2Vc,
        Variant::Nsga2Vm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Evea => "EVEA",
            Variant::Nsga2 => "NSGA2",
            Variant::Nsga2Vc => "NSGA2+VC",
            Variant::Nsga2Vm => "NSGA2+VM",
        }
    }

    pub fn needs_embedding(self) -> bool {
        self == Variant::Evea
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_uppercase().replace(['-', '_'], "");
        match norm.as_str() {
            "EVEA" => Ok(Variant::Evea),
            "NSGA2" | "NSGAII" => Ok(Variant::Nsga2),
            "NSGA2+VC" | "NSGA2VC" => Ok(Variant::Nsga2Vc),
            "NSGA2+VM" | "NSGA2VM" => Ok(Variant::Nsga2Vm),
            _ => Err(Error::Config(format!(
                "unknown variant {s:?} (expected EVEA, NSGA2, NSGA2+VC or NSGA2+VM)"
            ))),
        }
    }
}

/// Variable-length crossover of the `NSGA2+VC` baseline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableCrossover {
    /// Common cut point; child lengths stay within the parents'.
    #[default]
    OnePoint,
    /// Independent cut points; child lengths can grow up to `max_seeds`.
    CutAndSplice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    /// Inclusive range of initial seed-set sizes.
    pub init_size_range: (usize, usize),
    pub max_seeds: usize,
    pub variant: Variant,
    pub rng_seed: u64,
    pub crossover: AlignedCrossoverOptions,
    pub variable_crossover: VariableCrossover,
    /// Seed-set size of the plain NSGA-II variant; the midpoint of
    /// `init_size_range` when unset.
    pub fixed_length: Option<usize>,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            population_size: 100,
            max_generations: 1000,
            crossover_rate: 0.9,
            mutation_rate: 0.2,
            tournament_size: 2,
            init_size_range: (1, 30),
            max_seeds: 100,
            variant: Variant::Evea,
            rng_seed: 0,
            crossover: AlignedCrossoverOptions::default(),
            variable_crossover: VariableCrossover::default(),
            fixed_length: None,
        }
    }
}

impl AlgoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
            return bad(format!(
                "population_size must be even and at least 2, got {}",
                self.population_size
            ));
        }
        if self.tournament_size == 0 {
            return bad("tournament_size must be at least 1".into());
        }
        for (name, p) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must be in [0, 1], got {p}"));
            }
        }
        let (lo, hi) = self.init_size_range;
        if lo == 0 || lo > hi || hi > self.max_seeds {
            return bad(format!(
                "init_size_range ({lo}, {hi}) must satisfy 1 <= min <= max <= max_seeds ({})",
                self.max_seeds
            ));
        }
        if self.fixed_length == Some(0) {
            return bad("fixed_length must be at least 1".into());
        }
        Ok(())
    }

    /// Validation that needs the graph.
    pub fn validate_for(&self, g: &Graph, emb: Option<&EmbeddingTable>) -> Result<()> {
        self.validate_graph(g)?;
        if self.variant.needs_embedding() {
            let emb = emb.ok_or_else(|| {
                Error::Config(format!("{} requires node embeddings", self.variant))
            })?;
            emb.covers(g)?;
        }
        Ok(())
    }

    /// Validation that needs the graph but not the embedding.
    pub fn validate_graph(&self, g: &Graph) -> Result<()> {
        self.validate()?;
        let n = g.node_count();
        if self.variant == Variant::Nsga2 {
            if self.seed_length() > n {
                return Err(Error::Config(format!(
                    "fixed seed-set length {} exceeds node count {n}",
                    self.seed_length()
                )));
            }
        } else if self.init_size_range.1 > n {
            return Err(Error::Config(format!(
                "init_size_range upper bound {} exceeds node count {n}",
                self.init_size_range.1
            )));
        }
        Ok(())
    }

    /// Seed-set size used by the plain NSGA-II variant.
    pub fn seed_length(&self) -> usize {
        self.fixed_length
            .unwrap_or((self.init_size_range.0 + self.init_size_range.1) / 2)
    }
}

/// Front 0 of one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Non-dominated objective vectors, duplicates collapsed.
    pub front: Vec<ObjectiveVector>,
    /// A seed set achieving each entry of `front`.
    pub front_seeds: Vec<SeedSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub rng_seed: u64,
    pub eval_base_seed: u64,
    pub graph_fingerprint: String,
    pub embedding_fingerprint: Option<String>,
    pub version: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub config: AlgoConfig,
    pub eval: EvalConfig,
    pub provenance: Provenance,
    pub final_population: Vec<Individual>,
    /// Entry 0 is the initial population.
    pub generations: Vec<GenerationRecord>,
    /// Hypervolume of each generation's front, normalized over this run's own
    /// fronts. Compare runs with shared bounds through
    /// [`crate::metrics::convergence_trace`] instead.
    pub hv_trace: Vec<f64>,
    pub bounds: Option<NormalizationBounds>,
    /// Seed sets actually simulated.
    pub simulations: usize,
    /// Wall-clock seconds per generation; ignored by equality.
    pub seconds: Vec<f64>,
}

impl PartialEq for RunResult {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.eval == other.eval
            && self.provenance == other.provenance
            && self.final_population == other.final_population
            && self.generations == other.generations
            && self.hv_trace == other.hv_trace
            && self.bounds == other.bounds
            && self.simulations == other.simulations
    }
}

impl RunResult {
    pub fn final_front(&self) -> &GenerationRecord {
        self.generations
            .last()
            .expect("a run records at least the initial population")
    }
}

const STREAM_INIT: u64 = 1;
const STREAM_TOURNAMENT: u64 = 2;
const STREAM_VARIATION: u64 = 3;
const STREAM_EVAL: u64 = 4;

/// Uniform sizes from `init_size_range` (or the fixed length for plain
/// NSGA-II), then that many distinct uniform nodes. All unevaluated.
pub fn initialize_population(g: &Graph, cfg: &AlgoConfig) -> Result<Vec<Individual>> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no nodes".into()));
    }
    let (lo, hi) = match cfg.variant {
        Variant::Nsga2 => (cfg.seed_length(), cfg.seed_length()),
        _ => cfg.init_size_range,
    };
    if hi > n {
        return Err(Error::Config(format!(
            "initial seed-set size {hi} exceeds node count {n}"
        )));
    }
    let mut rng = rng::seeded(rng::derive(cfg.rng_seed, STREAM_INIT));
    Ok((0..cfg.population_size)
        .map(|_| {
            let k = rng.random_range(lo..=hi);
            let nodes = sample(&mut rng, n, k).into_vec();
            Individual::new(SeedSet::new(nodes).expect("k >= 1"))
        })
        .collect())
}

fn crossover(
    variant: Variant,
    cfg: &AlgoConfig,
    a: &SeedSet,
    b: &SeedSet,
    n: usize,
    emb: Option<&EmbeddingTable>,
    rng: &mut Rng,
) -> Result<(SeedSet, SeedSet)> {
    let p = cfg.crossover_rate;
    match variant {
        Variant::Evea => {
            let emb = emb.ok_or_else(|| Error::Config("EVEA requires node embeddings".into()))?;
            operators::embedding_aligned_crossover_with(a, b, emb, p, cfg.crossover, rng)
        }
        Variant::Nsga2 => operators::fixed_length_uniform_crossover(a, b, p, n, rng),
        Variant::Nsga2Vc => match cfg.variable_crossover {
            VariableCrossover::OnePoint => operators::one_point_crossover(a, b, p, rng),
            VariableCrossover::CutAndSplice => {
                operators::cut_and_splice_crossover(a, b, p, cfg.max_seeds, rng)
            }
        },
        Variant::Nsga2Vm => operators::prefix_uniform_crossover(a, b, p, rng),
    }
}

fn mutate(
    variant: Variant,
    cfg: &AlgoConfig,
    s: SeedSet,
    n: usize,
    rng: &mut Rng,
) -> Result<SeedSet> {
    if variant == Variant::Nsga2Vc || !(rng.random::<f64>() < cfg.mutation_rate) {
        return Ok(s);
    }
    match variant {
        Variant::Evea | Variant::Nsga2Vm => {
            Ok(operators::variable_length_mutation(&s, n, cfg.max_seeds, rng)?.0)
        }
        _ => operators::replace_mutation(&s, n, rng),
    }
}

fn evaluate_into(pop: &mut [Individual], eval: &Evaluator<'_>, only_missing: bool) -> Result<()> {
    let todo: Vec<usize> = (0..pop.len())
        .filter(|&i| !only_missing || pop[i].objectives.is_none())
        .collect();
    let sets: Vec<&SeedSet> = todo.iter().map(|&i| &pop[i].seeds).collect();
    let values = eval.evaluate_batch(&sets)?;
    for (i, v) in todo.into_iter().zip(values) {
        pop[i].objectives = Some(v);
    }
    Ok(())
}

fn record(generation: usize, pop: &[Individual]) -> GenerationRecord {
    let front0: Vec<&Individual> = pop.iter().filter(|i| i.rank == 0).collect();
    let objs: Vec<ObjectiveVector> = front0
        .iter()
        .map(|i| i.objectives.expect("evaluated"))
        .collect();
    let keep = pareto_front_indices(&objs);
    GenerationRecord {
        generation,
        front: keep.iter().map(|&k| objs[k]).collect(),
        front_seeds: keep.iter().map(|&k| front0[k].seeds.clone()).collect(),
    }
}

/// Runs one variant for `max_generations` generations.
///
/// Each generation: tournament selection, pairwise crossover of consecutive
/// mating-pool entries, mutation of each child with probability
/// `mutation_rate`, evaluation, and elitist selection from parents plus
/// children. Random streams are derived from `rng_seed` per purpose and
/// generation, so results do not depend on the thread count.
pub fn run(
    g: &Graph,
    emb: Option<&EmbeddingTable>,
    cfg: &AlgoConfig,
    eval_cfg: &EvalConfig,
) -> Result<RunResult> {
    cfg.validate_for(g, emb)?;
    eval_cfg.validate()?;
    let n = g.node_count();
    let gen_seed = |gen: usize| match eval_cfg.mode {
        EvalMode::Once => eval_cfg.base_seed,
        EvalMode::PerGeneration => rng::derive_path(eval_cfg.base_seed, &[STREAM_EVAL, gen as u64]),
    };
    let mut evaluator = Evaluator::new(
        g,
        EvalConfig {
            base_seed: gen_seed(0),
            ..*eval_cfg
        },
    )?;

    let started = Instant::now();
    let mut pop = initialize_population(g, cfg)?;
    evaluate_into(&mut pop, &evaluator, false)?;
    assign_rank_and_crowding(&mut pop)?;
    let mut generations = vec![record(0, &pop)];
    let mut seconds = vec![started.elapsed().as_secs_f64()];

    for gen in 1..=cfg.max_generations {
        let started = Instant::now();
        let mut t_rng = rng::seeded(rng::derive_path(
            cfg.rng_seed,
            &[STREAM_TOURNAMENT, gen as u64],
        ));
        let pool =
            tournament_selection(&pop, cfg.population_size, cfg.tournament_size, &mut t_rng)?;

        let mut offspring = Vec::with_capacity(cfg.population_size);
        for (pair, parents) in pool.chunks_exact(2).enumerate() {
            let mut v_rng = rng::seeded(rng::derive_path(
                cfg.rng_seed,
                &[STREAM_VARIATION, gen as u64, pair as u64],
            ));
            let (a, b) = (&pop[parents[0]].seeds, &pop[parents[1]].seeds);
            let (c1, c2) = crossover(cfg.variant, cfg, a, b, n, emb, &mut v_rng)?;
            offspring.push(Individual::new(mutate(
                cfg.variant,
                cfg,
                c1,
                n,
                &mut v_rng,
            )?));
            offspring.push(Individual::new(mutate(
                cfg.variant,
                cfg,
                c2,
                n,
                &mut v_rng,
            )?));
        }

        if eval_cfg.mode == EvalMode::PerGeneration {
            evaluator.reseed(gen_seed(gen));
            for ind in &mut pop {
                ind.objectives = None;
            }
        }
        let mut combined = pop;
        combined.extend(offspring);
        evaluate_into(&mut combined, &evaluator, true)?;
        pop = environmental_selection(combined, cfg.population_size)?;
        generations.push(record(gen, &pop));
        seconds.push(started.elapsed().as_secs_f64());
    }

    let bounds = NormalizationBounds::from_points(generations.iter().flat_map(|g| g.front.iter()));
    let hv_trace = match &bounds {
        Some(b) => generations
            .iter()
            .map(|g| normalized_hypervolume(&g.front, b))
            .collect(),
        None => vec![0.0; generations.len()],
    };
    Ok(RunResult {
        config: cfg.clone(),
        eval: *eval_cfg,
        provenance: Provenance {
            rng_seed: cfg.rng_seed,
            eval_base_seed: eval_cfg.base_seed,
            graph_fingerprint: g.fingerprint(),
            embedding_fingerprint: emb.map(EmbeddingTable::fingerprint),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        final_population: pop,
        generations,
        hv_trace,
        bounds,
        simulations: evaluator.simulated(),
        seconds,
    })
}
