//! The objective vector `(spread, cost, time)` and its evaluation.
//!
//! Spread is maximized, cost and time are minimized. Internally everything is
//! compared on the minimization triple `(-spread, cost, time)`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{estimate_objectives_mc, DelayDistribution};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::SeedSet;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// Estimated expected number of activated nodes.
    pub spread: f64,
    /// Exact total activation cost of the seeds.
    pub cost: f64,
    /// Estimated expected latest activation time.
    pub time: f64,
}

impl ObjectiveVector {
    pub fn new(spread: f64, cost: f64, time: f64) -> Self {
        ObjectiveVector { spread, cost, time }
    }

    /// `(-spread, cost, time)`.
    #[inline]
    pub fn minimization(&self) -> [f64; 3] {
        [-self.spread, self.cost, self.time]
    }

    pub fn from_minimization(m: [f64; 3]) -> Self {
        ObjectiveVector {
            spread: -m[0],
            cost: m[1],
            time: m[2],
        }
    }
}

/// True iff `a` is no worse than `b` everywhere and strictly better somewhere.
#[inline]
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    dominates_min(&a.minimization(), &b.minimization())
}

/// Dominance on minimization triples.
#[inline]
pub fn dominates_min(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let mut strictly = false;
    for i in 0..3 {
        if a[i] > b[i] {
            return false;
        }
        if a[i] < b[i] {
            strictly = true;
        }
    }
    strictly
}

/// When spread and time are re-estimated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// A fresh base seed every generation, shared by the whole population of
    /// that generation; parents are re-evaluated.
    #[default]
    PerGeneration,
    /// One base seed for the whole run; each seed set is evaluated once.
    Once,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub mc_samples: usize,
    pub delay: DelayDistribution,
    pub base_seed: u64,
    pub cache_enabled: bool,
    pub mode: EvalMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            mc_samples: 100,
            delay: DelayDistribution::Unit,
            base_seed: 0,
            cache_enabled: true,
            mode: EvalMode::PerGeneration,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mc_samples == 0 {
            return Err(Error::Config("mc_samples must be at least 1".into()));
        }
        self.delay.validate()
    }
}

/// Total activation cost `Σ c_i` over the seeds.
pub fn cost(g: &Graph, s: &SeedSet) -> Result<f64> {
    s.validate(g)?;
    Ok(s.iter().map(|v| g.cost(v)).sum())
}

/// Evaluates one seed set without caching.
pub fn evaluate(g: &Graph, s: &SeedSet, cfg: &EvalConfig) -> Result<ObjectiveVector> {
    cfg.validate()?;
    let est = estimate_objectives_mc(g, s, cfg.mc_samples, cfg.delay, cfg.base_seed)?;
    Ok(ObjectiveVector::new(
        est.mean_spread,
        cost(g, s)?,
        est.mean_finish_time,
    ))
}

/// Memoizing evaluator bound to one graph.
///
/// All seed sets share the current base seed, so comparisons within one base
/// seed use common random numbers. [`Evaluator::reseed`] switches to a new
/// base seed and clears the cache.
pub struct Evaluator<'g> {
    graph: &'g Graph,
    cfg: EvalConfig,
    cache: Mutex<HashMap<SeedSet, ObjectiveVector>>,
    simulated: AtomicUsize,
}

impl<'g> Evaluator<'g> {
    pub fn new(graph: &'g Graph, cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Evaluator {
            graph,
            cfg,
            cache: Mutex::new(HashMap::new()),
            simulated: AtomicUsize::new(0),
        })
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn base_seed(&self) -> u64 {
        self.cfg.base_seed
    }

    /// Number of seed sets actually simulated (cache misses).
    pub fn simulated(&self) -> usize {
        self.simulated.load(Ordering::Relaxed)
    }

    pub fn reseed(&mut self, base_seed: u64) {
        self.cfg.base_seed = base_seed;
        self.cache.get_mut().unwrap().clear();
    }

    fn compute(&self, s: &SeedSet) -> Result<ObjectiveVector> {
        self.simulated.fetch_add(1, Ordering::Relaxed);
        evaluate(self.graph, s, &self.cfg)
    }

    pub fn evaluate(&self, s: &SeedSet) -> Result<ObjectiveVector> {
        if self.cfg.cache_enabled {
            if let Some(v) = self.cache.lock().unwrap().get(s) {
                return Ok(*v);
            }
        }
        let v = self.compute(s)?;
        if self.cfg.cache_enabled {
            self.cache.lock().unwrap().entry(s.clone()).or_insert(v);
        }
        Ok(v)
    }

    /// Evaluates many seed sets in parallel. The output order matches the
    /// input and does not depend on scheduling.
    pub fn evaluate_batch(&self, sets: &[&SeedSet]) -> Result<Vec<ObjectiveVector>> {
        if !self.cfg.cache_enabled {
            return sets.par_iter().map(|s| self.compute(s)).collect();
        }
        let mut missing: Vec<&SeedSet> = {
            let cache = self.cache.lock().unwrap();
            sets.iter()
                .copied()
                .filter(|s| !cache.contains_key(*s))
                .collect()
        };
        missing.sort_unstable();
        missing.dedup();
        let fresh: Vec<ObjectiveVector> = missing
            .par_iter()
            .map(|s| self.compute(s))
            .collect::<Result<_>>()?;
        let mut cache = self.cache.lock().unwrap();
        for (s, v) in missing.into_iter().zip(fresh) {
            cache.entry(s.clone()).or_insert(v);
        }
        Ok(sets.iter().map(|s| cache[*s]).collect())
    }
}
