//! Latency-aware independent cascade (LAIC) diffusion.
//!
//! A realization of the cascade is a pure function of a 64-bit key: the coin
//! for arc `e` and the delay drawn on it are both hashed from `(key, e)`.
//! Cascades from different seed sets under the same key therefore see the same
//! live-edge graph, which gives common random numbers across candidates and
//! makes spread monotone in the seed set for every single realization.
//!
//! Activation times accumulate the sampled per-hop delays along the path that
//! actually activated each node; a node keeps its earliest activation time.

mod exact;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng;
use crate::SeedSet;

pub use exact::{exact_expectation, EXACT_ARC_LIMIT};

const INACTIVE: u64 = u64::MAX;
const NO_PARENT: usize = usize::MAX;

/// Per-hop activation delay.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelayDistribution {
    /// Every hop takes one time step.
    #[default]
    Unit,
    /// `P(delay = k) = (1 - q)^(k - 1) q` for `k >= 1`.
    Geometric { q: f64 },
}

impl DelayDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DelayDistribution::Unit => Ok(()),
            DelayDistribution::Geometric { q } if q > 0.0 && q <= 1.0 => Ok(()),
            DelayDistribution::Geometric { q } => Err(Error::InvalidArgument(format!(
                "geometric delay parameter {q} outside (0, 1]"
            ))),
        }
    }

    #[inline]
    fn sample(&self, key: u64, arc: usize) -> u64 {
        match *self {
            DelayDistribution::Unit => 1,
            DelayDistribution::Geometric { q } => {
                if q >= 1.0 {
                    return 1;
                }
                // inverse CDF on 1 - u in (0, 1]
                let u = 1.0 - rng::unit_f64(key, arc as u64, 1);
                let k = (u.ln() / (1.0 - q).ln()).ceil();
                if k < 1.0 {
                    1
                } else {
                    k as u64
                }
            }
        }
    }
}

/// Outcome of one cascade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeResult {
    /// Activated nodes in order of (activation time, activation order).
    pub activated: Vec<NodeId>,
    /// Activation time of each entry of `activated`; seeds have time 0.
    pub activation_time: Vec<u64>,
    /// The node whose successful attempt activated each entry (`None` for seeds).
    pub activated_by: Vec<Option<NodeId>>,
}

impl CascadeResult {
    pub fn spread(&self) -> usize {
        self.activated.len()
    }

    /// Latest activation time over activated nodes.
    pub fn finish_time(&self) -> u64 {
        self.activation_time.iter().copied().max().unwrap_or(0)
    }

    /// Writes one JSON object per activation: node, time and activating arc.
    pub fn write_trace(&self, mut out: impl Write) -> std::io::Result<()> {
        for ((&v, &t), by) in self
            .activated
            .iter()
            .zip(&self.activation_time)
            .zip(&self.activated_by)
        {
            let line = serde_json::json!({
                "node": v,
                "time": t,
                "arc": by.map(|u| [u, v]),
            });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Reusable buffers for repeated cascades on one graph.
pub struct CascadeScratch {
    time: Vec<u64>,
    parent: Vec<usize>,
    order: Vec<NodeId>,
    done: Vec<bool>,
    heap: BinaryHeap<Reverse<(u64, NodeId)>>,
}

impl CascadeScratch {
    pub fn new(node_count: usize) -> Self {
        CascadeScratch {
            time: vec![INACTIVE; node_count],
            parent: vec![NO_PARENT; node_count],
            order: Vec::new(),
            done: vec![false; node_count],
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.order {
            self.time[v] = INACTIVE;
            self.parent[v] = NO_PARENT;
            self.done[v] = false;
        }
        self.order.clear();
        self.heap.clear();
    }

    /// Runs the realization keyed by `key`; returns `(spread, finish_time)`.
    /// Seeds must already be validated against `g`.
    pub fn run(
        &mut self,
        g: &Graph,
        seeds: &SeedSet,
        delay: DelayDistribution,
        key: u64,
    ) -> (usize, u64) {
        self.reset();
        match delay {
            DelayDistribution::Unit => self.run_unit(g, seeds, key),
            _ => self.run_general(g, seeds, delay, key),
        }
        let finish = self.order.iter().map(|&v| self.time[v]).max().unwrap_or(0);
        (self.order.len(), finish)
    }

    // Round-based IC: BFS over live arcs processes nodes in time order.
    fn run_unit(&mut self, g: &Graph, seeds: &SeedSet, key: u64) {
        for v in seeds.iter() {
            self.time[v] = 0;
            self.order.push(v);
        }
        let mut head = 0;
        while head < self.order.len() {
            let u = self.order[head];
            head += 1;
            let t = self.time[u] + 1;
            let base = g.out_arc_offset(u);
            for (i, (&v, &p)) in g.out_neighbors(u).iter().zip(g.out_probs(u)).enumerate() {
                if self.time[v] == INACTIVE && rng::unit_f64(key, (base + i) as u64, 0) < p {
                    self.time[v] = t;
                    self.parent[v] = u;
                    self.order.push(v);
                }
            }
        }
    }

    // Event-driven: earliest pending activation is finalized first. Every
    // node that gets a tentative time is eventually finalized, so `order`
    // covers everything `reset` has to clear.
    fn run_general(&mut self, g: &Graph, seeds: &SeedSet, delay: DelayDistribution, key: u64) {
        for v in seeds.iter() {
            self.time[v] = 0;
            self.heap.push(Reverse((0, v)));
        }
        while let Some(Reverse((t, u))) = self.heap.pop() {
            if t > self.time[u] || self.done[u] {
                continue;
            }
            self.done[u] = true;
            self.order.push(u);
            let base = g.out_arc_offset(u);
            for (i, (&v, &p)) in g.out_neighbors(u).iter().zip(g.out_probs(u)).enumerate() {
                if self.done[v] {
                    continue;
                }
                let arc = base + i;
                if rng::unit_f64(key, arc as u64, 0) < p {
                    let candidate = t + delay.sample(key, arc);
                    if candidate < self.time[v] {
                        self.time[v] = candidate;
                        self.parent[v] = u;
                        self.heap.push(Reverse((candidate, v)));
                    }
                }
            }
        }
    }

    fn result(&self) -> CascadeResult {
        CascadeResult {
            activated: self.order.clone(),
            activation_time: self.order.iter().map(|&v| self.time[v]).collect(),
            activated_by: self
                .order
                .iter()
                .map(|&v| (self.parent[v] != NO_PARENT).then_some(self.parent[v]))
                .collect(),
        }
    }
}

/// One cascade whose randomness is fully determined by `key`.
pub fn simulate_realization(
    g: &Graph,
    seeds: &SeedSet,
    delay: DelayDistribution,
    key: u64,
) -> Result<CascadeResult> {
    seeds.validate(g)?;
    delay.validate()?;
    let mut scratch = CascadeScratch::new(g.node_count());
    scratch.run(g, seeds, delay, key);
    Ok(scratch.result())
}

/// One cascade; draws a single realization key from `rng`.
pub fn simulate_cascade<R: RngCore + ?Sized>(
    g: &Graph,
    seeds: &SeedSet,
    delay: DelayDistribution,
    rng: &mut R,
) -> Result<CascadeResult> {
    simulate_realization(g, seeds, delay, rng.next_u64())
}

/// Sample means and standard deviations of spread and finish time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub samples: usize,
    pub mean_spread: f64,
    pub mean_finish_time: f64,
    pub spread_std: f64,
    pub finish_time_std: f64,
}

impl McEstimate {
    pub fn spread_stderr(&self) -> f64 {
        self.spread_std / (self.samples as f64).sqrt()
    }

    pub fn finish_time_stderr(&self) -> f64 {
        self.finish_time_std / (self.samples as f64).sqrt()
    }
}

#[derive(Clone, Copy, Default)]
struct Sums {
    spread: u128,
    spread_sq: u128,
    time: u128,
    time_sq: u128,
}

impl Sums {
    fn add(mut self, spread: usize, time: u64) -> Self {
        let (s, t) = (spread as u128, time as u128);
        self.spread += s;
        self.spread_sq += s * s;
        self.time += t;
        self.time_sq += t * t;
        self
    }

    fn merge(self, o: Sums) -> Sums {
        Sums {
            spread: self.spread + o.spread,
            spread_sq: self.spread_sq + o.spread_sq,
            time: self.time + o.time,
            time_sq: self.time_sq + o.time_sq,
        }
    }
}

fn sample_std(sum: u128, sum_sq: u128, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let n = n as f64;
    let mean = sum as f64 / n;
    let var = (sum_sq as f64 - n * mean * mean) / (n - 1.0);
    var.max(0.0).sqrt()
}

const PARALLEL_CHUNK: usize = 1024;

/// Monte Carlo estimate over `samples` realizations; realization `i` uses key
/// `derive(base_seed, i)`.
///
/// Spreads and times are integers, so the sums are exact and the estimate is
/// identical whatever the chunking or thread count.
pub fn estimate_objectives_mc(
    g: &Graph,
    seeds: &SeedSet,
    samples: usize,
    delay: DelayDistribution,
    base_seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    seeds.validate(g)?;
    delay.validate()?;

    let run_range = |range: std::ops::Range<usize>| {
        let mut scratch = CascadeScratch::new(g.node_count());
        range.fold(Sums::default(), |acc, i| {
            let (s, t) = scratch.run(g, seeds, delay, rng::derive(base_seed, i as u64));
            acc.add(s, t)
        })
    };
    let sums = if samples >= 4 * PARALLEL_CHUNK {
        let chunks = samples.div_ceil(PARALLEL_CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| run_range(c * PARALLEL_CHUNK..((c + 1) * PARALLEL_CHUNK).min(samples)))
            .reduce(Sums::default, Sums::merge)
    } else {
        run_range(0..samples)
    };

    let n = samples as f64;
    Ok(McEstimate {
        samples,
        mean_spread: sums.spread as f64 / n,
        mean_finish_time: sums.time as f64 / n,
        spread_std: sample_std(sums.spread, sums.spread_sq, samples),
        finish_time_std: sample_std(sums.time, sums.time_sq, samples),
    })
}
