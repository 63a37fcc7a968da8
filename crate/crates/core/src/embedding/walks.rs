use rand::Rng as _;
use rayon::prelude::*;

use super::WalkConfig;
use crate::error::Result;
use crate::graph::{Graph, NodeId};
use crate::rng;

/// `walks_per_node` walks of up to `walk_length` nodes from every node,
/// following out-arcs. A walk stops early at a node without out-arcs.
///
/// The corpus is ordered round by round, and within a round by start node.
/// Walk `(round, start)` uses its own derived seed, so the corpus does not
/// depend on thread count.
pub fn generate_walks(g: &Graph, cfg: &WalkConfig) -> Result<Vec<Vec<NodeId>>> {
    cfg.validate()?;
    let n = g.node_count();
    let walks = (0..cfg.walks_per_node * n)
        .into_par_iter()
        .map(|i| {
            let (round, start) = (i / n, i % n);
            let mut rng = rng::seeded(rng::derive_path(
                cfg.rng_seed,
                &[round as u64, start as u64],
            ));
            walk(g, start, cfg, &mut rng)
        })
        .collect();
    Ok(walks)
}

fn walk(g: &Graph, start: NodeId, cfg: &WalkConfig, rng: &mut rng::Rng) -> Vec<NodeId> {
    let mut path = Vec::with_capacity(cfg.walk_length);
    path.push(start);
    while path.len() < cfg.walk_length {
        let cur = *path.last().unwrap();
        let next = g.out_neighbors(cur);
        if next.is_empty() {
            break;
        }
        let step = if cfg.is_uniform() || path.len() < 2 {
            next[rng.random_range(0..next.len())]
        } else {
            biased_step(g, path[path.len() - 2], next, cfg, rng)
        };
        path.push(step);
    }
    path
}

fn biased_step(
    g: &Graph,
    prev: NodeId,
    next: &[NodeId],
    cfg: &WalkConfig,
    rng: &mut rng::Rng,
) -> NodeId {
    let weight = |x: NodeId| {
        if x == prev {
            1.0 / cfg.p
        } else if g.has_arc(prev, x) {
            1.0
        } else {
            1.0 / cfg.q
        }
    };
    let total: f64 = next.iter().map(|&x| weight(x)).sum();
    let mut r = rng.random::<f64>() * total;
    for &x in next {
        r -= weight(x);
        if r < 0.0 {
            return x;
        }
    }
    *next.last().unwrap()
}
