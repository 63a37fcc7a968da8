use std::collections::VecDeque;

use super::DelayDistribution;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::SeedSet;

/// Largest arc count [`exact_expectation`] accepts.
pub const EXACT_ARC_LIMIT: usize = 20;

/// Exact expected spread and expected finish time under unit delays, by
/// enumerating every live-edge subgraph and weighting it by its probability.
///
/// On each realization the finish time is the largest BFS distance from the
/// seed set to a reached node.
pub fn exact_expectation(
    g: &Graph,
    seeds: &SeedSet,
    delay: DelayDistribution,
) -> Result<(f64, f64)> {
    if g.arc_count() > EXACT_ARC_LIMIT {
        return Err(Error::GraphTooLarge {
            edges: g.arc_count(),
            limit: EXACT_ARC_LIMIT,
        });
    }
    if delay != DelayDistribution::Unit {
        return Err(Error::InvalidArgument(
            "exact expectation supports unit delays only".into(),
        ));
    }
    seeds.validate(g)?;

    let arcs: Vec<(NodeId, NodeId, f64)> = g.arcs().map(|a| (a.source, a.target, a.prob)).collect();
    let n = g.node_count();
    let mut spread = 0.0;
    let mut finish = 0.0;
    for mask in 0u32..(1u32 << arcs.len()) {
        let mut weight = 1.0;
        let mut live: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (i, &(u, v, p)) in arcs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                weight *= p;
                live[u].push(v);
            } else {
                weight *= 1.0 - p;
            }
        }
        if weight == 0.0 {
            continue;
        }
        let mut depth: Vec<Option<u32>> = vec![None; n];
        let mut queue: VecDeque<NodeId> = seeds.iter().collect();
        for v in seeds.iter() {
            depth[v] = Some(0);
        }
        while let Some(u) = queue.pop_front() {
            let d = depth[u].unwrap();
            for &v in &live[u] {
                if depth[v].is_none() {
                    depth[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        let reached = depth.iter().flatten().count();
        let ecc = depth.iter().flatten().copied().max().unwrap_or(0);
        spread += weight * reached as f64;
        finish += weight * ecc as f64;
    }
    Ok((spread, finish))
}
