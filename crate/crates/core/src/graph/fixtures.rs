use std::collections::HashSet;

use rand::Rng as _;

use super::{CostModel, Graph, NodeId, ProbabilityModel};
use crate::error::{Error, Result};
use crate::rng;

/// Node labels of the ten-user supermarket network, in dense-id order.
pub const SUPERMARKET_LABELS: [char; 10] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J'];

const SUPERMARKET_ARCS: [(char, char); 13] = [
    ('A', 'D'),
    ('B', 'C'),
    ('B', 'G'),
    ('C', 'H'),
    ('D', 'C'),
    ('E', 'J'),
    ('G', 'B'),
    ('G', 'E'),
    ('H', 'I'),
    ('I', 'F'),
    ('J', 'A'),
    ('J', 'F'),
    ('J', 'I'),
];

/// The ten-user supermarket network (users A to J) with degree costs and a
/// constant propagation probability `p`.
///
/// Total degrees: A=2, B=3, D=2, E=2. With `p = 1` and unit delays, seeds
/// {A, B} reach all ten users with the last one (F) activated at step 4 along
/// B→C→H→I→F, while seeds {D, E} reach eight users within 2 steps and leave
/// B and G untouched.
pub fn supermarket(p: f64) -> Result<Graph> {
    let id = |c: char| SUPERMARKET_LABELS.iter().position(|&l| l == c).unwrap();
    let pairs: Vec<(NodeId, NodeId)> = SUPERMARKET_ARCS
        .iter()
        .map(|&(u, v)| (id(u), id(v)))
        .collect();
    Graph::from_pairs(
        10,
        &pairs,
        true,
        ProbabilityModel::Constant { p },
        CostModel::Degree,
        None,
        (0..10).collect(),
    )
}

/// Undirected Holme-Kim power-law graph with tunable clustering: each new node
/// attaches `m` edges by preferential attachment, and after each attachment
/// closes a triangle with probability `triangle_p`. Starts from a clique on
/// `m + 1` nodes, so the result is connected.
pub fn powerlaw_cluster(
    n: usize,
    m: usize,
    triangle_p: f64,
    seed: u64,
    prob_model: ProbabilityModel,
    cost_model: CostModel,
) -> Result<Graph> {
    if m == 0 || n <= m {
        return Err(Error::InvalidArgument(format!(
            "powerlaw_cluster needs n > m >= 1 (n = {n}, m = {m})"
        )));
    }
    if !(0.0..=1.0).contains(&triangle_p) {
        return Err(Error::InvalidArgument(format!(
            "triangle probability {triangle_p} outside [0, 1]"
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut endpoints: Vec<NodeId> = Vec::new();
    let mut pairs = Vec::new();
    let mut link =
        |u: NodeId, v: NodeId, adj: &mut Vec<Vec<NodeId>>, endpoints: &mut Vec<NodeId>| {
            adj[u].push(v);
            adj[v].push(u);
            endpoints.push(u);
            endpoints.push(v);
            pairs.push((u, v));
        };
    for u in 0..=m {
        for v in (u + 1)..=m {
            link(u, v, &mut adj, &mut endpoints);
        }
    }
    for v in (m + 1)..n {
        let mut chosen: HashSet<NodeId> = HashSet::new();
        let mut last: Option<NodeId> = None;
        while chosen.len() < m {
            let triad = last.and_then(|t| {
                if rng.random::<f64>() >= triangle_p {
                    return None;
                }
                let open: Vec<NodeId> = adj[t]
                    .iter()
                    .copied()
                    .filter(|&w| w != v && !chosen.contains(&w))
                    .collect();
                (!open.is_empty()).then(|| open[rng.random_range(0..open.len())])
            });
            let target = match triad {
                Some(w) => w,
                None => loop {
                    let w = endpoints[rng.random_range(0..endpoints.len())];
                    if w != v && !chosen.contains(&w) {
                        break w;
                    }
                },
            };
            chosen.insert(target);
            last = Some(target);
            link(v, target, &mut adj, &mut endpoints);
        }
    }
    Graph::from_pairs(
        n,
        &pairs,
        false,
        prob_model,
        cost_model,
        None,
        (0..n as u64).collect(),
    )
}
