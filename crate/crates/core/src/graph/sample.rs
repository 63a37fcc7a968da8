use std::collections::VecDeque;

use rand::Rng as _;

use super::{Graph, NodeId};
use crate::error::{Error, Result};
use crate::rng;

/// Samples `n` nodes by breadth-first search (ignoring arc direction) from a
/// random root and returns the induced subgraph. When a component is
/// exhausted the search restarts from another random unvisited node.
///
/// Dense ids follow BFS order; original ids are carried over. Probabilities
/// and costs are recomputed under the parent's models on the subgraph, except
/// file/explicit costs, which are inherited.
pub fn induced_subgraph(g: &Graph, n: usize, rng_seed: u64) -> Result<Graph> {
    let total = g.node_count();
    if n == 0 || n > total {
        return Err(Error::InvalidArgument(format!(
            "subgraph size must be in [1, {total}], got {n}"
        )));
    }
    let mut rng = rng::seeded(rng_seed);
    let mut new_id: Vec<Option<NodeId>> = vec![None; total];
    let mut order: Vec<NodeId> = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    while order.len() < n {
        if queue.is_empty() {
            let unvisited: Vec<NodeId> = (0..total).filter(|&v| new_id[v].is_none()).collect();
            let root = unvisited[rng.random_range(0..unvisited.len())];
            new_id[root] = Some(order.len());
            order.push(root);
            queue.push_back(root);
            continue;
        }
        let u = queue.pop_front().unwrap();
        let mut neighbours: Vec<NodeId> = g
            .out_neighbors(u)
            .iter()
            .chain(g.in_neighbors(u))
            .copied()
            .collect();
        neighbours.sort_unstable();
        neighbours.dedup();
        for v in neighbours {
            if order.len() == n {
                break;
            }
            if new_id[v].is_none() {
                new_id[v] = Some(order.len());
                order.push(v);
                queue.push_back(v);
            }
        }
    }

    let arcs: Vec<(NodeId, NodeId, f64)> = order
        .iter()
        .flat_map(|&u| {
            let nu = new_id[u].unwrap();
            let new_id = &new_id;
            g.out_neighbors(u)
                .iter()
                .zip(g.out_probs(u))
                .filter_map(move |(&v, &p)| new_id[v].map(|nv| (nu, nv, p)))
        })
        .collect();
    let carried: Vec<f64> = order.iter().map(|&v| g.cost(v)).collect();
    let originals: Vec<u64> = order.iter().map(|&v| g.original_id(v)).collect();

    let mut sub = Graph::from_arcs(n, arcs, carried.clone())?
        .with_original_ids(originals)
        .with_flags(
            g.is_directed(),
            g.prob_model().clone(),
            g.cost_model().clone(),
        );
    sub.reassign(Some(carried))?;
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CostModel, ProbabilityModel};

    fn ring(n: usize) -> Graph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_pairs(
            n,
            &pairs,
            false,
            ProbabilityModel::WeightedCascade,
            CostModel::Degree,
            None,
            (100..100 + n as u64).collect(),
        )
        .unwrap()
    }

    #[test]
    fn full_size_keeps_structure() {
        let g = ring(12);
        let s = induced_subgraph(&g, 12, 3).unwrap();
        assert_eq!(s.node_count(), 12);
        assert_eq!(s.arc_count(), g.arc_count());
        let mut a: Vec<_> = g
            .arcs()
            .map(|a| (g.original_id(a.source), g.original_id(a.target), a.prob))
            .collect();
        let mut b: Vec<_> = s
            .arcs()
            .map(|a| (s.original_id(a.source), s.original_id(a.target), a.prob))
            .collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a, b);
        let mut ca: Vec<_> = (0..12)
            .map(|v| (g.original_id(v), g.cost(v) as u64))
            .collect();
        let mut cb: Vec<_> = (0..12)
            .map(|v| (s.original_id(v), s.cost(v) as u64))
            .collect();
        ca.sort();
        cb.sort();
        assert_eq!(ca, cb);
    }

    #[test]
    fn single_node_has_no_arcs() {
        let s = induced_subgraph(&ring(8), 1, 0).unwrap();
        assert_eq!(s.node_count(), 1);
        assert_eq!(s.arc_count(), 0);
        assert_eq!(s.costs(), &[0.0]);
    }

    #[test]
    fn zero_or_oversized_is_rejected() {
        assert!(induced_subgraph(&ring(5), 0, 0).is_err());
        assert!(induced_subgraph(&ring(5), 6, 0).is_err());
    }

    #[test]
    fn deterministic_and_recomputed() {
        let g = ring(30);
        let a = induced_subgraph(&g, 10, 9).unwrap();
        let b = induced_subgraph(&g, 10, 9).unwrap();
        assert_eq!(a, b);
        // a 10-node window of a ring is a path: endpoints have degree 1
        let ones = a.costs().iter().filter(|&&c| c == 1.0).count();
        assert_eq!(ones, 2);
        for v in 0..10 {
            if a.in_degree(v) > 0 {
                let total: f64 = a
                    .in_neighbors(v)
                    .iter()
                    .map(|&u| {
                        let i = a.out_neighbors(u).binary_search(&v).unwrap();
                        a.out_probs(u)[i]
                    })
                    .sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restarts_in_other_components() {
        let pairs = [(0, 1), (2, 3), (4, 5)];
        let g = Graph::from_pairs(
            6,
            &pairs,
            false,
            ProbabilityModel::WeightedCascade,
            CostModel::Unit,
            None,
            (0..6).collect(),
        )
        .unwrap();
        let s = induced_subgraph(&g, 5, 1).unwrap();
        assert_eq!(s.node_count(), 5);
        assert_eq!(s.arc_count(), 4);
    }
}
