//! Deterministic inputs shared by the kernel benchmarks.

use imict_core::embedding::{EmbeddingTable, WalkConfig};
use imict_core::graph::{induced_subgraph, powerlaw_cluster};
use imict_core::rng::seeded;
use imict_core::{CostModel, Graph, ObjectiveVector, ProbabilityModel, SeedSet};
use rand::seq::index::sample;
use rand::Rng as _;

/// Mutually non-dominated points on the simplex `x + y + z = 1`, inside the
/// unit box.
pub fn simplex_front(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.random(), rng.random());
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            [lo, hi - lo, 1.0 - hi]
        })
        .collect()
}

/// Uniform random objective vectors, so many fronts.
pub fn random_population(n: usize, seed: u64) -> Vec<ObjectiveVector> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| {
            ObjectiveVector::new(
                rng.random::<f64>() * 300.0,
                rng.random::<f64>() * 500.0,
                rng.random::<f64>() * 8.0,
            )
        })
        .collect()
}

/// A 500-node BFS sample of a 5242-node powerlaw-cluster graph with
/// weighted-cascade probabilities and degree costs.
pub fn benchmark_graph() -> Graph {
    let big = powerlaw_cluster(
        5242,
        3,
        0.7,
        1,
        ProbabilityModel::WeightedCascade,
        CostModel::Degree,
    )
    .expect("valid generator parameters");
    induced_subgraph(&big, 500, 2).expect("graph has 500 nodes")
}

/// `k` distinct uniform nodes of an `n`-node graph.
pub fn random_seeds(n: usize, k: usize, seed: u64) -> SeedSet {
    let mut rng = seeded(seed);
    SeedSet::new(sample(&mut rng, n, k).into_vec()).expect("k >= 1")
}

/// Small, quickly trained embedding for operator benchmarks.
pub fn quick_embedding(g: &Graph) -> EmbeddingTable {
    let cfg = WalkConfig {
        walks_per_node: 2,
        walk_length: 20,
        dims: 32,
        epochs: 1,
        ..WalkConfig::default()
    };
    imict_core::embedding::train(g, &cfg).expect("valid walk config")
}

#[cfg(test)]
mod tests {
    use super::*;
    use imict_core::objectives::dominates_min;

    #[test]
    fn simplex_points_are_mutually_non_dominated() {
        let f = simplex_front(200, 1);
        for a in &f {
            assert!(a.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!(f.iter().all(|b| !dominates_min(a, b)));
        }
    }

    #[test]
    fn seeds_have_requested_size() {
        assert_eq!(random_seeds(100, 20, 3).len(), 20);
    }
}
