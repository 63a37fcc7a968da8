//! Variation operators on seed sets.
//!
//! Every operator takes an explicit rng handle and returns sets that are
//! nonempty, sorted, duplicate-free and inside the node range.

mod align;
mod baseline;

use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::rng::Rng;
use crate::SeedSet;

pub use align::{align_pairs, align_pairs_with, AlignmentPairing, AlignmentRule};
pub use baseline::{
    cut_and_splice_crossover, fixed_length_uniform_crossover, one_point_crossover,
    prefix_uniform_crossover, replace_mutation,
};

/// Whether the crossover rate applies to each aligned pair or to the
/// operator as a whole.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverGate {
    #[default]
    PerPair,
    WholeOperator,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedCrossoverOptions {
    #[serde(default)]
    pub rule: AlignmentRule,
    #[serde(default)]
    pub gate: CrossoverGate,
}

pub(crate) fn check_rate(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Crossover with default options: greedy alignment, per-pair gate.
pub fn embedding_aligned_crossover(
    s1: &SeedSet,
    s2: &SeedSet,
    emb: &EmbeddingTable,
    p_c: f64,
    rng: &mut Rng,
) -> Result<(SeedSet, SeedSet)> {
    embedding_aligned_crossover_with(s1, s2, emb, p_c, AlignedCrossoverOptions::default(), rng)
}

/// Pairs the parents' nodes by embedding distance and exchanges paired nodes.
///
/// Unpaired nodes stay on their side. Swapping in a node the child already
/// holds shrinks the child by one. A swap always leaves the incoming node in
/// the child, so children are never empty.
pub fn embedding_aligned_crossover_with(
    s1: &SeedSet,
    s2: &SeedSet,
    emb: &EmbeddingTable,
    p_c: f64,
    opts: AlignedCrossoverOptions,
    rng: &mut Rng,
) -> Result<(SeedSet, SeedSet)> {
    check_rate("crossover rate", p_c)?;
    let pairing = align_pairs_with(s1, s2, emb, opts.rule)?;
    let mut c1: BTreeSet<NodeId> = s1.iter().collect();
    let mut c2: BTreeSet<NodeId> = s2.iter().collect();

    let (whole, pair_rate) = match opts.gate {
        CrossoverGate::PerPair => (true, p_c),
        CrossoverGate::WholeOperator => (rng.random::<f64>() < p_c, 1.0),
    };
    if whole {
        for &(u, v, _) in &pairing.pairs {
            if !(rng.random::<f64>() < pair_rate) || u == v {
                continue;
            }
            c1.remove(&u);
            c1.insert(v);
            c2.remove(&v);
            c2.insert(u);
        }
    }
    Ok((
        SeedSet::from_sorted_unchecked(c1.into_iter().collect()),
        SeedSet::from_sorted_unchecked(c2.into_iter().collect()),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationStrategy {
    Add,
    Delete,
    Replace,
}

/// Uniform draw from `0..n` excluding the members of `s`. `s` must not cover
/// the whole range.
pub(crate) fn sample_outside(s: &[NodeId], n: usize, rng: &mut Rng) -> NodeId {
    debug_assert!(s.len() < n);
    if s.len() * 2 < n {
        loop {
            let v = rng.random_range(0..n);
            if s.binary_search(&v).is_err() {
                return v;
            }
        }
    }
    let k = rng.random_range(0..n - s.len());
    // k-th node (0-based) not in the sorted slice s
    let (mut lo, mut hi) = (0usize, s.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if s[mid] - mid <= k {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    k + lo
}

/// One of add / delete / replace, chosen uniformly among the strategies that
/// keep `1 <= |S| <= min(max_seeds, n)`. Returns `None` as the strategy when
/// no change is possible (a single node graph).
pub fn variable_length_mutation(
    s: &SeedSet,
    n: usize,
    max_seeds: usize,
    rng: &mut Rng,
) -> Result<(SeedSet, Option<MutationStrategy>)> {
    s.check_range(n)?;
    let len = s.len();
    let mut feasible = Vec::with_capacity(3);
    if len < n && len < max_seeds {
        feasible.push(MutationStrategy::Add);
    }
    if len > 1 {
        feasible.push(MutationStrategy::Delete);
    }
    if len < n {
        feasible.push(MutationStrategy::Replace);
    }
    if feasible.is_empty() {
        return Ok((s.clone(), None));
    }
    let strategy = feasible[rng.random_range(0..feasible.len())];
    let mut nodes = s.nodes().to_vec();
    match strategy {
        MutationStrategy::Add => {
            let v = sample_outside(&nodes, n, rng);
            nodes.push(v);
        }
        MutationStrategy::Delete => {
            nodes.remove(rng.random_range(0..len));
        }
        MutationStrategy::Replace => {
            let v = sample_outside(&nodes, n, rng);
            nodes.remove(rng.random_range(0..len));
            nodes.push(v);
        }
    }
    nodes.sort_unstable();
    Ok((SeedSet::from_sorted_unchecked(nodes), Some(strategy)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn line_embedding(n: usize) -> EmbeddingTable {
        EmbeddingTable::new(1, (0..n).map(|i| vec![i as f64]).collect()).unwrap()
    }

    fn set(v: &[NodeId]) -> SeedSet {
        SeedSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let emb = line_embedding(10);
        let (a, b) = (set(&[1, 4, 7]), set(&[2, 3]));
        let mut rng = seeded(1);
        for gate in [CrossoverGate::PerPair, CrossoverGate::WholeOperator] {
            let opts = AlignedCrossoverOptions {
                gate,
                ..Default::default()
            };
            let (c1, c2) =
                embedding_aligned_crossover_with(&a, &b, &emb, 0.0, opts, &mut rng).unwrap();
            assert_eq!((c1, c2), (a.clone(), b.clone()));
        }
    }

    #[test]
    fn full_rate_singletons_swap() {
        let emb = line_embedding(5);
        let (c1, c2) =
            embedding_aligned_crossover(&set(&[0]), &set(&[3]), &emb, 1.0, &mut seeded(0)).unwrap();
        assert_eq!((c1, c2), (set(&[3]), set(&[0])));
    }

    #[test]
    fn shared_nodes_pair_with_themselves() {
        let emb = line_embedding(10);
        let (c1, c2) =
            embedding_aligned_crossover(&set(&[1, 5]), &set(&[1, 6]), &emb, 1.0, &mut seeded(0))
                .unwrap();
        assert_eq!((c1, c2), (set(&[1, 6]), set(&[1, 5])));
    }

    #[test]
    fn collision_shrinks_child() {
        // identical vectors: ties resolve to pairs (1,2) then (2,3)
        let emb = EmbeddingTable::new(1, vec![vec![0.0]; 4]).unwrap();
        let (c1, c2) =
            embedding_aligned_crossover(&set(&[1, 2]), &set(&[2, 3]), &emb, 1.0, &mut seeded(0))
                .unwrap();
        assert_eq!((c1, c2), (set(&[3]), set(&[1, 2])));
    }

    #[test]
    fn mutation_strategy_constraints() {
        let mut rng = seeded(3);
        for _ in 0..200 {
            let (m, st) = variable_length_mutation(&set(&[0, 1, 2]), 3, 10, &mut rng).unwrap();
            assert_eq!(st, Some(MutationStrategy::Delete));
            assert_eq!(m.len(), 2);
            let (m, st) = variable_length_mutation(&set(&[4]), 6, 10, &mut rng).unwrap();
            assert_ne!(st, Some(MutationStrategy::Delete));
            assert!(!m.is_empty());
            let (_, st) = variable_length_mutation(&set(&[1, 2]), 6, 2, &mut rng).unwrap();
            assert_ne!(st, Some(MutationStrategy::Add));
        }
        assert_eq!(
            variable_length_mutation(&set(&[0]), 1, 5, &mut rng).unwrap(),
            (set(&[0]), None)
        );
        assert!(variable_length_mutation(&set(&[7]), 5, 5, &mut rng).is_err());
    }

    #[test]
    fn strategies_are_uniform() {
        let mut rng = seeded(11);
        let mut counts = [0usize; 3];
        let trials = 10_000;
        for _ in 0..trials {
            let (_, st) = variable_length_mutation(&set(&[2, 5, 9]), 20, 100, &mut rng).unwrap();
            counts[st.unwrap() as usize] += 1;
        }
        let expected = trials as f64 / 3.0;
        let sigma = (trials as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn sample_outside_is_uniform_over_complement() {
        let s = [1, 2, 5, 6, 7];
        let mut rng = seeded(5);
        let mut counts = [0usize; 9];
        for _ in 0..9000 {
            counts[sample_outside(&s, 9, &mut rng)] += 1;
        }
        for (v, &c) in counts.iter().enumerate() {
            if s.contains(&v) {
                assert_eq!(c, 0);
            } else {
                assert!((c as f64 - 2250.0).abs() < 200.0, "{counts:?}");
            }
        }
    }

    fn arb_pair(n: usize) -> impl Strategy<Value = (Vec<NodeId>, Vec<NodeId>)> {
        (
            proptest::collection::btree_set(0..n, 1..8),
            proptest::collection::btree_set(0..n, 1..8),
        )
            .prop_map(|(a, b)| (a.into_iter().collect(), b.into_iter().collect()))
    }

    proptest! {
        #[test]
        fn aligned_crossover_closure((a, b) in arb_pair(15), p in 0.0f64..=1.0, seed in any::<u64>()) {
            let emb = EmbeddingTable::new(2, (0..15).map(|i| vec![(i * 7 % 5) as f64, (i % 4) as f64 * 0.37]).collect()).unwrap();
            let (s1, s2) = (set(&a), set(&b));
            let (c1, c2) = embedding_aligned_crossover(&s1, &s2, &emb, p, &mut seeded(seed)).unwrap();
            for c in [&c1, &c2] {
                prop_assert!(!c.is_empty());
                prop_assert!(c.nodes().windows(2).all(|w| w[0] < w[1]));
                prop_assert!(c.iter().all(|v| s1.contains(v) || s2.contains(v)));
            }
        }

        #[test]
        fn aligned_crossover_conserves_size_without_collisions(a in proptest::collection::btree_set(0usize..10, 1..6), b in proptest::collection::btree_set(10usize..20, 1..6), seed in any::<u64>()) {
            let emb = EmbeddingTable::new(1, (0..20).map(|i| vec![(i * 13 % 20) as f64]).collect()).unwrap();
            let (s1, s2) = (set(&a.into_iter().collect::<Vec<_>>()), set(&b.into_iter().collect::<Vec<_>>()));
            let (c1, c2) = embedding_aligned_crossover(&s1, &s2, &emb, 0.5, &mut seeded(seed)).unwrap();
            prop_assert_eq!(c1.len() + c2.len(), s1.len() + s2.len());
            prop_assert_eq!(c1.len(), s1.len());
        }

        #[test]
        fn mutation_closure(a in proptest::collection::btree_set(0usize..12, 1..12), cap in 1usize..15, seed in any::<u64>()) {
            let s = set(&a.into_iter().collect::<Vec<_>>());
            let cap = cap.max(s.len());
            let (m, st) = variable_length_mutation(&s, 12, cap, &mut seeded(seed)).unwrap();
            prop_assert!(!m.is_empty() && m.len() <= cap);
            prop_assert!(m.iter().all(|v| v < 12));
            match st {
                Some(MutationStrategy::Add) => prop_assert_eq!(m.len(), s.len() + 1),
                Some(MutationStrategy::Delete) => prop_assert_eq!(m.len() + 1, s.len()),
                Some(MutationStrategy::Replace) => {
                    prop_assert_eq!(m.len(), s.len());
                    prop_assert_eq!(m.iter().filter(|v| !s.contains(*v)).count(), 1);
                }
                None => prop_assert_eq!(&m, &s),
            }
        }
    }
}
