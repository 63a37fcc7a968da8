use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::Result;
use crate::graph::NodeId;
use crate::SeedSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentRule {
    /// Repeatedly take the closest unmatched cross pair.
    #[default]
    Greedy,
    /// Minimum total distance assignment.
    Optimal,
}

/// Cross-parent node pairs `(from s1, from s2, distance)` plus leftovers.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentPairing {
    pub pairs: Vec<(NodeId, NodeId, f64)>,
    pub unmatched_1: Vec<NodeId>,
    pub unmatched_2: Vec<NodeId>,
}

pub fn align_pairs(s1: &SeedSet, s2: &SeedSet, emb: &EmbeddingTable) -> Result<AlignmentPairing> {
    align_pairs_with(s1, s2, emb, AlignmentRule::Greedy)
}

/// Pairs `min(|s1|, |s2|)` nodes across the parents by Euclidean embedding
/// distance. Greedy ties go to the lexicographically smaller `(id1, id2)`.
/// Pairs are listed in ascending `(distance, id1, id2)` order.
pub fn align_pairs_with(
    s1: &SeedSet,
    s2: &SeedSet,
    emb: &EmbeddingTable,
    rule: AlignmentRule,
) -> Result<AlignmentPairing> {
    let (a, b) = (s1.nodes(), s2.nodes());
    let mut dist = vec![0.0f64; a.len() * b.len()];
    for (i, &u) in a.iter().enumerate() {
        for (j, &v) in b.iter().enumerate() {
            dist[i * b.len() + j] = emb.euclidean_distance(u, v)?;
        }
    }
    let d = |i: usize, j: usize| dist[i * b.len() + j];

    let mut matched: Vec<(usize, usize)> = match rule {
        AlignmentRule::Greedy => {
            // a and b are sorted, so index order is id order
            let mut order: Vec<(usize, usize)> = (0..a.len())
                .flat_map(|i| (0..b.len()).map(move |j| (i, j)))
                .collect();
            order.sort_by(|&(i, j), &(k, l)| d(i, j).total_cmp(&d(k, l)).then((i, j).cmp(&(k, l))));
            let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
            let target = a.len().min(b.len());
            let mut out = Vec::with_capacity(target);
            for (i, j) in order {
                if out.len() == target {
                    break;
                }
                if !used_a[i] && !used_b[j] {
                    used_a[i] = true;
                    used_b[j] = true;
                    out.push((i, j));
                }
            }
            out
        }
        AlignmentRule::Optimal => {
            if a.len() <= b.len() {
                let cost: Vec<Vec<f64>> = (0..a.len())
                    .map(|i| (0..b.len()).map(|j| d(i, j)).collect())
                    .collect();
                min_cost_assignment(&cost).into_iter().enumerate().collect()
            } else {
                let cost: Vec<Vec<f64>> = (0..b.len())
                    .map(|j| (0..a.len()).map(|i| d(i, j)).collect())
                    .collect();
                min_cost_assignment(&cost)
                    .into_iter()
                    .enumerate()
                    .map(|(j, i)| (i, j))
                    .collect()
            }
        }
    };
    matched.sort_by(|&(i, j), &(k, l)| d(i, j).total_cmp(&d(k, l)).then((i, j).cmp(&(k, l))));

    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let pairs = matched
        .iter()
        .map(|&(i, j)| {
            used_a[i] = true;
            used_b[j] = true;
            (a[i], b[j], d(i, j))
        })
        .collect();
    let leftover = |nodes: &[NodeId], used: &[bool]| {
        nodes
            .iter()
            .zip(used)
            .filter(|(_, &u)| !u)
            .map(|(&v, _)| v)
            .collect()
    };
    Ok(AlignmentPairing {
        pairs,
        unmatched_1: leftover(a, &used_a),
        unmatched_2: leftover(b, &used_b),
    })
}

/// Hungarian algorithm for a `rows x cols` matrix with `rows <= cols`.
/// Returns the column assigned to each row.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    debug_assert!(n <= m);
    // 1-based potentials, column 0 is a sentinel
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=m {
        if owner[j] != 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}
