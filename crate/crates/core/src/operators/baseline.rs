//! Operators used by the NSGA-II baselines.

use rand::seq::index::sample;
use rand::Rng as _;

use super::{check_rate, sample_outside};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::rng::Rng;
use crate::SeedSet;

fn sorted_set(mut nodes: Vec<NodeId>) -> SeedSet {
    nodes.sort_unstable();
    nodes.dedup();
    SeedSet::new(nodes).expect("operators never build empty sets")
}

/// Tops `nodes` back up to `k` distinct members with uniform unused nodes.
fn repair(mut nodes: Vec<NodeId>, k: usize, n: usize, rng: &mut Rng) -> SeedSet {
    nodes.sort_unstable();
    nodes.dedup();
    while nodes.len() < k {
        let v = sample_outside(&nodes, n, rng);
        let at = nodes.partition_point(|&x| x < v);
        nodes.insert(at, v);
    }
    SeedSet::new(nodes).expect("k >= 1")
}

/// Position-wise swap of the sorted parents, each slot with probability
/// `p_c`. Children that lose members to duplicates are refilled with uniform
/// unused nodes, so both keep length `k`.
pub fn fixed_length_uniform_crossover(
    s1: &SeedSet,
    s2: &SeedSet,
    p_c: f64,
    n: usize,
    rng: &mut Rng,
) -> Result<(SeedSet, SeedSet)> {
    check_rate("crossover rate", p_c)?;
    if s1.len() != s2.len() {
        return Err(Error::InvalidArgument(format!(
            "fixed-length crossover needs equal lengths, got {} and {}",
            s1.len(),
            s2.len()
        )));
    }
    s1.check_range(n)?;
    s2.check_range(n)?;
    let k = s1.len();
    let (mut a, mut b) = (s1.nodes().to_vec(), s2.nodes().to_vec());
    for i in 0..k {
        if rng.random::<f64>() < p_c {
            std::mem::swap(&mut a[i], &mut b[i]);
        }
    }
    Ok((repair(a, k, n, rng), repair(b, k, n, rng)))
}

/// Replaces one uniform member with a uniform node outside the set.
pub fn replace_mutation(s: &SeedSet, n: usize, rng: &mut Rng) -> Result<SeedSet> {
    s.check_range(n)?;
    if s.len() >= n {
        return Ok(s.clone());
    }
    let mut nodes = s.nodes().to_vec();
    let v = sample_outside(&nodes, n, rng);
    nodes.remove(rng.random_range(0..nodes.len()));
    nodes.push(v);
    Ok(sorted_set(nodes))
}

/// With probability `p_c`, cuts each parent at an independent point and
/// exchanges tails: `c1 = s1[..i] ++ s2[j..]`, `c2 = s2[..j] ++ s1[i..]` with
/// `i >= 1` and `j >= 1`. Children are deduplicated; one longer than
/// `max_seeds` loses uniformly chosen members.
pub fn cut_and_splice_crossover(
    s1: &SeedSet,
    s2: &SeedSet,
    p_c: f64,
    max_seeds: usize,
    rng: &mut Rng,
) -> Result<(SeedSet, SeedSet)> {
    check_rate("crossover rate", p_c)?;
    if max_seeds == 0 {
        return Err(Error::InvalidArgument(
            "max_seeds must be at least 1".into(),
        ));
    }
    if !(rng.random::<f64>() < p_c) {
        return Ok((s1.clone(), s2.clone()));
    }
    let (a, b) = (s1.nodes(), s2.nodes());
    let i = rng.random_range(1..=a.len());
    let j = rng.random_range(1..=b.len());
    let mut c1: Vec<NodeId> = a[..i].iter().chain(&b[j..]).copied().collect();
    let mut c2: Vec<NodeId> = b[..j].iter().chain(&a[i..]).copied().collect();
    for c in [&mut c1, &mut c2] {
        c.sort_unstable();
        c.dedup();
        if c.len() > max_seeds {
            let keep = sample(rng, c.len(), max_seeds);
            let mut kept: Vec<NodeId> = keep.iter().map(|x| c[x]).collect();
            kept.sort_unstable();
            *c = kept;
        }
    }
    Ok((sorted_set(c1), sorted_set(c2)))
}

/// With probability `p_c`, one-point crossover at a common cut
/// `c` in `1..=min(|s1|, |s2|)` of the sorted parents:
/// `c1 = s1[..c] ++ s2[c..]`, `c2 = s2[..c] ++ s1[c..]`. Child lengths stay
/// within the parents' lengths (duplicates are dropped).
pub fn one_point_crossover(
    s1: &SeedSet,
    s2: &SeedSet,
    p_c: f64,
    rng: &mut Rng,
) -> Result<(SeedSet, SeedSet)> {
    check_rate("crossover rate", p_c)?;
    if !(rng.random::<f64>() < p_c) {
        return Ok((s1.clone(), s2.clone()));
    }
    let (a, b) = (s1.nodes(), s2.nodes());
    let c = rng.random_range(1..=a.len().min(b.len()));
    let c1 = a[..c].iter().chain(&b[c..]).copied().collect();
    let c2 = b[..c].iter().chain(&a[c..]).copied().collect();
    Ok((sorted_set(c1), sorted_set(c2)))
}

/// Position-wise swap over the first `min(|s1|, |s2|)` sorted slots with
/// probability `p_c` each; the longer parent's tail stays with its child.
/// Duplicates created by the swap are dropped.
pub fn prefix_uniform_crossover(
    s1: &SeedSet,
    s2: &SeedSet,
    p_c: f64,
    rng: &mut Rng,
) -> Result<(SeedSet, SeedSet)> {
    check_rate("crossover rate", p_c)?;
    let (mut a, mut b) = (s1.nodes().to_vec(), s2.nodes().to_vec());
    for i in 0..a.len().min(b.len()) {
        if rng.random::<f64>() < p_c {
            std::mem::swap(&mut a[i], &mut b[i]);
        }
    }
    Ok((sorted_set(a), sorted_set(b)))
}
