//! Pareto fronts, normalization, hypervolume, convergence traces and the
//! Wilcoxon signed-rank test.

mod hv;
mod wilcoxon;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::RunResult;
use crate::objectives::{dominates_min, ObjectiveVector};

pub use hv::{hypervolume_3d, DEFAULT_REFERENCE};
pub use wilcoxon::{
    wilcoxon_signed_rank, wilcoxon_signed_rank_with, WilcoxonMethod, WilcoxonResult, EXACT_LIMIT,
};

/// Indices of the non-dominated points, first occurrence of duplicates only,
/// in input order.
pub fn pareto_front_indices(points: &[ObjectiveVector]) -> Vec<usize> {
    let mins: Vec<[f64; 3]> = points.iter().map(ObjectiveVector::minimization).collect();
    (0..mins.len())
        .filter(|&i| {
            !mins[..i].contains(&mins[i]) && !mins.iter().any(|m| dominates_min(m, &mins[i]))
        })
        .collect()
}

/// The non-dominated subset with duplicates collapsed.
pub fn extract_pareto_front(points: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    pareto_front_indices(points)
        .into_iter()
        .map(|i| points[i])
        .collect()
}

/// Per-objective ranges of the minimization triple `(-spread, cost, time)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl NormalizationBounds {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Result<Self> {
        if (0..3).any(|i| !(min[i].is_finite() && max[i].is_finite() && max[i] >= min[i])) {
            return Err(Error::InvalidArgument(format!(
                "invalid bounds {min:?} .. {max:?}"
            )));
        }
        Ok(NormalizationBounds { min, max })
    }

    /// Tightest bounds containing every point. `None` when there are none.
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a ObjectiveVector>) -> Option<Self> {
        let mut it = points.into_iter().map(ObjectiveVector::minimization);
        let first = it.next()?;
        let (mut min, mut max) = (first, first);
        for m in it {
            for i in 0..3 {
                min[i] = min[i].min(m[i]);
                max[i] = max[i].max(m[i]);
            }
        }
        Some(NormalizationBounds { min, max })
    }
}

/// Affine map of each minimization coordinate onto `[0, 1]`. A zero-range
/// objective maps to 0.5. Out-of-range values are clipped; the second element
/// counts clipped points.
pub fn normalize(
    front: &[ObjectiveVector],
    bounds: &NormalizationBounds,
) -> (Vec<[f64; 3]>, usize) {
    let (out, clipped) = normalize_quiet(front, bounds);
    if clipped > 0 {
        warn!("{clipped} point(s) outside normalization bounds were clipped");
    }
    (out, clipped)
}

fn normalize_quiet(
    front: &[ObjectiveVector],
    bounds: &NormalizationBounds,
) -> (Vec<[f64; 3]>, usize) {
    let mut clipped = 0;
    let out = front
        .iter()
        .map(|p| {
            let m = p.minimization();
            let mut q = [0.0; 3];
            let mut clip = false;
            for i in 0..3 {
                let range = bounds.max[i] - bounds.min[i];
                q[i] = if range > 0.0 {
                    (m[i] - bounds.min[i]) / range
                } else {
                    0.5
                };
                if !(0.0..=1.0).contains(&q[i]) {
                    clip = true;
                    q[i] = q[i].clamp(0.0, 1.0);
                }
            }
            clipped += clip as usize;
            q
        })
        .collect();
    (out, clipped)
}

/// Hypervolume of a raw front after normalization, against the default
/// reference point.
pub fn normalized_hypervolume(front: &[ObjectiveVector], bounds: &NormalizationBounds) -> f64 {
    let (pts, _) = normalize(front, bounds);
    hypervolume_3d(&pts, DEFAULT_REFERENCE).expect("normalized points lie inside the reference box")
}

/// `(generation, hypervolume)` of each recorded front-0, normalized with
/// `bounds`. Generation 0 is the initial population. Early fronts routinely
/// fall outside bounds taken from final fronts, so clipping is silent here.
pub fn convergence_trace(run: &RunResult, bounds: &NormalizationBounds) -> Vec<(usize, f64)> {
    run.generations
        .iter()
        .map(|g| (g.generation, quiet_hypervolume(&g.front, bounds)))
        .collect()
}

pub(crate) fn quiet_hypervolume(front: &[ObjectiveVector], bounds: &NormalizationBounds) -> f64 {
    let (pts, _) = normalize_quiet(front, bounds);
    hypervolume_3d(&pts, DEFAULT_REFERENCE).expect("normalized points lie inside the reference box")
}

/// First generation whose value reaches `fraction` of the final value.
pub fn generations_to_fraction(trace: &[(usize, f64)], fraction: f64) -> Option<usize> {
    let last = trace.last()?.1;
    trace
        .iter()
        .find(|(_, v)| *v >= fraction * last)
        .map(|(g, _)| *g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng as _;

    fn ov(s: f64, c: f64, t: f64) -> ObjectiveVector {
        ObjectiveVector::new(s, c, t)
    }

    #[test]
    fn front_of_single_point_and_chain() {
        assert_eq!(
            extract_pareto_front(&[ov(1.0, 1.0, 1.0)]),
            vec![ov(1.0, 1.0, 1.0)]
        );
        let chain = [ov(1.0, 3.0, 3.0), ov(3.0, 1.0, 1.0), ov(2.0, 2.0, 2.0)];
        assert_eq!(extract_pareto_front(&chain), vec![ov(3.0, 1.0, 1.0)]);
        let dup = [ov(1.0, 1.0, 1.0), ov(2.0, 2.0, 0.0), ov(1.0, 1.0, 1.0)];
        assert_eq!(pareto_front_indices(&dup), vec![0, 1]);
    }

    #[test]
    fn normalization_corners() {
        let b = NormalizationBounds::from_points(&[ov(10.0, 1.0, 0.0), ov(2.0, 5.0, 4.0)]).unwrap();
        let (q, clipped) = normalize(
            &[ov(10.0, 1.0, 0.0), ov(2.0, 5.0, 4.0), ov(6.0, 3.0, 2.0)],
            &b,
        );
        assert_eq!(q, vec![[0.0; 3], [1.0; 3], [0.5; 3]]);
        assert_eq!(clipped, 0);
        let (q, clipped) = normalize(&[ov(11.0, 6.0, 2.0)], &b);
        assert_eq!((q[0], clipped), ([0.0, 1.0, 0.5], 1));
        let flat = NormalizationBounds::from_points(&[ov(3.0, 3.0, 3.0)]).unwrap();
        assert_eq!(normalize(&[ov(3.0, 3.0, 3.0)], &flat).0, vec![[0.5; 3]]);
        assert!(NormalizationBounds::new([1.0; 3], [0.0; 3]).is_err());
    }

    #[test]
    fn fraction_helper() {
        let t = [(0, 0.1), (1, 0.5), (2, 0.95), (3, 1.0)];
        assert_eq!(generations_to_fraction(&t, 0.9), Some(2));
        assert_eq!(generations_to_fraction(&[], 0.9), None);
    }

    fn brute_front(points: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
        let mut out: Vec<ObjectiveVector> = Vec::new();
        for p in points {
            let beaten = points.iter().any(|q| crate::dominates(q, p));
            if !beaten && !out.contains(p) {
                out.push(*p);
            }
        }
        out
    }

    #[test]
    fn front_matches_pairwise_oracle() {
        let mut rng = seeded(1);
        for _ in 0..50 {
            let pts: Vec<ObjectiveVector> = (0..100)
                .map(|_| {
                    ov(
                        rng.random_range(0..20) as f64,
                        rng.random_range(0..20) as f64,
                        rng.random::<f64>(),
                    )
                })
                .collect();
            assert_eq!(extract_pareto_front(&pts), brute_front(&pts));
        }
    }

    proptest! {
        #[test]
        fn front_is_idempotent(raw in proptest::collection::vec((0u8..6, 0u8..6, 0u8..6), 1..40)) {
            let pts: Vec<ObjectiveVector> = raw.iter().map(|&(a, b, c)| ov(a as f64, b as f64, c as f64)).collect();
            let f = extract_pareto_front(&pts);
            prop_assert_eq!(extract_pareto_front(&f), f.clone());
            for p in &pts {
                prop_assert!(f.contains(p) || f.iter().any(|q| crate::dominates(q, p)));
            }
        }
    }
}
