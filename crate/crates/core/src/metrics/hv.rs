use std::collections::BTreeMap;
use std::ops::Bound::{Excluded, Unbounded};

use crate::error::{Error, Result};

/// Default reference point on normalized minimization objectives.
pub const DEFAULT_REFERENCE: [f64; 3] = [1.1, 1.1, 1.1];

/// Order-preserving map from finite f64 to i64.
fn key(x: f64) -> i64 {
    let b = x.to_bits() as i64;
    if b < 0 {
        b ^ i64::MAX
    } else {
        b
    }
}

/// Non-dominated (y, z) points with y ascending and z descending, plus the
/// area they dominate up to the reference corner.
struct Staircase {
    points: BTreeMap<i64, (f64, f64)>,
    ry: f64,
    rz: f64,
    area: f64,
}

impl Staircase {
    fn new(ry: f64, rz: f64) -> Self {
        Staircase {
            points: BTreeMap::new(),
            ry,
            rz,
            area: 0.0,
        }
    }

    fn insert(&mut self, y: f64, z: f64) {
        let k = key(y);
        // the closest point at or left of y has the lowest z on that side
        let left = self.points.range(..=k).next_back().map(|(_, &p)| p);
        if let Some((_, lz)) = left {
            if lz <= z {
                return;
            }
        }
        let mut bound = left.map_or(self.rz, |(_, lz)| lz);
        let mut from = y;
        let mut removed = Vec::new();
        let mut right_edge = self.ry;
        for (&rk, &(py, pz)) in self.points.range(k..) {
            if pz < z {
                right_edge = py;
                break;
            }
            self.area += (py - from) * (bound - z);
            from = py;
            bound = pz;
            removed.push(rk);
        }
        self.area += (right_edge - from) * (bound - z);
        for rk in removed {
            self.points.remove(&rk);
        }
        self.points.insert(k, (y, z));
        debug_assert!(self
            .points
            .range((Excluded(k), Unbounded))
            .next()
            .is_none_or(|(_, &(_, nz))| nz < z));
    }
}

/// Volume dominated by `front` (minimization) and bounded by `reference`.
///
/// Sweeps the first coordinate in ascending order while maintaining the
/// dominated area of the other two. Duplicate and dominated points add
/// nothing. Points beyond the reference in any coordinate are an error.
pub fn hypervolume_3d(front: &[[f64; 3]], reference: [f64; 3]) -> Result<f64> {
    let beyond: Vec<[f64; 3]> = front
        .iter()
        .filter(|p| (0..3).any(|i| !(p[i] <= reference[i]) || !p[i].is_finite()))
        .copied()
        .collect();
    if !beyond.is_empty() {
        return Err(Error::BeyondReference(beyond));
    }
    let mut pts = front.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut stairs = Staircase::new(reference[1], reference[2]);
    let mut volume = 0.0;
    for (i, p) in pts.iter().enumerate() {
        stairs.insert(p[1], p[2]);
        let next_x = pts.get(i + 1).map_or(reference[0], |q| q[0]);
        volume += stairs.area * (next_x - p[0]);
    }
    Ok(volume)
}
