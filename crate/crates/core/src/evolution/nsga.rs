//! Non-dominated sorting, crowding distance and elitist selection.

use rand::Rng as _;

use super::Individual;
use crate::error::{Error, Result};
use crate::objectives::{dominates_min, ObjectiveVector};
use crate::rng::Rng;

/// Fronts of indices: front 0 is non-dominated, front `i + 1` is
/// non-dominated once fronts `0..=i` are removed. Indices within a front are
/// ascending.
pub fn fast_nondominated_sort(points: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let mins: Vec<[f64; 3]> = points.iter().map(ObjectiveVector::minimization).collect();
    sort_min(&mins)
}

pub(crate) fn sort_min(mins: &[[f64; 3]]) -> Vec<Vec<usize>> {
    let n = mins.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_min(&mins[i], &mins[j]) {
                dominates[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_min(&mins[j], &mins[i]) {
                dominates[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front. Per objective, the two
/// extreme members get infinity and the others accumulate the normalized gap
/// between their neighbours; an objective with zero range adds nothing.
/// Sorting ties are broken by position in `front`.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let mins: Vec<[f64; 3]> = front.iter().map(ObjectiveVector::minimization).collect();
    crowding_min(&mins)
}

pub(crate) fn crowding_min(mins: &[[f64; 3]]) -> Vec<f64> {
    let n = mins.len();
    let mut dist = vec![0.0f64; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    #[allow(clippy::needless_range_loop)]
    for m in 0..3 {
        order.sort_by(|&a, &b| mins[a][m].total_cmp(&mins[b][m]).then(a.cmp(&b)));
        let (lo, hi) = (mins[order[0]][m], mins[order[n - 1]][m]);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            dist[order[k]] += (mins[order[k + 1]][m] - mins[order[k - 1]][m]) / range;
        }
    }
    dist
}

/// Rank and crowding distance for every point.
pub fn rank_and_crowding(points: &[ObjectiveVector]) -> (Vec<usize>, Vec<f64>) {
    let mins: Vec<[f64; 3]> = points.iter().map(ObjectiveVector::minimization).collect();
    let mut rank = vec![0usize; points.len()];
    let mut crowd = vec![0.0f64; points.len()];
    for (r, front) in sort_min(&mins).iter().enumerate() {
        let sub: Vec<[f64; 3]> = front.iter().map(|&i| mins[i]).collect();
        for (&i, d) in front.iter().zip(crowding_min(&sub)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

/// Indices of the `n` survivors, ascending: whole fronts in order, then the
/// members of the first front that does not fit by descending crowding
/// distance (earlier index wins ties). In that front, a member whose objective
/// vector repeats an earlier member's goes after every distinct one, so
/// copies never displace a distinct trade-off.
pub fn environmental_selection_indices(points: &[ObjectiveVector], n: usize) -> Result<Vec<usize>> {
    if points.len() < n {
        return Err(Error::InvalidArgument(format!(
            "cannot select {n} survivors from {} individuals",
            points.len()
        )));
    }
    let mins: Vec<[f64; 3]> = points.iter().map(ObjectiveVector::minimization).collect();
    let mut chosen = Vec::with_capacity(n);
    for front in sort_min(&mins) {
        if chosen.len() + front.len() <= n {
            chosen.extend_from_slice(&front);
            if chosen.len() == n {
                break;
            }
            continue;
        }
        let sub: Vec<[f64; 3]> = front.iter().map(|&i| mins[i]).collect();
        let crowd = crowding_min(&sub);
        let repeat: Vec<bool> = (0..sub.len()).map(|k| sub[..k].contains(&sub[k])).collect();
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            repeat[a]
                .cmp(&repeat[b])
                .then(crowd[b].total_cmp(&crowd[a]))
                .then(a.cmp(&b))
        });
        let room = n - chosen.len();
        chosen.extend(order[..room].iter().map(|&k| front[k]));
        break;
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Keeps `n` individuals and recomputes rank and crowding on the survivors.
pub fn environmental_selection(pool: Vec<Individual>, n: usize) -> Result<Vec<Individual>> {
    let objs = evaluated(&pool)?;
    let keep = environmental_selection_indices(&objs, n)?;
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    let mut survivors: Vec<Individual> = keep
        .iter()
        .map(|&i| slots[i].take().expect("unique index"))
        .collect();
    assign_rank_and_crowding(&mut survivors)?;
    Ok(survivors)
}

pub(crate) fn evaluated(pop: &[Individual]) -> Result<Vec<ObjectiveVector>> {
    pop.iter()
        .map(|ind| {
            ind.objectives.ok_or_else(|| {
                Error::InvalidArgument(format!("individual {} is not evaluated", ind.seeds))
            })
        })
        .collect()
}

pub fn assign_rank_and_crowding(pop: &mut [Individual]) -> Result<()> {
    let objs = evaluated(pop)?;
    let (rank, crowd) = rank_and_crowding(&objs);
    for ((ind, r), c) in pop.iter_mut().zip(rank).zip(crowd) {
        ind.rank = r;
        ind.crowding = c;
    }
    Ok(())
}

/// `count` tournaments of `size` contestants drawn with replacement. Lower
/// rank wins, then larger crowding distance, then a uniform draw among the
/// tied. Returns indices into `pop`.
pub fn tournament_selection(
    pop: &[Individual],
    count: usize,
    size: usize,
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    if pop.is_empty() || size == 0 {
        return Err(Error::InvalidArgument(
            "tournament needs a population and at least one contestant".into(),
        ));
    }
    evaluated(pop)?;
    let better = |a: &Individual, b: &Individual| {
        a.rank.cmp(&b.rank).then(b.crowding.total_cmp(&a.crowding))
    };
    let mut pool = Vec::with_capacity(count);
    let mut best: Vec<usize> = Vec::with_capacity(size);
    for _ in 0..count {
        best.clear();
        for _ in 0..size {
            let c = rng.random_range(0..pop.len());
            match best.first() {
                None => best.push(c),
                Some(&b) => match better(&pop[c], &pop[b]) {
                    std::cmp::Ordering::Less => {
                        best.clear();
                        best.push(c);
                    }
                    std::cmp::Ordering::Equal => best.push(c),
                    std::cmp::Ordering::Greater => {}
                },
            }
        }
        let winner = if best.len() == 1 {
            best[0]
        } else {
            best[rng.random_range(0..best.len())]
        };
        pool.push(winner);
    }
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::SeedSet;

    fn ov(s: f64, c: f64, t: f64) -> ObjectiveVector {
        ObjectiveVector::new(s, c, t)
    }

    fn ind(rank: usize, crowding: f64) -> Individual {
        Individual {
            seeds: SeedSet::singleton(rank),
            objectives: Some(ov(0.0, 0.0, 0.0)),
            rank,
            crowding,
        }
    }

    #[test]
    fn sort_basics() {
        assert_eq!(fast_nondominated_sort(&[ov(1.0, 1.0, 1.0)]), vec![vec![0]]);
        let chain = [ov(1.0, 3.0, 3.0), ov(3.0, 1.0, 1.0), ov(2.0, 2.0, 2.0)];
        assert_eq!(
            fast_nondominated_sort(&chain),
            vec![vec![1], vec![2], vec![0]]
        );
        assert!(fast_nondominated_sort(&[]).is_empty());
    }

    #[test]
    fn crowding_examples() {
        assert!(crowding_distance(&[ov(1.0, 1.0, 1.0), ov(2.0, 2.0, 2.0)])
            .iter()
            .all(|d| d.is_infinite()));
        // collinear in spread and cost, constant time
        let d = crowding_distance(&[ov(0.0, 0.0, 5.0), ov(-1.0, 1.0, 5.0), ov(-2.0, 2.0, 5.0)]);
        assert_eq!(d[1], 2.0);
        let same = crowding_distance(&[ov(1.0, 1.0, 1.0); 4]);
        assert_eq!(same.iter().filter(|d| d.is_infinite()).count(), 2);
        assert_eq!(same.iter().filter(|&&d| d == 0.0).count(), 2);
    }

    #[test]
    fn selection_truncates_by_crowding() {
        // five mutually non-dominated points on a line; keep 3 drops interior ones
        let pts: Vec<ObjectiveVector> = (0..5).map(|i| ov(i as f64, i as f64, 0.0)).collect();
        let mut with_tail = pts.clone();
        with_tail.push(ov(-1.0, 10.0, 1.0));
        assert_eq!(
            environmental_selection_indices(&with_tail, 5).unwrap(),
            vec![0, 1, 2, 3, 4]
        );
        let kept = environmental_selection_indices(&pts, 3).unwrap();
        assert!(kept.contains(&0) && kept.contains(&4));
        // interior distances tie at 1.0 each: earliest index wins
        assert_eq!(kept, vec![0, 1, 4]);
        assert!(environmental_selection_indices(&pts, 6).is_err());
    }

    #[test]
    fn copies_go_before_distinct_points() {
        // copies of an extreme point would outrank the interior point on crowding
        let pts = vec![
            ov(0.0, 0.0, 0.0),
            ov(0.0, 0.0, 0.0),
            ov(0.0, 0.0, 0.0),
            ov(1.0, 1.0, 0.0),
            ov(4.0, 4.0, 0.0),
        ];
        assert_eq!(
            environmental_selection_indices(&pts, 3).unwrap(),
            vec![0, 3, 4]
        );
    }

    #[test]
    fn tournament_rules() {
        let mut rng = seeded(0);
        let pop = vec![ind(0, 0.1), ind(2, f64::INFINITY)];
        let mut wins = [0usize; 2];
        for i in tournament_selection(&pop, 1000, 2, &mut rng).unwrap() {
            wins[i] += 1;
        }
        // rank 0 loses only when it is absent from the draw (p = 1/4)
        assert!((wins[0] as f64 - 750.0).abs() < 60.0, "{wins:?}");

        let pop = vec![ind(1, f64::INFINITY), ind(1, 0.3)];
        let picks = tournament_selection(&pop, 400, 2, &mut rng).unwrap();
        assert!(picks.iter().filter(|&&i| i == 0).count() > 250);

        let single = vec![ind(0, 1.0)];
        assert_eq!(
            tournament_selection(&single, 5, 2, &mut rng).unwrap(),
            vec![0; 5]
        );

        let raw = vec![Individual::new(SeedSet::singleton(0))];
        assert!(tournament_selection(&raw, 1, 2, &mut rng).is_err());
    }
}
