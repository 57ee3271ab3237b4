//! K-medoids over a precomputed rank-distance matrix, silhouette scoring and
//! choice of K.
//!
//! The clustering alternates two steps until the assignment stops changing:
//! every point joins its nearest medoid, then every cluster elects the member
//! with the smallest summed distance to the rest of the cluster. A settled
//! state is then polished with single medoid swaps, which escapes the shallow
//! local optima the alternation alone stops in. Equal-cost medoid candidates
//! can be separated by an optional secondary dissimilarity; every remaining tie
//! resolves toward the lowest index so runs are reproducible across platforms.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GamError, Result};
use crate::rank::DistanceMatrix;
use crate::seed::{derive_seed, rng};

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_RESTARTS: usize = 10;

/// Outcome of one K-medoids run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub k: usize,
    pub seed: u64,
    pub medoid_indices: Vec<usize>,
    /// Position in `medoid_indices` for every point.
    pub assignment: Vec<usize>,
    pub cost: f64,
    /// Update rounds plus swap rounds.
    pub iterations_run: usize,
    /// Medoid swaps applied after the alternation settled.
    pub swaps: usize,
    pub converged: bool,
    /// Cost after the initial assignment and after every update round.
    pub cost_history: Vec<f64>,
}

impl ClusteringResult {
    /// Sample indices of every cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        group_members(&self.assignment, self.k)
    }
}

fn group_members(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        groups[c].push(i);
    }
    groups
}

/// Picks `k` distinct starting medoids uniformly at random.
pub fn init_medoids(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(n, k)?;
    let mut rng = rng(seed);
    Ok(index::sample(&mut rng, n, k).into_vec())
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(GamError::KZero);
    }
    if k > n {
        return Err(GamError::KTooLarge { k, n });
    }
    Ok(())
}

fn check_medoids(d: &DistanceMatrix, medoids: &[usize]) -> Result<()> {
    if medoids.is_empty() {
        return Err(GamError::KZero);
    }
    for (pos, &m) in medoids.iter().enumerate() {
        if m >= d.n() || medoids[..pos].contains(&m) {
            return Err(GamError::InvalidMedoidIndex { index: m, n: d.n() });
        }
    }
    Ok(())
}

/// Nearest-medoid assignment. Ties go to the earliest medoid in the list,
/// except that a medoid always belongs to its own cluster.
pub fn assign_clusters(d: &DistanceMatrix, medoids: &[usize]) -> Result<Vec<usize>> {
    check_medoids(d, medoids)?;
    Ok(assign_unchecked(d, medoids))
}

fn assign_unchecked(d: &DistanceMatrix, medoids: &[usize]) -> Vec<usize> {
    (0..d.n())
        .map(|i| {
            if let Some(own) = medoids.iter().position(|&m| m == i) {
                return own;
            }
            let row = d.row(i);
            let mut best = 0;
            for (pos, &m) in medoids.iter().enumerate().skip(1) {
                if row[m] < row[medoids[best]] {
                    best = pos;
                }
            }
            best
        })
        .collect()
}

/// Secondary dissimilarity between two points, consulted only to choose among
/// medoid candidates of exactly equal cost.
pub type TieBreak<'a> = &'a (dyn Fn(usize, usize) -> f64 + Sync);

/// Member minimizing the summed distance to all members; ties to the lowest index.
pub fn update_medoid(d: &DistanceMatrix, members: &[usize]) -> Result<usize> {
    update_medoid_with(d, members, None)
}

/// [`update_medoid`] where equal-cost candidates are first separated by their
/// summed `tie_break` dissimilarity to the members.
pub fn update_medoid_with(d: &DistanceMatrix, members: &[usize], tie_break: Option<TieBreak<'_>>) -> Result<usize> {
    if members.is_empty() {
        return Err(GamError::EmptyCluster);
    }
    if let Some(&bad) = members.iter().find(|&&m| m >= d.n()) {
        return Err(GamError::InvalidMedoidIndex { index: bad, n: d.n() });
    }
    let totals: Vec<f64> = members
        .iter()
        .map(|&c| {
            let row = d.row(c);
            members.iter().map(|&j| row[j]).sum()
        })
        .collect();
    let lowest = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let mut tied: Vec<usize> = members
        .iter()
        .zip(&totals)
        .filter(|&(_, &t)| t == lowest)
        .map(|(&c, _)| c)
        .collect();
    tied.sort_unstable();
    let Some(secondary) = tie_break.filter(|_| tied.len() > 1) else {
        return Ok(tied[0]);
    };
    let mut best = (tied[0], f64::INFINITY);
    for &c in &tied {
        let total: f64 = members.iter().map(|&j| secondary(c, j)).sum();
        if total < best.1 {
            best = (c, total);
        }
    }
    Ok(best.0)
}

fn assignment_cost(d: &DistanceMatrix, medoids: &[usize], assignment: &[usize]) -> f64 {
    assignment.iter().enumerate().map(|(i, &c)| d.get(i, medoids[c])).sum()
}

/// One seeded K-medoids run.
///
/// Alternates assignment and medoid updates until the assignment repeats.
/// The converged state is then polished with single medoid swaps: the swap
/// that lowers the cost the most is applied and the alternation resumes,
/// until no swap helps or `max_iter` rounds have been spent.
pub fn fit_kmedoids(d: &DistanceMatrix, k: usize, seed: u64, max_iter: usize) -> Result<ClusteringResult> {
    fit_kmedoids_with(d, k, seed, max_iter, None)
}

/// [`fit_kmedoids`] with a secondary medoid tie-break.
pub fn fit_kmedoids_with(
    d: &DistanceMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    tie_break: Option<TieBreak<'_>>,
) -> Result<ClusteringResult> {
    if max_iter == 0 {
        return Err(GamError::InvalidConfig("max_iter must be at least 1".into()));
    }
    let mut medoids = init_medoids(d.n(), k, seed)?;
    let mut assignment = assign_unchecked(d, &medoids);
    let mut cost_history = vec![assignment_cost(d, &medoids, &assignment)];
    let mut iterations_run = 0;
    let mut swaps = 0;
    let mut converged = false;

    while iterations_run < max_iter {
        iterations_run += 1;
        let next_medoids: Vec<usize> = group_members(&assignment, k)
            .iter()
            .map(|members| update_medoid_with(d, members, tie_break))
            .collect::<Result<_>>()?;
        let next_assignment = assign_unchecked(d, &next_medoids);
        cost_history.push(assignment_cost(d, &next_medoids, &next_assignment));
        medoids = next_medoids;
        if next_assignment != assignment {
            assignment = next_assignment;
            continue;
        }
        match best_swap(d, &medoids) {
            Some((pos, candidate)) if iterations_run < max_iter => {
                iterations_run += 1;
                swaps += 1;
                medoids[pos] = candidate;
                assignment = assign_unchecked(d, &medoids);
                cost_history.push(assignment_cost(d, &medoids, &assignment));
            }
            Some(_) => break,
            None => {
                converged = true;
                break;
            }
        }
    }

    Ok(ClusteringResult {
        k,
        seed,
        cost: *cost_history.last().expect("history starts nonempty"),
        medoid_indices: medoids,
        assignment,
        iterations_run,
        swaps,
        converged,
        cost_history,
    })
}

/// Relative improvement a swap must achieve to be taken.
const SWAP_TOLERANCE: f64 = 1e-12;

/// Most cost-reducing `(medoid position, replacement)` swap, if any.
fn best_swap(d: &DistanceMatrix, medoids: &[usize]) -> Option<(usize, usize)> {
    let n = d.n();
    // nearest and second-nearest medoid distance per point
    let mut nearest = vec![(0usize, f64::INFINITY); n];
    let mut second = vec![f64::INFINITY; n];
    for i in 0..n {
        let row = d.row(i);
        for (pos, &m) in medoids.iter().enumerate() {
            let dm = row[m];
            if dm < nearest[i].1 {
                second[i] = nearest[i].1;
                nearest[i] = (pos, dm);
            } else if dm < second[i] {
                second[i] = dm;
            }
        }
    }
    let current: f64 = nearest.iter().map(|&(_, dn)| dn).sum();
    let threshold = SWAP_TOLERANCE * current.max(f64::MIN_POSITIVE);

    let candidates: Vec<(usize, usize, f64)> = (0..n)
        .into_par_iter()
        .filter(|h| !medoids.contains(h))
        .flat_map_iter(|h| {
            let nearest = &nearest;
            let second = &second;
            (0..medoids.len()).map(move |pos| {
                let mut delta = 0.0;
                for i in 0..n {
                    let dh = d.get(i, h);
                    let (own, dn) = nearest[i];
                    delta += if own == pos {
                        dh.min(second[i]) - dn
                    } else {
                        dh.min(dn) - dn
                    };
                }
                (pos, h, delta)
            })
        })
        .collect();

    candidates
        .into_iter()
        .filter(|&(_, _, delta)| delta < -threshold)
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)))
        .map(|(pos, h, _)| (pos, h))
}

/// Runs `restarts` seeded fits (seeds derived from `seed`) and keeps the
/// cheapest; equal costs keep the earlier restart.
pub fn fit_best_of(
    d: &DistanceMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> Result<ClusteringResult> {
    fit_best_of_with(d, k, seed, restarts, max_iter, None)
}

/// [`fit_best_of`] with a secondary medoid tie-break.
pub fn fit_best_of_with(
    d: &DistanceMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    tie_break: Option<TieBreak<'_>>,
) -> Result<ClusteringResult> {
    if restarts == 0 {
        return Err(GamError::InvalidConfig("restarts must be at least 1".into()));
    }
    let runs: Vec<ClusteringResult> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| fit_kmedoids_with(d, k, derive_seed(seed, r), max_iter, tie_break))
        .collect::<Result<_>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, run| if run.cost < best.cost { run } else { best })
        .expect("restarts >= 1"))
}

/// Per-point silhouette values and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteReport {
    pub per_point: Vec<f64>,
    pub mean: f64,
}

/// Silhouette `(b − a) / max(a, b)` of every point; singleton clusters score 0.
pub fn silhouette(d: &DistanceMatrix, assignment: &[usize]) -> Result<SilhouetteReport> {
    if assignment.len() != d.n() {
        return Err(GamError::LengthMismatch {
            expected: d.n(),
            found: assignment.len(),
        });
    }
    let labels = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut sizes = vec![0usize; labels];
    for &c in assignment {
        sizes[c] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(GamError::SingleCluster);
    }

    let per_point: Vec<f64> = (0..d.n())
        .into_par_iter()
        .map(|i| {
            let own = assignment[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; labels];
            for (j, &dij) in d.row(i).iter().enumerate() {
                sums[assignment[j]] += dij;
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..labels)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let scale = a.max(b);
            if scale > 0.0 {
                (b - a) / scale
            } else {
                0.0
            }
        })
        .collect();
    let mean = per_point.iter().sum::<f64>() / per_point.len() as f64;
    Ok(SilhouetteReport { per_point, mean })
}

/// Score of one candidate K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KScore {
    pub k: usize,
    pub silhouette: f64,
    pub cost: f64,
}

/// Silhouette sweep over a range of K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelection {
    pub k: usize,
    pub scores: Vec<KScore>,
    /// Best clustering at the selected K.
    pub clustering: ClusteringResult,
}

/// Clusters at every K in `k_min..=k_max` (best of `restarts`) and keeps the
/// K with the highest mean silhouette; ties prefer the smaller K.
pub fn select_k(
    d: &DistanceMatrix,
    k_min: usize,
    k_max: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> Result<KSelection> {
    select_k_with(d, k_min, k_max, seed, restarts, max_iter, None)
}

/// [`select_k`] with a secondary medoid tie-break.
pub fn select_k_with(
    d: &DistanceMatrix,
    k_min: usize,
    k_max: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    tie_break: Option<TieBreak<'_>>,
) -> Result<KSelection> {
    if k_min < 2 || k_min > k_max {
        return Err(GamError::InvalidConfig(format!(
            "K range {k_min}..={k_max} must satisfy 2 <= k_min <= k_max"
        )));
    }
    if k_max + 1 > d.n() {
        return Err(GamError::KTooLarge { k: k_max, n: d.n() });
    }
    let fits: Vec<(ClusteringResult, f64)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let fit = fit_best_of_with(d, k, seed, restarts, max_iter, tie_break)?;
            let score = silhouette(d, &fit.assignment)?.mean;
            Ok((fit, score))
        })
        .collect::<Result<_>>()?;

    let scores = fits
        .iter()
        .map(|(fit, s)| KScore {
            k: fit.k,
            silhouette: *s,
            cost: fit.cost,
        })
        .collect();
    let (clustering, _) = fits
        .into_iter()
        .reduce(|best, cur| if cur.1 > best.1 { cur } else { best })
        .expect("K range is nonempty");
    Ok(KSelection {
        k: clustering.k,
        scores,
        clustering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(sizes: &[usize], within: f64, across: f64) -> DistanceMatrix {
        let label: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
            .collect();
        DistanceMatrix::from_fn(label.len(), |i, j| if label[i] == label[j] { within } else { across })
    }

    #[test]
    fn init_examples() {
        let mut all = init_medoids(5, 5, 3).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
        assert_eq!(init_medoids(100, 3, 7).unwrap(), init_medoids(100, 3, 7).unwrap());
        assert!(matches!(init_medoids(3, 4, 0), Err(GamError::KTooLarge { .. })));
        assert!(matches!(init_medoids(3, 0, 0), Err(GamError::KZero)));
    }

    #[test]
    fn init_regression_values() {
        // pinned from this generator; guards against silent RNG changes
        let a = init_medoids(100, 3, 7).unwrap();
        let b = init_medoids(100, 3, 8).unwrap();
        assert_eq!(a, init_medoids(100, 3, 7).unwrap());
        assert_eq!(a.len(), 3);
        assert_eq!(b.len(), 3);
        assert_eq!(a, PINNED_SEED_7);
        assert_eq!(b, PINNED_SEED_8);
    }

    const PINNED_SEED_7: [usize; 3] = [13, 15, 18];
    const PINNED_SEED_8: [usize; 3] = [28, 7, 12];

    #[test]
    fn assign_ties_and_argmin() {
        let d = DistanceMatrix::from_fn(4, |_, _| 1.0);
        assert_eq!(assign_clusters(&d, &[1, 3]).unwrap(), vec![0, 0, 0, 1]);

        let d = DistanceMatrix::from_rows(vec![
            vec![0.0, 0.5, 0.1, 0.9],
            vec![0.5, 0.0, 0.3, 0.4],
            vec![0.1, 0.3, 0.0, 0.2],
            vec![0.9, 0.4, 0.2, 0.0],
        ])
        .unwrap();
        assert_eq!(assign_clusters(&d, &[0, 1]).unwrap()[2], 0);
        assert!(matches!(
            assign_clusters(&d, &[0, 9]),
            Err(GamError::InvalidMedoidIndex { .. })
        ));
        assert!(assign_clusters(&d, &[1, 1]).is_err());
    }

    #[test]
    fn assign_hand_blocks() {
        // rows 0..3 and 3..6 form two blocks; medoids 1 and 4
        let d = blocks(&[3, 3], 0.1, 0.8);
        assert_eq!(assign_clusters(&d, &[4, 1]).unwrap(), vec![1, 1, 1, 0, 0, 0]);
    }

    #[test]
    fn update_examples() {
        let d = blocks(&[4], 0.0, 1.0);
        assert_eq!(update_medoid(&d, &[2]).unwrap(), 2);
        assert_eq!(update_medoid(&d, &[3, 1, 2]).unwrap(), 1);
        assert!(matches!(update_medoid(&d, &[]), Err(GamError::EmptyCluster)));

        let d = DistanceMatrix::from_rows(vec![
            vec![0.0, 0.2, 0.6, 0.5],
            vec![0.2, 0.0, 0.3, 0.4],
            vec![0.6, 0.3, 0.0, 0.1],
            vec![0.5, 0.4, 0.1, 0.0],
        ])
        .unwrap();
        // candidate sums: 1.3, 0.9, 1.0, 1.0
        let sums: Vec<f64> = (0..4).map(|m| (0..4).map(|j| d.get(j, m)).sum()).collect();
        let oracle = (0..4).min_by(|&a, &b| sums[a].partial_cmp(&sums[b]).unwrap()).unwrap();
        assert_eq!(oracle, 1);
        assert_eq!(update_medoid(&d, &[0, 1, 2, 3]).unwrap(), oracle);
    }

    #[test]
    fn tie_break_only_between_equal_costs() {
        let zero = DistanceMatrix::from_fn(4, |_, _| 0.0);
        let points: [f64; 4] = [0.0, 10.0, 4.0, 5.0];
        let gap = |i: usize, j: usize| (points[i] - points[j]).abs();
        // secondary sums: 19, 21, 11, 11
        assert_eq!(update_medoid(&zero, &[0, 1, 2, 3]).unwrap(), 0);
        assert_eq!(update_medoid_with(&zero, &[0, 1, 2, 3], Some(&gap)).unwrap(), 2);
        assert_eq!(update_medoid_with(&zero, &[3, 1, 2, 0], Some(&gap)).unwrap(), 2);

        let d = DistanceMatrix::from_rows(vec![
            vec![0.0, 0.2, 0.6, 0.5],
            vec![0.2, 0.0, 0.3, 0.4],
            vec![0.6, 0.3, 0.0, 0.1],
            vec![0.5, 0.4, 0.1, 0.0],
        ])
        .unwrap();
        assert_eq!(update_medoid_with(&d, &[0, 1, 2, 3], Some(&gap)).unwrap(), 1);
    }

    #[test]
    fn tie_break_keeps_cost() {
        let d = blocks(&[5, 5], 0.0, 1.0);
        let gap = |i: usize, j: usize| (i as f64 - j as f64).abs();
        let plain = fit_best_of(&d, 2, 3, 4, DEFAULT_MAX_ITER).unwrap();
        let broken = fit_best_of_with(&d, 2, 3, 4, DEFAULT_MAX_ITER, Some(&gap)).unwrap();
        assert_eq!(plain.cost, broken.cost);
        assert_eq!(plain.assignment, broken.assignment);
        let mut medoids = broken.medoid_indices.clone();
        medoids.sort_unstable();
        assert_eq!(medoids, vec![2, 7]);
    }

    #[test]
    fn fit_degenerate_and_blocks() {
        let zero = DistanceMatrix::from_fn(6, |_, _| 0.0);
        let r = fit_kmedoids(&zero, 2, 11, 100).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.iterations_run <= 2 && r.converged);

        let d = blocks(&[3, 3], 0.01, 1.0);
        let r = fit_best_of(&d, 2, 5, DEFAULT_RESTARTS, DEFAULT_MAX_ITER).unwrap();
        assert!(r.cost <= 0.06 + 1e-12);
        assert_eq!(r.assignment[0], r.assignment[1]);
        assert_eq!(r.assignment[1], r.assignment[2]);
        assert_eq!(r.assignment[3], r.assignment[4]);
        assert_ne!(r.assignment[0], r.assignment[3]);
        assert_eq!(r, fit_best_of(&d, 2, 5, DEFAULT_RESTARTS, DEFAULT_MAX_ITER).unwrap());

        assert!(matches!(fit_kmedoids(&d, 0, 1, 10), Err(GamError::KZero)));
        assert!(matches!(fit_kmedoids(&d, 7, 1, 10), Err(GamError::KTooLarge { .. })));
    }

    #[test]
    fn converged_state_is_fixed_point() {
        let d = DistanceMatrix::from_fn(12, |i, j| ((i * 7 + j * 3) % 5) as f64 + (i as f64 - j as f64).abs());
        let r = fit_kmedoids(&d, 3, 9, 100).unwrap();
        assert!(r.converged);
        assert_eq!(assign_clusters(&d, &r.medoid_indices).unwrap(), r.assignment);
        for (c, members) in r.members().iter().enumerate() {
            assert_eq!(update_medoid(&d, members).unwrap(), r.medoid_indices[c]);
        }
    }

    #[test]
    fn silhouette_examples() {
        let d = blocks(&[3, 3], 0.0, 1.0);
        let s = silhouette(&d, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!(s.per_point.iter().all(|&v| v == 1.0));
        assert_eq!(s.mean, 1.0);

        let d = blocks(&[6], 0.7, 0.7);
        let s = silhouette(&d, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!(s.per_point.iter().all(|&v| v.abs() < 1e-12));

        assert!(matches!(
            silhouette(&d, &[1, 1, 1, 1, 1, 1]),
            Err(GamError::SingleCluster)
        ));
        let s = silhouette(&d, &[0, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!(s.per_point[0], 0.0);
    }

    #[test]
    fn silhouette_hand_matrix() {
        // points on a line: 0, 1, 2, 10, 11, 13
        let x = [0.0, 1.0, 2.0, 10.0, 11.0, 13.0];
        let d = DistanceMatrix::from_fn(6, |i, j| f64::abs(x[i] - x[j]));
        let s = silhouette(&d, &[0, 0, 0, 1, 1, 1]).unwrap();
        // point 0: a = (1 + 2) / 2, b = (10 + 11 + 13) / 3
        let expect0 = (34.0 / 3.0 - 1.5) / (34.0 / 3.0);
        // point 5: a = (3 + 2) / 2, b = (13 + 12 + 11) / 3
        let expect5 = (12.0 - 2.5) / 12.0;
        // point 3: a = (1 + 3) / 2, b = (10 + 9 + 8) / 3
        let expect3 = (9.0 - 2.0) / 9.0;
        assert!((s.per_point[0] - expect0).abs() < 1e-12);
        assert!((s.per_point[5] - expect5).abs() < 1e-12);
        assert!((s.per_point[3] - expect3).abs() < 1e-12);
        let mean = s.per_point.iter().sum::<f64>() / 6.0;
        assert!((s.mean - mean).abs() < 1e-12);
    }

    #[test]
    fn select_k_finds_blocks() {
        let d = blocks(&[4, 5], 0.0, 1.0);
        let sel = select_k(&d, 2, 4, 1, 10, 100).unwrap();
        assert_eq!(sel.k, 2);
        assert_eq!(sel.scores.len(), 3);

        let d = blocks(&[4, 3, 5], 0.0, 1.0);
        let sel = select_k(&d, 2, 4, 1, 10, 100).unwrap();
        assert_eq!(sel.k, 3);
        assert_eq!(sel.scores[1].silhouette, 1.0);

        assert!(select_k(&d, 1, 3, 1, 10, 100).is_err());
        assert!(select_k(&d, 2, 12, 1, 10, 100).is_err());
    }
}
