//! Attributions as weighted conjoined rankings.
//!
//! A local attribution is normalized to absolute-value percentages and paired
//! with an integer rank per feature (rank 1 = largest weight, ties resolved
//! toward the lower feature index). Two weighted rank distances compare such
//! rankings position by position:
//!
//! * weighted Kendall's Tau: `Σ_{i<j} w_i w_j · 1{(π_i − π_j)(σ_i − σ_j) < 0}`
//! * weighted Spearman's Rho squared: `Σ_i w_i (π_i − σ_i)²`
//!
//! where `w_i` is the product of feature `i`'s normalized weights in both
//! rankings. Both are pseudometrics: rankings in the same order are at
//! distance zero whatever their weights.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GamError, Result};

/// Below this feature count the literal pair loop beats the merge variant.
const MERGE_KENDALL_THRESHOLD: usize = 48;

/// Raw signed per-feature importances for one prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionVector {
    feature_names: Vec<String>,
    weights: Vec<f64>,
}

impl AttributionVector {
    pub fn new(feature_names: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if feature_names.len() != weights.len() {
            return Err(GamError::LengthMismatch {
                expected: feature_names.len(),
                found: weights.len(),
            });
        }
        if weights.len() < 2 {
            return Err(GamError::TooFewFeatures(weights.len()));
        }
        Ok(Self { feature_names, weights })
    }

    /// Builds a vector with generated names `f0, f1, ...`.
    pub fn unnamed(weights: Vec<f64>) -> Result<Self> {
        let names = (0..weights.len()).map(|i| format!("f{i}")).collect();
        Self::new(names, weights)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Normalized nonnegative weights summing to one, plus a rank per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedAttribution {
    weights: Vec<f64>,
    ranks: Vec<usize>,
}

impl RankedAttribution {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// 1-based ranks; `ranks()[i] == 1` marks the most important feature.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Index of the feature holding rank 1.
    pub fn top_feature(&self) -> usize {
        self.ranks
            .iter()
            .position(|&r| r == 1)
            .expect("ranks form a permutation of 1..=n")
    }
}

/// Which weighted rank distance to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Kendall,
    Spearman,
}

impl Metric {
    pub fn distance(self, a: &RankedAttribution, b: &RankedAttribution) -> Result<f64> {
        match self {
            Metric::Kendall => kendall_tau_distance(a, b),
            Metric::Spearman => spearman_rho_sq_distance(a, b),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Kendall => f.write_str("kendall"),
            Metric::Spearman => f.write_str("spearman"),
        }
    }
}

impl FromStr for Metric {
    type Err = GamError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kendall" => Ok(Metric::Kendall),
            "spearman" => Ok(Metric::Spearman),
            other => Err(GamError::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

/// Normalizes an attribution to absolute-value percentages and ranks it.
pub fn normalize(attr: &AttributionVector) -> Result<RankedAttribution> {
    normalize_weights(attr.weights())
}

/// [`normalize`] over a bare weight slice.
pub fn normalize_weights(raw: &[f64]) -> Result<RankedAttribution> {
    if raw.len() < 2 {
        return Err(GamError::TooFewFeatures(raw.len()));
    }
    if let Some(pos) = raw.iter().position(|w| !w.is_finite()) {
        return Err(GamError::InvalidConfig(format!(
            "attribution weight {pos} is not finite"
        )));
    }
    let total: f64 = raw.iter().map(|w| w.abs()).sum();
    if total == 0.0 {
        return Err(GamError::AllZeroAttribution);
    }
    let weights: Vec<f64> = raw.iter().map(|w| w.abs() / total).collect();
    let ranks = rank_descending(&weights);
    Ok(RankedAttribution { weights, ranks })
}

/// Rank 1 for the largest value; equal values keep feature order.
fn rank_descending(weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // stable sort keeps lower index first on ties
    order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]));
    let mut ranks = vec![0; weights.len()];
    for (pos, &feature) in order.iter().enumerate() {
        ranks[feature] = pos + 1;
    }
    ranks
}

fn check_conjoined(a: &RankedAttribution, b: &RankedAttribution) -> Result<()> {
    if a.len() != b.len() {
        return Err(GamError::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

fn joint_weights(a: &RankedAttribution, b: &RankedAttribution) -> Vec<f64> {
    a.weights.iter().zip(&b.weights).map(|(x, y)| x * y).collect()
}

/// Weighted Kendall's Tau distance between two conjoined rankings.
///
/// Dispatches to the literal pair loop for short rankings and to a weighted
/// merge-sort inversion count otherwise; both agree to rounding.
pub fn kendall_tau_distance(a: &RankedAttribution, b: &RankedAttribution) -> Result<f64> {
    check_conjoined(a, b)?;
    if a.len() < MERGE_KENDALL_THRESHOLD {
        Ok(kendall_pairs(a, b))
    } else {
        Ok(kendall_merge(a, b))
    }
}

/// The O(n²) reference: every pair `i < j` is visited once.
pub fn kendall_tau_distance_naive(a: &RankedAttribution, b: &RankedAttribution) -> Result<f64> {
    check_conjoined(a, b)?;
    Ok(kendall_pairs(a, b))
}

/// O(n log n) variant: weighted inversion count of `b`'s ranks read in `a`'s order.
pub fn kendall_tau_distance_merge(a: &RankedAttribution, b: &RankedAttribution) -> Result<f64> {
    check_conjoined(a, b)?;
    Ok(kendall_merge(a, b))
}

fn kendall_pairs(a: &RankedAttribution, b: &RankedAttribution) -> f64 {
    let w = joint_weights(a, b);
    let n = w.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = a.ranks[i] as i64 - a.ranks[j] as i64;
            let db = b.ranks[i] as i64 - b.ranks[j] as i64;
            if da * db < 0 {
                total += w[i] * w[j];
            }
        }
    }
    total
}

fn kendall_merge(a: &RankedAttribution, b: &RankedAttribution) -> f64 {
    let w = joint_weights(a, b);
    // features laid out by ascending rank in `a`
    let mut seq: Vec<(usize, f64)> = vec![(0, 0.0); w.len()];
    for (feature, &rank) in a.ranks.iter().enumerate() {
        seq[rank - 1] = (b.ranks[feature], w[feature]);
    }
    let mut scratch = seq.clone();
    weighted_inversions(&mut seq, &mut scratch)
}

/// Sorts `seq` by rank and returns `Σ w_p w_q` over inverted pairs `p < q`.
fn weighted_inversions(seq: &mut [(usize, f64)], scratch: &mut [(usize, f64)]) -> f64 {
    let n = seq.len();
    if n < 2 {
        return 0.0;
    }
    let mid = n / 2;
    let mut total = {
        let (left, right) = seq.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        weighted_inversions(left, sl) + weighted_inversions(right, sr)
    };

    // suffix sums of the left half's weights
    let mut suffix = vec![0.0; mid + 1];
    for p in (0..mid).rev() {
        suffix[p] = suffix[p + 1] + seq[p].1;
    }

    let (mut i, mut j, mut out) = (0, mid, 0);
    while i < mid && j < n {
        if seq[i].0 < seq[j].0 {
            scratch[out] = seq[i];
            i += 1;
        } else {
            // every remaining left element outranks seq[j]
            total += seq[j].1 * suffix[i];
            scratch[out] = seq[j];
            j += 1;
        }
        out += 1;
    }
    scratch[out..out + (mid - i)].copy_from_slice(&seq[i..mid]);
    out += mid - i;
    scratch[out..].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(scratch);
    total
}

/// Weighted Spearman's Rho squared distance between two conjoined rankings.
pub fn spearman_rho_sq_distance(a: &RankedAttribution, b: &RankedAttribution) -> Result<f64> {
    check_conjoined(a, b)?;
    Ok(a.weights
        .iter()
        .zip(&b.weights)
        .zip(a.ranks.iter().zip(&b.ranks))
        .map(|((wa, wb), (&ra, &rb))| {
            let d = ra as f64 - rb as f64;
            wa * wb * d * d
        })
        .sum())
}

/// Symmetric pairwise rank-distance matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from rows, checking shape, symmetry, zero diagonal and sign.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(GamError::EmptyInput("distance matrix has no rows"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(GamError::LengthMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        let m = Self { n, entries };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(GamError::InvalidConfig(format!(
                    "distance matrix diagonal entry {i} is nonzero"
                )));
            }
            for j in (i + 1)..n {
                let d = m.get(i, j);
                if !(d >= 0.0) || d != m.get(j, i) {
                    return Err(GamError::InvalidConfig(format!(
                        "distance matrix entry ({i}, {j}) is negative or asymmetric"
                    )));
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix by evaluating `f` on the upper triangle and mirroring it.
    pub fn from_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect())
            .collect();
        let mut entries = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (offset, d) in row.into_iter().enumerate() {
                let j = i + 1 + offset;
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n)
    }
}

/// Distance matrix over a set of ranked attributions.
pub fn pairwise_distances(attrs: &[RankedAttribution], metric: Metric) -> Result<DistanceMatrix> {
    let first = attrs
        .first()
        .ok_or(GamError::EmptyInput("no attributions to compare"))?;
    if attrs.len() < 2 {
        return Err(GamError::EmptyInput("need at least two attributions"));
    }
    if let Some(bad) = attrs.iter().find(|a| a.len() != first.len()) {
        return Err(GamError::LengthMismatch {
            expected: first.len(),
            found: bad.len(),
        });
    }
    Ok(DistanceMatrix::from_fn(attrs.len(), |i, j| {
        metric.distance(&attrs[i], &attrs[j]).expect("lengths checked above")
    }))
}
