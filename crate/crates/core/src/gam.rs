//! Global attribution maps.
//!
//! Local attributions are normalized into weighted rankings, compared
//! pairwise under a rank distance and grouped with K-medoids. Each group is
//! summarized by its medoid attribution, the share of samples it covers and
//! the samples themselves, so every global explanation traces back to rows.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::cluster::{
    fit_best_of_with, select_k_with, silhouette, KScore, TieBreak, DEFAULT_MAX_ITER, DEFAULT_RESTARTS,
};
use crate::error::{GamError, Result};
use crate::rank::{normalize, normalize_weights, pairwise_distances, AttributionVector, Metric, RankedAttribution};

pub const DEFAULT_AUTO_K_MIN: usize = 2;
pub const DEFAULT_AUTO_K_MAX: usize = 8;

/// Number of subpopulations: fixed, or chosen by silhouette within a range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KChoice {
    Fixed(usize),
    Auto { k_min: usize, k_max: usize },
}

impl Default for KChoice {
    fn default() -> Self {
        KChoice::Auto {
            k_min: DEFAULT_AUTO_K_MIN,
            k_max: DEFAULT_AUTO_K_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GamConfig {
    pub metric: Metric,
    pub k: KChoice,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for GamConfig {
    fn default() -> Self {
        Self {
            metric: Metric::Kendall,
            k: KChoice::default(),
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl GamConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k: KChoice::Fixed(k),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.k {
            KChoice::Fixed(0) => return Err(GamError::KZero),
            KChoice::Auto { k_min, k_max } if k_min < 2 || k_max < k_min => {
                return Err(GamError::InvalidConfig(format!(
                    "automatic K range {k_min}..={k_max} must satisfy 2 <= min <= max"
                )))
            }
            _ => {}
        }
        if self.restarts == 0 || self.max_iter == 0 {
            return Err(GamError::InvalidConfig("restarts and max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// One global explanation: a medoid attribution and the samples it stands for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subpopulation {
    pub size: usize,
    /// Share of all samples in this subpopulation.
    pub explanatory_power: f64,
    pub medoid_sample_index: usize,
    /// Normalized importance of each feature in the medoid.
    pub medoid_weights: IndexMap<String, f64>,
    /// The medoid's attribution as supplied, signs included.
    pub medoid_raw_weights: IndexMap<String, f64>,
    pub member_sample_indices: Vec<usize>,
    /// Summed distance of the members to the medoid.
    pub cost: f64,
}

impl Subpopulation {
    pub fn medoid_attribution(&self) -> Result<RankedAttribution> {
        let raw: Vec<f64> = self.medoid_raw_weights.values().copied().collect();
        normalize_weights(&raw)
    }

    /// Feature with the largest normalized weight.
    pub fn dominant_feature(&self) -> (&str, f64) {
        self.medoid_weights
            .iter()
            .fold(None, |best: Option<(&str, f64)>, (name, &w)| match best {
                Some((_, bw)) if bw >= w => best,
                _ => Some((name.as_str(), w)),
            })
            .expect("attributions have at least two features")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalAttributionMap {
    pub config: GamConfig,
    pub k: usize,
    /// Absent for a single cluster, where the score is undefined.
    pub silhouette_mean: Option<f64>,
    pub cost: f64,
    /// Silhouette for every candidate K when K was chosen automatically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_scores: Option<Vec<KScore>>,
    /// Largest first; equal sizes ordered by medoid index.
    pub clusters: Vec<Subpopulation>,
}

impl GlobalAttributionMap {
    pub fn n_samples(&self) -> usize {
        self.clusters.iter().map(|c| c.size).sum()
    }

    /// Position in `clusters` of every sample.
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.n_samples()];
        for (c, cluster) in self.clusters.iter().enumerate() {
            for &i in &cluster.member_sample_indices {
                out[i] = c;
            }
        }
        out
    }

    pub fn medoid_sample_indices(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.medoid_sample_index).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// L1 gap between normalized weight vectors; separates medoid candidates
/// whose rank distances tie.
pub fn weight_l1(a: &RankedAttribution, b: &RankedAttribution) -> f64 {
    a.weights().iter().zip(b.weights()).map(|(x, y)| (x - y).abs()).sum()
}

/// Normalizes, compares and clusters `attributions` into a global map.
pub fn fit_gam(attributions: &[AttributionVector], config: &GamConfig) -> Result<GlobalAttributionMap> {
    config.validate()?;
    let first = attributions
        .first()
        .ok_or(GamError::EmptyInput("no attributions to map"))?;
    if attributions.len() < 2 {
        return Err(GamError::EmptyInput("need at least two attributions"));
    }
    let names = first.feature_names();
    if let Some(bad) = attributions.iter().find(|a| a.len() != names.len()) {
        return Err(GamError::LengthMismatch {
            expected: names.len(),
            found: bad.len(),
        });
    }
    if attributions.iter().any(|a| a.feature_names() != names) {
        return Err(GamError::ShapeMismatch(
            "attributions do not share one feature list".into(),
        ));
    }

    let ranked = attributions.iter().map(normalize).collect::<Result<Vec<_>>>()?;
    let d = pairwise_distances(&ranked, config.metric)?;
    let n = d.n();
    let weight_gap = |i: usize, j: usize| weight_l1(&ranked[i], &ranked[j]);
    let tie_break: Option<TieBreak<'_>> = Some(&weight_gap);

    let (clustering, k_scores) = match config.k {
        KChoice::Fixed(k) => (
            fit_best_of_with(&d, k, config.seed, config.restarts, config.max_iter, tie_break)?,
            None,
        ),
        KChoice::Auto { k_min, k_max } => {
            let k_max = k_max.min(n - 1);
            if k_min > k_max {
                return Err(GamError::KTooLarge { k: k_min, n });
            }
            let selection = select_k_with(
                &d,
                k_min,
                k_max,
                config.seed,
                config.restarts,
                config.max_iter,
                tie_break,
            )?;
            (selection.clustering, Some(selection.scores))
        }
    };
    let silhouette_mean = if clustering.k >= 2 {
        Some(silhouette(&d, &clustering.assignment)?.mean)
    } else {
        None
    };

    let mut clusters: Vec<Subpopulation> = clustering
        .members()
        .into_iter()
        .zip(&clustering.medoid_indices)
        .map(|(members, &medoid)| {
            let named = |values: &[f64]| -> IndexMap<String, f64> {
                names.iter().cloned().zip(values.iter().copied()).collect()
            };
            Subpopulation {
                size: members.len(),
                explanatory_power: members.len() as f64 / n as f64,
                medoid_sample_index: medoid,
                medoid_weights: named(ranked[medoid].weights()),
                medoid_raw_weights: named(attributions[medoid].weights()),
                cost: members.iter().map(|&i| d.get(i, medoid)).sum(),
                member_sample_indices: members,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.size
            .cmp(&a.size)
            .then(a.medoid_sample_index.cmp(&b.medoid_sample_index))
    });

    Ok(GlobalAttributionMap {
        config: config.clone(),
        k: clustering.k,
        silhouette_mean,
        cost: clustering.cost,
        k_scores,
        clusters,
    })
}

/// Per-feature statistics of the raw rows in one subpopulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubpopulationSummary {
    pub cluster: usize,
    pub size: usize,
    pub mean: Vec<f64>,
    /// Population standard deviation.
    pub std: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Summary statistics of `features` (one row per mapped sample) per cluster.
pub fn subpopulation_summary(map: &GlobalAttributionMap, features: &[Vec<f64>]) -> Result<Vec<SubpopulationSummary>> {
    if features.len() != map.n_samples() {
        return Err(GamError::RowCountMismatch {
            expected: map.n_samples(),
            found: features.len(),
        });
    }
    let width = features.first().map_or(0, Vec::len);
    if let Some(bad) = features.iter().find(|r| r.len() != width) {
        return Err(GamError::LengthMismatch {
            expected: width,
            found: bad.len(),
        });
    }
    Ok(map
        .clusters
        .iter()
        .enumerate()
        .map(|(c, cluster)| {
            let rows: Vec<&Vec<f64>> = cluster.member_sample_indices.iter().map(|&i| &features[i]).collect();
            let count = rows.len() as f64;
            let column = |j: usize| rows.iter().map(move |r| r[j]);
            let mean: Vec<f64> = (0..width).map(|j| column(j).sum::<f64>() / count).collect();
            let std = (0..width)
                .map(|j| (column(j).map(|v| (v - mean[j]).powi(2)).sum::<f64>() / count).sqrt())
                .collect();
            SubpopulationSummary {
                cluster: c,
                size: cluster.size,
                min: (0..width).map(|j| column(j).fold(f64::INFINITY, f64::min)).collect(),
                max: (0..width)
                    .map(|j| column(j).fold(f64::NEG_INFINITY, f64::max))
                    .collect(),
                mean,
                std,
            }
        })
        .collect())
}
