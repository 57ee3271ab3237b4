//! End-to-end runs on the bundled problems: generate or load data, train a
//! network, explain it with LIME and map the attributions.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::data::{load_iris, synth_mixture, train_test_split, Dataset, Mixture, Split, SynthGroup};
use crate::error::{GamError, Result};
use crate::explain::{batch_explain, neutral_baseline, ExplainConfig, Method, TargetOutput};
use crate::gam::{fit_gam, GamConfig, GlobalAttributionMap, KChoice};
use crate::mlp::{train, Activation, LayerSpec, Loss, MlpModel, TrainConfig};
use crate::rank::{AttributionVector, Metric};
use crate::seed::derive_seed;

pub const SYNTHETIC_TRAIN_ROWS: usize = 10_000;
pub const SYNTHETIC_TEST_ROWS: usize = 2_000;
pub const IRIS_TEST_FRACTION: f64 = 0.25;
pub const IRIS_HIDDEN_WIDTH: usize = 8;
/// Grid points per feature when searching for a neutral reference input.
pub const NEUTRAL_GRID_RESOLUTION: usize = 201;
pub const NEUTRAL_TOLERANCE: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticVariant {
    /// Half the rows come from the group where feature A decides the class.
    Balanced,
    /// Three quarters of the rows come from that group.
    Unbalanced,
}

impl SyntheticVariant {
    pub fn fraction_a(self) -> f64 {
        match self {
            SyntheticVariant::Balanced => 0.5,
            SyntheticVariant::Unbalanced => 0.75,
        }
    }
}

impl fmt::Display for SyntheticVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticVariant::Balanced => "balanced",
            SyntheticVariant::Unbalanced => "unbalanced",
        })
    }
}

impl FromStr for SyntheticVariant {
    type Err = GamError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "balanced" => Ok(SyntheticVariant::Balanced),
            "unbalanced" => Ok(SyntheticVariant::Unbalanced),
            other => Err(GamError::InvalidConfig(format!("unknown variant {other:?}"))),
        }
    }
}

/// Every setting that shaped a run, with defaults resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    pub seed: u64,
    pub train_rows: usize,
    pub test_rows: usize,
    pub data_seeds: Vec<u64>,
    pub layers: Vec<LayerSpec>,
    pub train: TrainConfig,
    pub explain: ExplainConfig,
    pub gam: GamConfig,
}

/// One subpopulation as shown in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub size: usize,
    pub proportion: f64,
    pub medoid_sample_index: usize,
    pub medoid_weights: IndexMap<String, f64>,
    pub dominant_feature: String,
    /// Members per true label (group for synthetic data, species for Iris).
    pub composition: IndexMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub settings: ExperimentSettings,
    pub test_accuracy: f64,
    pub proportions: Vec<f64>,
    pub clusters: Vec<ClusterReport>,
    pub map: GlobalAttributionMap,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A finished run with the artifacts behind its report.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub model: MlpModel,
    pub train: Dataset,
    /// Rows that were explained.
    pub explained: Dataset,
    pub attributions: Vec<Vec<f64>>,
}

fn cluster_reports(map: &GlobalAttributionMap, labels: &[String]) -> Vec<ClusterReport> {
    let mut kinds: Vec<&String> = Vec::new();
    for l in labels {
        if !kinds.contains(&l) {
            kinds.push(l);
        }
    }
    kinds.sort();
    map.clusters
        .iter()
        .map(|c| {
            let mut composition: IndexMap<String, usize> = kinds.iter().map(|k| ((*k).clone(), 0)).collect();
            for &i in &c.member_sample_indices {
                composition[&labels[i]] += 1;
            }
            ClusterReport {
                size: c.size,
                proportion: c.explanatory_power,
                medoid_sample_index: c.medoid_sample_index,
                medoid_weights: c.medoid_weights.clone(),
                dominant_feature: c.dominant_feature().0.to_owned(),
                composition,
            }
        })
        .collect()
}

fn explain_and_map(
    model: &MlpModel,
    train_data: &Dataset,
    explained: &Dataset,
    explain: &ExplainConfig,
    gam: &GamConfig,
) -> Result<(Vec<Vec<f64>>, GlobalAttributionMap)> {
    let stats = train_data.stats()?;
    let attributions = batch_explain(model, &explained.features, explain, Some(&stats))?;
    let vectors = attributions
        .iter()
        .map(|w| AttributionVector::new(explained.feature_names.clone(), w.clone()))
        .collect::<Result<Vec<_>>>()?;
    let map = fit_gam(&vectors, gam)?;
    Ok((attributions, map))
}

/// Two-feature mixture: 10k training rows, a fresh 2k test set, a 4-unit
/// ReLU network with a sigmoid output, LIME on the test rows and K = 2.
pub fn pipeline_synthetic(variant: SyntheticVariant, seed: u64) -> Result<ExperimentRun> {
    let data_seeds = vec![derive_seed(seed, 1), derive_seed(seed, 2)];
    let layers = vec![
        LayerSpec::new(4, Activation::Relu),
        LayerSpec::new(1, Activation::Sigmoid),
    ];
    let train_config = TrainConfig {
        seed: derive_seed(seed, 3),
        loss: Loss::BinaryCrossEntropy,
        ..TrainConfig::default()
    };
    let explain = ExplainConfig {
        method: Method::Lime,
        seed: derive_seed(seed, 4),
        target_output: TargetOutput::Index(0),
        ..ExplainConfig::default()
    };
    let gam = GamConfig {
        metric: Metric::Kendall,
        k: KChoice::Fixed(2),
        seed,
        ..GamConfig::default()
    };

    let train_data = synth_mixture(SYNTHETIC_TRAIN_ROWS, variant.fraction_a(), data_seeds[0])?.dataset;
    let Mixture { dataset: test, groups } = synth_mixture(SYNTHETIC_TEST_ROWS, variant.fraction_a(), data_seeds[1])?;
    let model = train(&train_data, &layers, &train_config)?;
    let test_accuracy = model.accuracy(&test)?;
    let (attributions, map) = explain_and_map(&model, &train_data, &test, &explain, &gam)?;

    let group_names: Vec<String> = groups
        .iter()
        .map(|g| match g {
            SynthGroup::A => "group A".to_owned(),
            SynthGroup::B => "group B".to_owned(),
        })
        .collect();
    let clusters = cluster_reports(&map, &group_names);
    let report = ExperimentReport {
        experiment: format!("synthetic-{variant}"),
        settings: ExperimentSettings {
            seed,
            train_rows: train_data.len(),
            test_rows: test.len(),
            data_seeds,
            layers,
            train: train_config,
            explain,
            gam,
        },
        test_accuracy,
        proportions: map.clusters.iter().map(|c| c.explanatory_power).collect(),
        clusters,
        map,
    };
    Ok(ExperimentRun {
        report,
        model,
        train: train_data,
        explained: test,
        attributions,
    })
}

/// Iris: stratified 75/25 split, two hidden ReLU layers with a softmax
/// output, LIME on all 150 flowers for the predicted class, K picked by
/// silhouette over 2..=4.
pub fn pipeline_iris(seed: u64) -> Result<ExperimentRun> {
    let iris = load_iris();
    let split_seed = derive_seed(seed, 1);
    let layers = vec![
        LayerSpec::new(IRIS_HIDDEN_WIDTH, Activation::Relu),
        LayerSpec::new(IRIS_HIDDEN_WIDTH, Activation::Relu),
        LayerSpec::new(iris.n_classes(), Activation::Softmax),
    ];
    let train_config = TrainConfig {
        seed: derive_seed(seed, 3),
        loss: Loss::CategoricalCrossEntropy,
        ..TrainConfig::default()
    };
    let explain = ExplainConfig {
        method: Method::Lime,
        seed: derive_seed(seed, 4),
        target_output: TargetOutput::PREDICTED,
        ..ExplainConfig::default()
    };
    let gam = GamConfig {
        metric: Metric::Kendall,
        k: KChoice::Auto { k_min: 2, k_max: 4 },
        seed,
        ..GamConfig::default()
    };

    let Split {
        train: train_data,
        test,
        ..
    } = train_test_split(&iris, IRIS_TEST_FRACTION, split_seed)?;
    let model = train(&train_data, &layers, &train_config)?;
    let test_accuracy = model.accuracy(&test)?;
    let (attributions, map) = explain_and_map(&model, &train_data, &iris, &explain, &gam)?;

    let species: Vec<String> = iris.labels.iter().map(|&l| iris.class_names[l].clone()).collect();
    let clusters = cluster_reports(&map, &species);
    let report = ExperimentReport {
        experiment: "iris".to_owned(),
        settings: ExperimentSettings {
            seed,
            train_rows: train_data.len(),
            test_rows: test.len(),
            data_seeds: vec![split_seed],
            layers,
            train: train_config,
            explain,
            gam,
        },
        test_accuracy,
        proportions: map.clusters.iter().map(|c| c.explanatory_power).collect(),
        clusters,
        map,
    };
    Ok(ExperimentRun {
        report,
        model,
        train: train_data,
        explained: iris,
        attributions,
    })
}

/// Reference input whose sigmoid output is within the tolerance of 0.5,
/// found on a grid over the training ranges.
pub fn synthetic_neutral_baseline(model: &MlpModel, train_data: &Dataset) -> Result<Vec<f64>> {
    neutral_baseline(
        model,
        &train_data.ranges()?,
        NEUTRAL_GRID_RESOLUTION,
        0,
        0.5,
        NEUTRAL_TOLERANCE,
    )
}
