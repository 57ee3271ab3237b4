//! Local attribution methods over an [`MlpModel`]: Integrated Gradients,
//! DeepLIFT (Rescale) and LIME-tabular, plus a batch driver.

mod deeplift;
mod ig;
mod lime;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use deeplift::{deeplift_rescale, explained_score};
pub use ig::integrated_gradients;
pub use lime::{default_kernel_width, lime_tabular, weighted_ridge, LimeExplanation, LimeSettings};

use crate::data::{Dataset, FeatureStats};
use crate::error::{GamError, Result};
use crate::mlp::{argmax, MlpModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lime,
    IntegratedGradients,
    Deeplift,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Lime => "lime",
            Method::IntegratedGradients => "integrated_gradients",
            Method::Deeplift => "deeplift",
        })
    }
}

impl FromStr for Method {
    type Err = GamError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "lime" => Ok(Method::Lime),
            "ig" | "integrated_gradients" => Ok(Method::IntegratedGradients),
            "deeplift" => Ok(Method::Deeplift),
            other => Err(GamError::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// Which model output an attribution explains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetOutput {
    Index(usize),
    /// The class the model predicts for each row.
    Keyword(TargetKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKeyword {
    Predicted,
}

impl TargetOutput {
    pub const PREDICTED: TargetOutput = TargetOutput::Keyword(TargetKeyword::Predicted);

    /// Output unit to explain for `input`.
    pub fn resolve(self, model: &MlpModel, input: &[f64]) -> Result<usize> {
        match self {
            TargetOutput::Index(i) => Ok(i),
            TargetOutput::Keyword(TargetKeyword::Predicted) => {
                let out = model.forward(input)?;
                // a lone sigmoid unit is explained as is
                Ok(if out.len() == 1 { 0 } else { argmax(&out) })
            }
        }
    }
}

impl Default for TargetOutput {
    fn default() -> Self {
        TargetOutput::Index(0)
    }
}

impl FromStr for TargetOutput {
    type Err = GamError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("predicted") {
            return Ok(Self::PREDICTED);
        }
        s.parse::<usize>()
            .map(TargetOutput::Index)
            .map_err(|_| GamError::InvalidConfig(format!("bad target output {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExplainConfig {
    pub method: Method,
    /// Reference input for Integrated Gradients and DeepLIFT.
    pub baseline: Option<Vec<f64>>,
    pub ig_steps: usize,
    pub lime_samples: usize,
    /// `None` selects `0.75 · √(feature count)`.
    pub lime_kernel_width: Option<f64>,
    pub lime_ridge_penalty: f64,
    pub seed: u64,
    pub target_output: TargetOutput,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        Self {
            method: Method::Lime,
            baseline: None,
            ig_steps: 50,
            lime_samples: 5000,
            lime_kernel_width: None,
            lime_ridge_penalty: 1e-3,
            seed: 0,
            target_output: TargetOutput::default(),
        }
    }
}

impl ExplainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ig_steps == 0 {
            return Err(GamError::InvalidConfig("ig_steps must be at least 1".into()));
        }
        if self.lime_samples < 10 {
            return Err(GamError::InvalidConfig("lime_samples must be at least 10".into()));
        }
        if let Some(w) = self.lime_kernel_width {
            if !(w > 0.0) {
                return Err(GamError::InvalidConfig("kernel width must be positive".into()));
            }
        }
        if matches!(self.method, Method::IntegratedGradients | Method::Deeplift) && self.baseline.is_none() {
            return Err(GamError::InvalidConfig(format!(
                "{} needs a baseline input",
                self.method
            )));
        }
        Ok(())
    }
}

/// Attribution for a single row with an explicit seed.
pub fn explain_row(
    model: &MlpModel,
    input: &[f64],
    config: &ExplainConfig,
    stats: Option<&FeatureStats>,
    seed: u64,
) -> Result<Vec<f64>> {
    let target = config.target_output.resolve(model, input)?;
    match config.method {
        Method::IntegratedGradients => {
            let baseline = config.baseline.as_deref().expect("validated");
            integrated_gradients(model, input, baseline, config.ig_steps, target)
        }
        Method::Deeplift => {
            let baseline = config.baseline.as_deref().expect("validated");
            deeplift_rescale(model, input, baseline, target)
        }
        Method::Lime => {
            let stats =
                stats.ok_or_else(|| GamError::InvalidConfig("LIME needs training feature statistics".into()))?;
            let settings = LimeSettings {
                samples: config.lime_samples,
                kernel_width: config.lime_kernel_width,
                ridge_penalty: config.lime_ridge_penalty,
                seed,
            };
            Ok(lime_tabular(model, input, stats, target, &settings)?.coefficients)
        }
    }
}

/// One attribution per row, in row order; row `i` uses seed `config.seed + i`.
pub fn batch_explain(
    model: &MlpModel,
    rows: &[Vec<f64>],
    config: &ExplainConfig,
    stats: Option<&FeatureStats>,
) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    rows.par_iter()
        .enumerate()
        .map(|(i, row)| explain_row(model, row, config, stats, config.seed.wrapping_add(i as u64)))
        .collect()
}

/// [`batch_explain`] over a dataset's rows.
pub fn explain_dataset(
    model: &MlpModel,
    data: &Dataset,
    config: &ExplainConfig,
    stats: Option<&FeatureStats>,
) -> Result<Vec<Vec<f64>>> {
    batch_explain(model, &data.features, config, stats)
}

/// Grid point whose target output is closest to `neutral`, searched over
/// `resolution` evenly spaced values per feature range. Fails when the best
/// point misses `neutral` by more than `tolerance`.
pub fn neutral_baseline(
    model: &MlpModel,
    ranges: &[(f64, f64)],
    resolution: usize,
    target_output: usize,
    neutral: f64,
    tolerance: f64,
) -> Result<Vec<f64>> {
    if ranges.len() != model.input_width() {
        return Err(GamError::ShapeMismatch(format!(
            "{} ranges for a model with {} inputs",
            ranges.len(),
            model.input_width()
        )));
    }
    if resolution < 2 {
        return Err(GamError::InvalidConfig("grid resolution must be at least 2".into()));
    }
    let total = resolution
        .checked_pow(ranges.len() as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| GamError::InvalidConfig("baseline grid is too large".into()))?;
    let coord = |idx: usize, (lo, hi): (f64, f64)| lo + (hi - lo) * idx as f64 / (resolution - 1) as f64;

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut point = vec![0.0; ranges.len()];
    for flat in 0..total {
        let mut rest = flat;
        for (p, &range) in point.iter_mut().zip(ranges) {
            *p = coord(rest % resolution, range);
            rest /= resolution;
        }
        let gap = (model.forward(&point)?[target_output] - neutral).abs();
        if best.as_ref().is_none_or(|(g, _)| gap < *g) {
            best = Some((gap, point.clone()));
        }
    }
    let (gap, point) = best.expect("grid is nonempty");
    if gap > tolerance {
        return Err(GamError::InvalidConfig(format!(
            "no grid point within {tolerance} of {neutral} (closest misses by {gap})"
        )));
    }
    Ok(point)
}
