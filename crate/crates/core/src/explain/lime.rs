//! LIME for continuous tabular features.
//!
//! Perturbations are drawn from `Normal(input, std)` feature by feature, the
//! model labels them, and a ridge regression weighted by the exponential
//! kernel `exp(−d² / width²)` on standardized distance is fit to the labels.
//! The ridge coefficients (per standard deviation of each feature) are the
//! attribution.

use rand_distr::{Distribution, StandardNormal};

use crate::data::FeatureStats;
use crate::error::{GamError, Result};
use crate::mlp::MlpModel;
use crate::seed::rng;

/// Label spread at or below which the surrogate has nothing to fit.
const FLAT_LABEL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LimeSettings {
    pub samples: usize,
    /// `None` selects `0.75 · √(feature count)`.
    pub kernel_width: Option<f64>,
    pub ridge_penalty: f64,
    pub seed: u64,
}

impl Default for LimeSettings {
    fn default() -> Self {
        Self {
            samples: 5000,
            kernel_width: None,
            ridge_penalty: 1e-3,
            seed: 0,
        }
    }
}

pub fn default_kernel_width(n_features: usize) -> f64 {
    0.75 * (n_features as f64).sqrt()
}

/// Surrogate fit for one input.
#[derive(Debug, Clone, PartialEq)]
pub struct LimeExplanation {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Set when every perturbation got the same label; coefficients are then zero.
    pub flat_labels: bool,
}

pub fn lime_tabular(
    model: &MlpModel,
    input: &[f64],
    stats: &FeatureStats,
    target_output: usize,
    settings: &LimeSettings,
) -> Result<LimeExplanation> {
    let m = input.len();
    if stats.mean.len() != m || stats.std.len() != m {
        return Err(GamError::ShapeMismatch(format!(
            "training statistics cover {} features, input has {m}",
            stats.std.len()
        )));
    }
    if settings.samples < 10 {
        return Err(GamError::InvalidConfig("LIME needs at least 10 samples".into()));
    }
    let width = settings.kernel_width.unwrap_or_else(|| default_kernel_width(m));
    if !(width > 0.0) {
        return Err(GamError::InvalidConfig("kernel width must be positive".into()));
    }
    if target_output >= model.output_width() {
        return Err(GamError::IndexOutOfRange {
            index: target_output,
            width: model.output_width(),
        });
    }

    let mut rng = rng(settings.seed);
    // standardized offsets; the first sample is the input itself
    let mut offsets: Vec<Vec<f64>> = Vec::with_capacity(settings.samples);
    offsets.push(vec![0.0; m]);
    for _ in 1..settings.samples {
        offsets.push(
            stats
                .std
                .iter()
                .map(|&s| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    if s > 0.0 {
                        z
                    } else {
                        0.0
                    }
                })
                .collect(),
        );
    }

    let mut labels = Vec::with_capacity(offsets.len());
    let mut kernel = Vec::with_capacity(offsets.len());
    let mut point = vec![0.0; m];
    for z in &offsets {
        for ((p, (x, s)), zi) in point.iter_mut().zip(input.iter().zip(&stats.std)).zip(z) {
            *p = x + zi * s;
        }
        labels.push(model.forward(&point)?[target_output]);
        let d2: f64 = z.iter().map(|v| v * v).sum();
        kernel.push((-d2 / (width * width)).exp());
    }

    let (lo, hi) = labels.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
        (lo.min(y), hi.max(y))
    });
    if hi - lo <= FLAT_LABEL_TOLERANCE {
        log::warn!("LIME perturbations all received the same label; returning zero attribution");
        return Ok(LimeExplanation {
            coefficients: vec![0.0; m],
            intercept: labels[0],
            flat_labels: true,
        });
    }

    let (coefficients, intercept) = weighted_ridge(&offsets, &labels, &kernel, settings.ridge_penalty)?;
    Ok(LimeExplanation {
        coefficients,
        intercept,
        flat_labels: false,
    })
}

/// Minimizes `Σ w_s (y_s − b − x_s·β)² + λ‖β‖²` with an unpenalized intercept.
pub fn weighted_ridge(x: &[Vec<f64>], y: &[f64], w: &[f64], penalty: f64) -> Result<(Vec<f64>, f64)> {
    let m = x.first().map_or(0, Vec::len);
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(GamError::InvalidConfig("all sample weights are zero".into()));
    }
    let mut x_mean = vec![0.0; m];
    let mut y_mean = 0.0;
    for ((row, &yi), &wi) in x.iter().zip(y).zip(w) {
        for (acc, v) in x_mean.iter_mut().zip(row) {
            *acc += wi * v;
        }
        y_mean += wi * yi;
    }
    x_mean.iter_mut().for_each(|v| *v /= total);
    y_mean /= total;

    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    let mut centered = vec![0.0; m];
    for ((row, &yi), &wi) in x.iter().zip(y).zip(w) {
        for ((c, v), mu) in centered.iter_mut().zip(row).zip(&x_mean) {
            *c = v - mu;
        }
        let yc = yi - y_mean;
        for a in 0..m {
            rhs[a] += wi * centered[a] * yc;
            for b in a..m {
                gram[a * m + b] += wi * centered[a] * centered[b];
            }
        }
    }
    for a in 0..m {
        gram[a * m + a] += penalty;
        for b in 0..a {
            gram[a * m + b] = gram[b * m + a];
        }
    }
    let beta = solve_spd(gram, rhs, m)?;
    let intercept = y_mean - beta.iter().zip(&x_mean).map(|(b, mu)| b * mu).sum::<f64>();
    Ok((beta, intercept))
}

/// Cholesky solve of a symmetric positive-definite `m × m` system.
fn solve_spd(mut a: Vec<f64>, mut b: Vec<f64>, m: usize) -> Result<Vec<f64>> {
    for j in 0..m {
        let mut diag = a[j * m + j];
        for k in 0..j {
            diag -= a[j * m + k] * a[j * m + k];
        }
        if !(diag > 0.0) {
            return Err(GamError::InvalidConfig(
                "surrogate design matrix is singular; increase the ridge penalty".into(),
            ));
        }
        let diag = diag.sqrt();
        a[j * m + j] = diag;
        for i in (j + 1)..m {
            let mut v = a[i * m + j];
            for k in 0..j {
                v -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = v / diag;
        }
    }
    for i in 0..m {
        for k in 0..i {
            b[i] -= a[i * m + k] * b[k];
        }
        b[i] /= a[i * m + i];
    }
    for i in (0..m).rev() {
        for k in (i + 1)..m {
            b[i] -= a[k * m + i] * b[k];
        }
        b[i] /= a[i * m + i];
    }
    Ok(b)
}
