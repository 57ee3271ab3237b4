//! DeepLIFT with the Rescale rule.
//!
//! Each nonlinearity gets the multiplier `Δa / Δz` (its secant slope between
//! the reference and the input); dense layers pass multipliers back through
//! `Wᵀ`. Attributions `m_i · Δx_i` then sum exactly to the change in the
//! explained score. For a softmax head the explained score is the target
//! logit.

use crate::error::{GamError, Result};
use crate::mlp::{sigmoid, Activation, MlpModel};

/// Below this |Δz| the secant slope is replaced by the slope at the midpoint.
const SECANT_EPS: f64 = 1e-7;

/// Score that DeepLIFT attributions sum to: the target output, or its logit
/// when the model ends in softmax.
pub fn explained_score(model: &MlpModel, input: &[f64], target_output: usize) -> Result<f64> {
    check_target(model, target_output)?;
    let trace = model.forward_trace(input)?;
    let last = model.layers().len() - 1;
    Ok(if model.layers()[last].activation() == Activation::Softmax {
        trace.pre[last][target_output]
    } else {
        trace.post[last][target_output]
    })
}

fn check_target(model: &MlpModel, target_output: usize) -> Result<()> {
    if target_output >= model.output_width() {
        return Err(GamError::IndexOutOfRange {
            index: target_output,
            width: model.output_width(),
        });
    }
    Ok(())
}

fn rescale(activation: Activation, z: f64, z0: f64, a: f64, a0: f64) -> f64 {
    let dz = z - z0;
    if dz.abs() > SECANT_EPS {
        return (a - a0) / dz;
    }
    let mid = 0.5 * (z + z0);
    match activation {
        Activation::Relu => {
            if mid > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Activation::Sigmoid => {
            let s = sigmoid(mid);
            s * (1.0 - s)
        }
        Activation::Identity | Activation::Softmax => 1.0,
    }
}

pub fn deeplift_rescale(model: &MlpModel, input: &[f64], baseline: &[f64], target_output: usize) -> Result<Vec<f64>> {
    if input.len() != baseline.len() {
        return Err(GamError::ShapeMismatch(format!(
            "input has {} values, baseline has {}",
            input.len(),
            baseline.len()
        )));
    }
    check_target(model, target_output)?;
    // softmax can only sit on the last layer (MlpModel invariant)
    let layers = model.layers();
    let x = model.forward_trace(input)?;
    let x0 = model.forward_trace(baseline)?;

    // multipliers with respect to the current layer's post-activation
    let mut multipliers = vec![0.0; model.output_width()];
    multipliers[target_output] = 1.0;
    for (l, layer) in layers.iter().enumerate().rev() {
        let act = layer.activation();
        let dz: Vec<f64> = if act == Activation::Softmax {
            // start from the logit
            multipliers.clone()
        } else {
            multipliers
                .iter()
                .enumerate()
                .map(|(j, m)| m * rescale(act, x.pre[l][j], x0.pre[l][j], x.post[l][j], x0.post[l][j]))
                .collect()
        };
        multipliers = layer.transpose_mul(&dz);
    }
    Ok(multipliers
        .into_iter()
        .zip(input.iter().zip(baseline))
        .map(|(m, (xi, bi))| m * (xi - bi))
        .collect())
}
