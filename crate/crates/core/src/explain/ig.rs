//! Integrated Gradients by left Riemann sum.

use crate::error::{GamError, Result};
use crate::mlp::MlpModel;

/// `(x − x′) ∘ (1/steps) Σ_{k=0}^{steps−1} ∇f(x′ + (k/steps)(x − x′))` for one output.
pub fn integrated_gradients(
    model: &MlpModel,
    input: &[f64],
    baseline: &[f64],
    steps: usize,
    target_output: usize,
) -> Result<Vec<f64>> {
    if input.len() != baseline.len() {
        return Err(GamError::ShapeMismatch(format!(
            "input has {} values, baseline has {}",
            input.len(),
            baseline.len()
        )));
    }
    if steps == 0 {
        return Err(GamError::InvalidConfig(
            "integrated gradients needs at least one step".into(),
        ));
    }
    let delta: Vec<f64> = input.iter().zip(baseline).map(|(x, b)| x - b).collect();
    let mut summed = vec![0.0; input.len()];
    let mut point = vec![0.0; input.len()];
    for k in 0..steps {
        let alpha = k as f64 / steps as f64;
        for ((p, b), d) in point.iter_mut().zip(baseline).zip(&delta) {
            *p = b + alpha * d;
        }
        let grad = model.gradient_wrt_input(&point, target_output)?;
        for (s, g) in summed.iter_mut().zip(grad) {
            *s += g;
        }
    }
    Ok(summed
        .into_iter()
        .zip(delta)
        .map(|(s, d)| d * s / steps as f64)
        .collect())
}
