//! A small dense feed-forward network: inference, input gradients, mini-batch
//! SGD training and JSON persistence.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GamError, Result};
use crate::seed::{derive_seed, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Softmax,
    Identity,
}

impl Activation {
    fn apply(self, z: &[f64]) -> Vec<f64> {
        match self {
            Activation::Relu => z.iter().map(|&v| v.max(0.0)).collect(),
            Activation::Sigmoid => z.iter().map(|&v| sigmoid(v)).collect(),
            Activation::Identity => z.to_vec(),
            Activation::Softmax => {
                let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let exp: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
                let total: f64 = exp.iter().sum();
                exp.into_iter().map(|v| v / total).collect()
            }
        }
    }

    /// Pulls `upstream` (dL/da) back to dL/dz given the layer's pre- and post-activations.
    fn backprop(self, pre: &[f64], post: &[f64], upstream: &[f64]) -> Vec<f64> {
        match self {
            // derivative at exactly 0 is taken as 0
            Activation::Relu => pre
                .iter()
                .zip(upstream)
                .map(|(&z, &g)| if z > 0.0 { g } else { 0.0 })
                .collect(),
            Activation::Sigmoid => post.iter().zip(upstream).map(|(&a, &g)| g * a * (1.0 - a)).collect(),
            Activation::Identity => upstream.to_vec(),
            Activation::Softmax => {
                let dot: f64 = post.iter().zip(upstream).map(|(a, g)| a * g).sum();
                post.iter().zip(upstream).map(|(&a, &g)| a * (g - dot)).collect()
            }
        }
    }
}

pub(crate) fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// One dense layer: `activation(W · x + b)` with `W` stored row-major `[out × in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

impl Layer {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        let outputs = weights.len();
        if outputs == 0 {
            return Err(GamError::ShapeMismatch("layer has no output units".into()));
        }
        let inputs = weights[0].len();
        if inputs == 0 || weights.iter().any(|row| row.len() != inputs) {
            return Err(GamError::ShapeMismatch("weight rows differ in length".into()));
        }
        if bias.len() != outputs {
            return Err(GamError::ShapeMismatch(format!(
                "bias has {} entries for {outputs} units",
                bias.len()
            )));
        }
        Ok(Self {
            inputs,
            outputs,
            weights: weights.into_iter().flatten().collect(),
            bias,
            activation,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight(&self, out: usize, input: usize) -> f64 {
        self.weights[out * self.inputs + input]
    }

    pub fn weight_row(&self, out: usize) -> &[f64] {
        &self.weights[out * self.inputs..(out + 1) * self.inputs]
    }

    /// `W · x + b`.
    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|o| self.weight_row(o).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[o])
            .collect()
    }

    /// `Wᵀ · g`.
    pub fn transpose_mul(&self, g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.inputs];
        for (o, &go) in g.iter().enumerate() {
            for (acc, w) in out.iter_mut().zip(self.weight_row(o)) {
                *acc += w * go;
            }
        }
        out
    }
}

/// Pre- and post-activation values of every layer for one input.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    input_width: usize,
    layers: Vec<Layer>,
}

impl MlpModel {
    /// Checks that layer shapes chain and that softmax only appears last.
    pub fn new(input_width: usize, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(GamError::ShapeMismatch("model has no layers".into()));
        }
        let mut width = input_width;
        for (i, layer) in layers.iter().enumerate() {
            if layer.inputs != width {
                return Err(GamError::ShapeMismatch(format!(
                    "layer {i} expects {} inputs, previous width is {width}",
                    layer.inputs
                )));
            }
            if layer.activation == Activation::Softmax && i + 1 != layers.len() {
                return Err(GamError::ShapeMismatch(format!("softmax on hidden layer {i}")));
            }
            width = layer.outputs;
        }
        Ok(Self { input_width, layers })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().expect("model has layers").outputs
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_width {
            return Err(GamError::ShapeMismatch(format!(
                "input has {} values, model expects {}",
                input.len(),
                self.input_width
            )));
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut a = input.to_vec();
        for layer in &self.layers {
            a = layer.activation.apply(&layer.affine(&a));
        }
        Ok(a)
    }

    pub fn forward_trace(&self, input: &[f64]) -> Result<ForwardTrace> {
        self.check_input(input)?;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut a = input.to_vec();
        for layer in &self.layers {
            let z = layer.affine(&a);
            a = layer.activation.apply(&z);
            pre.push(z);
            post.push(a.clone());
        }
        Ok(ForwardTrace { pre, post })
    }

    /// Exact gradient of output `output_index` with respect to the input.
    pub fn gradient_wrt_input(&self, input: &[f64], output_index: usize) -> Result<Vec<f64>> {
        if output_index >= self.output_width() {
            return Err(GamError::IndexOutOfRange {
                index: output_index,
                width: self.output_width(),
            });
        }
        let trace = self.forward_trace(input)?;
        let mut upstream = vec![0.0; self.output_width()];
        upstream[output_index] = 1.0;
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let dz = layer.activation.backprop(&trace.pre[l], &trace.post[l], &upstream);
            upstream = layer.transpose_mul(&dz);
        }
        Ok(upstream)
    }

    /// Most probable class: argmax for multi-unit outputs, `p >= 0.5` for one unit.
    pub fn predict_class(&self, input: &[f64]) -> Result<usize> {
        let out = self.forward(input)?;
        Ok(if out.len() == 1 {
            usize::from(out[0] >= 0.5)
        } else {
            argmax(&out)
        })
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        if data.is_empty() {
            return Err(GamError::EmptyDataset);
        }
        let mut correct = 0usize;
        for (row, &label) in data.features.iter().zip(&data.labels) {
            if self.predict_class(row)? == label {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| GamError::MalformedModelFile(e.to_string()))?;
        file.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    input_width: usize,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: Activation,
}

impl From<&MlpModel> for ModelFile {
    fn from(model: &MlpModel) -> Self {
        ModelFile {
            input_width: model.input_width,
            layers: model
                .layers
                .iter()
                .map(|l| LayerFile {
                    weights: l.weights.chunks(l.inputs).map(<[f64]>::to_vec).collect(),
                    bias: l.bias.clone(),
                    activation: l.activation,
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelFile> for MlpModel {
    type Error = GamError;

    fn try_from(file: ModelFile) -> Result<Self> {
        let malformed = |e: GamError| GamError::MalformedModelFile(e.to_string());
        let layers = file
            .layers
            .into_iter()
            .map(|l| Layer::new(l.weights, l.bias, l.activation))
            .collect::<Result<Vec<_>>>()
            .map_err(malformed)?;
        MlpModel::new(file.input_width, layers).map_err(malformed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// Single sigmoid output, labels in {0, 1}.
    BinaryCrossEntropy,
    /// Softmax output with one unit per class.
    CategoricalCrossEntropy,
}

/// Width and activation of one layer to be trained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(width: usize, activation: Activation) -> Self {
        Self { width, activation }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub loss: Loss,
    /// Train on z-scored inputs and fold the scaling into the first layer.
    pub standardize_inputs: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            learning_rate: 0.05,
            seed: 0,
            loss: Loss::BinaryCrossEntropy,
            standardize_inputs: true,
        }
    }
}

/// Mini-batch SGD on cross-entropy. `layers` lists hidden layers followed by
/// the output layer, whose activation must match the loss.
pub fn train(data: &Dataset, layers: &[LayerSpec], config: &TrainConfig) -> Result<MlpModel> {
    if data.is_empty() {
        return Err(GamError::EmptyDataset);
    }
    if !(config.learning_rate > 0.0) || config.batch_size == 0 || config.epochs == 0 {
        return Err(GamError::InvalidConfig(
            "learning rate, batch size and epochs must be positive".into(),
        ));
    }
    let output = layers
        .last()
        .ok_or_else(|| GamError::ShapeMismatch("no layers requested".into()))?;
    match config.loss {
        Loss::BinaryCrossEntropy => {
            if output.activation != Activation::Sigmoid || output.width != 1 {
                return Err(GamError::InvalidConfig(
                    "binary cross entropy needs a single sigmoid output".into(),
                ));
            }
            if data.labels.iter().any(|&l| l > 1) {
                return Err(GamError::InvalidConfig(
                    "binary cross entropy needs labels in {0, 1}".into(),
                ));
            }
        }
        Loss::CategoricalCrossEntropy => {
            if output.activation != Activation::Softmax || output.width < data.n_classes() {
                return Err(GamError::InvalidConfig(
                    "categorical cross entropy needs a softmax output with one unit per class".into(),
                ));
            }
        }
    }
    if layers.iter().any(|l| l.width == 0) {
        return Err(GamError::ShapeMismatch("layer width must be positive".into()));
    }

    let m = data.n_features();
    let (shift, scale) = if config.standardize_inputs {
        let stats = data.stats()?;
        let scale = stats.std.iter().map(|&s| if s > 0.0 { s } else { 1.0 }).collect();
        (stats.mean, scale)
    } else {
        (vec![0.0; m], vec![1.0; m])
    };
    let inputs: Vec<Vec<f64>> = data
        .features
        .iter()
        .map(|row| {
            row.iter()
                .zip(shift.iter().zip(&scale))
                .map(|(v, (mu, s))| (v - mu) / s)
                .collect()
        })
        .collect();

    let mut init_rng = rng(derive_seed(config.seed, 0));
    let mut params: Vec<Layer> = Vec::with_capacity(layers.len());
    let mut width = m;
    for spec in layers {
        let limit = (6.0 / (width + spec.width) as f64).sqrt();
        let weights: Vec<Vec<f64>> = (0..spec.width)
            .map(|_| (0..width).map(|_| init_rng.random_range(-limit..=limit)).collect())
            .collect();
        params.push(Layer::new(weights, vec![0.0; spec.width], spec.activation)?);
        width = spec.width;
    }
    let mut model = MlpModel::new(m, params)?;

    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut shuffle_rng = rng(derive_seed(config.seed, 1));
    let mut grads: Vec<(Vec<f64>, Vec<f64>)> = model
        .layers
        .iter()
        .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.outputs]))
        .collect();

    for _ in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        for batch in order.chunks(config.batch_size) {
            for (gw, gb) in grads.iter_mut() {
                gw.fill(0.0);
                gb.fill(0.0);
            }
            for &i in batch {
                accumulate_gradient(&model, &inputs[i], data.labels[i], &mut grads);
            }
            let step = config.learning_rate / batch.len() as f64;
            for (layer, (gw, gb)) in model.layers.iter_mut().zip(&grads) {
                for (w, g) in layer.weights.iter_mut().zip(gw) {
                    *w -= step * g;
                }
                for (b, g) in layer.bias.iter_mut().zip(gb) {
                    *b -= step * g;
                }
            }
        }
    }

    if config.standardize_inputs {
        fold_standardization(&mut model.layers[0], &shift, &scale);
    }
    Ok(model)
}

/// Adds one sample's cross-entropy gradient to `grads`.
fn accumulate_gradient(model: &MlpModel, x: &[f64], label: usize, grads: &mut [(Vec<f64>, Vec<f64>)]) {
    let trace = model.forward_trace(x).expect("training rows match the model");
    let out = trace.post.last().expect("model has layers");
    // sigmoid + BCE and softmax + CCE share the same output delta: p - y
    let mut delta: Vec<f64> = out.clone();
    if delta.len() == 1 {
        delta[0] -= label as f64;
    } else {
        delta[label] -= 1.0;
    }
    for l in (0..model.layers.len()).rev() {
        let layer = &model.layers[l];
        let input = if l == 0 { x } else { &trace.post[l - 1] };
        let (gw, gb) = &mut grads[l];
        for (o, &d) in delta.iter().enumerate() {
            gb[o] += d;
            for (g, &v) in gw[o * layer.inputs..(o + 1) * layer.inputs].iter_mut().zip(input) {
                *g += d * v;
            }
        }
        if l > 0 {
            let below = &model.layers[l - 1];
            let upstream = layer.transpose_mul(&delta);
            delta = below
                .activation
                .backprop(&trace.pre[l - 1], &trace.post[l - 1], &upstream);
        }
    }
}

/// Rewrites the first layer so it accepts raw inputs instead of z-scores.
fn fold_standardization(layer: &mut Layer, shift: &[f64], scale: &[f64]) {
    for o in 0..layer.outputs {
        let row = &mut layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
        let mut offset = 0.0;
        for ((w, mu), s) in row.iter_mut().zip(shift).zip(scale) {
            *w /= s;
            offset += *w * mu;
        }
        layer.bias[o] -= offset;
    }
}
