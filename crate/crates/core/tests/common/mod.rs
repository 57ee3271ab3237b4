#![allow(dead_code)]

use gam_core::mlp::{Activation, Layer, MlpModel};
use gam_core::seed::rng;
use rand::Rng;

pub fn random_layer(r: &mut impl Rng, inputs: usize, outputs: usize, activation: Activation) -> Layer {
    let weights = (0..outputs)
        .map(|_| (0..inputs).map(|_| r.random_range(-1.5..1.5)).collect())
        .collect();
    let bias = (0..outputs).map(|_| r.random_range(-0.5..0.5)).collect();
    Layer::new(weights, bias, activation).unwrap()
}

/// Random network with 1..=3 hidden layers drawn from `hidden` and the given output layer.
pub fn random_model(seed: u64, hidden: &[Activation], output: Activation, outputs: usize) -> MlpModel {
    let mut r = rng(seed);
    let input_width = r.random_range(1..=5);
    let mut width = input_width;
    let mut layers = Vec::new();
    for _ in 0..r.random_range(1..=3) {
        let next = r.random_range(1..=6);
        let act = hidden[r.random_range(0..hidden.len())];
        layers.push(random_layer(&mut r, width, next, act));
        width = next;
    }
    layers.push(random_layer(&mut r, width, outputs, output));
    MlpModel::new(input_width, layers).unwrap()
}

pub fn random_point(seed: u64, width: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..width).map(|_| r.random_range(-2.0..2.0)).collect()
}

/// Smallest |pre-activation| over all ReLU units.
pub fn relu_margin(model: &MlpModel, input: &[f64]) -> f64 {
    let trace = model.forward_trace(input).unwrap();
    model
        .layers()
        .iter()
        .zip(&trace.pre)
        .filter(|(l, _)| l.activation() == Activation::Relu)
        .flat_map(|(_, pre)| pre.iter().map(|v| v.abs()))
        .fold(f64::INFINITY, f64::min)
}
