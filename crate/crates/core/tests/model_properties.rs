mod common;

use common::{random_model, random_point, relu_margin};
use gam_core::data::synth_mixture;
use gam_core::mlp::{train, Activation, LayerSpec, MlpModel, TrainConfig};
use proptest::prelude::*;

#[test]
fn gradient_matches_central_differences() {
    let mut checked = 0;
    for seed in 0..150u64 {
        let (output, outputs) = match seed % 3 {
            0 => (Activation::Sigmoid, 1),
            1 => (Activation::Identity, 2),
            _ => (Activation::Softmax, 3),
        };
        let model = random_model(seed, &[Activation::Relu, Activation::Sigmoid], output, outputs);
        let x = random_point(seed + 1000, model.input_width());
        if relu_margin(&model, &x) < 1e-3 {
            continue;
        }
        checked += 1;
        let h = 1e-5;
        for out in 0..outputs {
            let grad = model.gradient_wrt_input(&x, out).unwrap();
            for i in 0..x.len() {
                let (mut up, mut down) = (x.clone(), x.clone());
                up[i] += h;
                down[i] -= h;
                let fd = (model.forward(&up).unwrap()[out] - model.forward(&down).unwrap()[out]) / (2.0 * h);
                let rel = (grad[i] - fd).abs() / fd.abs().max(1e-4);
                assert!(rel < 1e-4, "seed {seed} output {out} input {i}: {} vs {fd}", grad[i]);
            }
        }
    }
    assert!(checked >= 100, "only {checked} models away from kinks");
}

proptest! {
    #[test]
    fn output_ranges(seed in 0u64..10_000, x in prop::collection::vec(-50.0..50.0f64, 5)) {
        let soft = random_model(seed, &[Activation::Relu], Activation::Softmax, 3);
        let p = soft.forward(&x[..soft.input_width()]).unwrap();
        prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let sig = random_model(seed, &[Activation::Relu, Activation::Sigmoid], Activation::Sigmoid, 1);
        let q = sig.forward(&x[..sig.input_width()]).unwrap()[0];
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn json_round_trip_is_exact(seed in 0u64..10_000) {
        let model = random_model(seed, &[Activation::Relu, Activation::Sigmoid], Activation::Softmax, 2);
        let back = MlpModel::from_json(&model.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, model);
    }
}

#[test]
fn training_is_deterministic_and_saves() {
    let data = synth_mixture(400, 0.5, 9).unwrap().dataset;
    let layers = [
        LayerSpec::new(4, Activation::Relu),
        LayerSpec::new(1, Activation::Sigmoid),
    ];
    let config = TrainConfig {
        epochs: 15,
        seed: 5,
        ..TrainConfig::default()
    };
    let first = train(&data, &layers, &config).unwrap();
    let second = train(&data, &layers, &config).unwrap();
    assert_eq!(first.to_json().unwrap(), second.to_json().unwrap());

    let other = train(
        &data,
        &layers,
        &TrainConfig {
            seed: 6,
            ..config.clone()
        },
    )
    .unwrap();
    assert_ne!(first, other);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    first.save(&path).unwrap();
    let loaded = MlpModel::load(&path).unwrap();
    for row in &data.features[..20] {
        assert_eq!(loaded.forward(row).unwrap(), first.forward(row).unwrap());
    }
}
