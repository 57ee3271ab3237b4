//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gam_core::cluster::{fit_best_of, fit_kmedoids};
use gam_core::experiment::{
    pipeline_iris, pipeline_synthetic, synthetic_neutral_baseline, ExperimentRun, SyntheticVariant,
};
use gam_core::explain::{deeplift_rescale, integrated_gradients, TargetOutput};
use gam_core::gam::{fit_gam, GamConfig};
use gam_core::mlp::{Activation, Layer, MlpModel};
use gam_core::rank::{
    kendall_tau_distance_merge, kendall_tau_distance_naive, normalize_weights, pairwise_distances, AttributionVector,
    DistanceMatrix, Metric, RankedAttribution,
};
use gam_core::seed::rng;
use rand::Rng;

const SEED: u64 = 0;

type Check = fn(&mut Runs) -> Verdict;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Default)]
struct Runs {
    balanced: Option<(ExperimentRun, Duration)>,
    unbalanced: Option<ExperimentRun>,
    iris: Option<ExperimentRun>,
}

impl Runs {
    fn balanced(&mut self) -> &(ExperimentRun, Duration) {
        self.balanced.get_or_insert_with(|| {
            let start = Instant::now();
            let run = pipeline_synthetic(SyntheticVariant::Balanced, SEED).expect("balanced pipeline");
            (run, start.elapsed())
        })
    }

    fn unbalanced(&mut self) -> &ExperimentRun {
        self.unbalanced
            .get_or_insert_with(|| pipeline_synthetic(SyntheticVariant::Unbalanced, SEED).expect("unbalanced pipeline"))
    }

    fn iris(&mut self) -> &ExperimentRun {
        self.iris
            .get_or_insert_with(|| pipeline_iris(SEED).expect("iris pipeline"))
    }
}

fn main() -> ExitCode {
    let mut runs = Runs::default();
    let checks: [(&str, Check); 9] = [
        ("A1", a1_balanced_synthetic),
        ("A2", a2_unbalanced_synthetic),
        ("A3", a3_accuracy),
        ("A4", a4_iris_k),
        ("A5", a5_ig_completeness),
        ("A6", a6_deeplift_summation),
        ("A7", a7_distance_properties),
        ("A8", a8_kmedoids),
        ("A9", a9_hand_examples),
    ];
    let mut failed = Vec::new();
    for (name, check) in checks {
        let v = check(&mut runs);
        println!("{name} {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing {}", failed.join(", "));
        ExitCode::FAILURE
    }
}

fn synthetic_structure(run: &ExperimentRun, share_a: f64, share_tol: f64, min_weight: f64) -> Verdict {
    let clusters = &run.report.clusters;
    if clusters.len() != 2 {
        return Verdict::new(false, format!("expected 2 subpopulations, got {}", clusters.len()));
    }
    let a = clusters.iter().find(|c| c.dominant_feature == "A");
    let b = clusters.iter().find(|c| c.dominant_feature == "B");
    let (Some(a), Some(b)) = (a, b) else {
        let doms: Vec<&str> = clusters.iter().map(|c| c.dominant_feature.as_str()).collect();
        return Verdict::new(false, format!("dominant features {doms:?}, expected A and B"));
    };
    let wa = a.medoid_weights["A"];
    let wb = b.medoid_weights["B"];
    let pass = (a.proportion - share_a).abs() <= share_tol
        && (b.proportion - (1.0 - share_a)).abs() <= share_tol
        && wa >= min_weight
        && wb >= min_weight;
    Verdict::new(
        pass,
        format!(
            "A-cluster {:.1}% (medoid A {:.3}), B-cluster {:.1}% (medoid B {:.3})",
            100.0 * a.proportion,
            wa,
            100.0 * b.proportion,
            wb
        ),
    )
}

fn a1_balanced_synthetic(runs: &mut Runs) -> Verdict {
    let (run, elapsed) = runs.balanced();
    let v = synthetic_structure(run, 0.50, 0.05, 0.80);
    let on_time = *elapsed <= Duration::from_secs(300);
    Verdict::new(
        v.pass && on_time,
        format!("{}; pipeline {:.1}s", v.detail, elapsed.as_secs_f64()),
    )
}

fn a2_unbalanced_synthetic(runs: &mut Runs) -> Verdict {
    synthetic_structure(runs.unbalanced(), 0.72, 0.07, 0.75)
}

fn a3_accuracy(runs: &mut Runs) -> Verdict {
    let balanced = runs.balanced().0.report.test_accuracy;
    let unbalanced = runs.unbalanced().report.test_accuracy;
    let iris = runs.iris().report.test_accuracy;
    Verdict::new(
        balanced >= 0.98 && unbalanced >= 0.98 && iris >= 0.85,
        format!("synthetic {balanced:.4} / {unbalanced:.4}, iris {iris:.4}"),
    )
}

fn a4_iris_k(runs: &mut Runs) -> Verdict {
    let map = &runs.iris().report.map;
    let Some(scores) = map.k_scores.as_ref() else {
        return Verdict::new(false, "no silhouette scores recorded");
    };
    let sil = |k: usize| scores.iter().find(|s| s.k == k).map(|s| s.silhouette);
    let (Some(s2), Some(s3), Some(s4)) = (sil(2), sil(3), sil(4)) else {
        return Verdict::new(false, "scores do not cover k = 2, 3, 4");
    };
    Verdict::new(
        map.k == 3 && s3 > s2 && s3 > s4,
        format!("selected k={}; silhouette k2 {s2:.3}, k3 {s3:.3}, k4 {s4:.3}", map.k),
    )
}

struct Completeness {
    checked: usize,
    over: usize,
    max: f64,
    mean: f64,
}

fn completeness(model: &MlpModel, rows: &[Vec<f64>], baseline: &[f64], target: TargetOutput) -> Completeness {
    let mut errors = Vec::new();
    for x in rows {
        let out = target.resolve(model, x).unwrap();
        let delta = model.forward(x).unwrap()[out] - model.forward(baseline).unwrap()[out];
        if delta.abs() <= 1e-3 {
            continue;
        }
        let ig = integrated_gradients(model, x, baseline, 50, out).unwrap();
        let total: f64 = ig.iter().sum();
        errors.push((total - delta).abs() / delta.abs());
    }
    Completeness {
        checked: errors.len(),
        over: errors.iter().filter(|&&e| e > 0.05).count(),
        max: errors.iter().copied().fold(0.0, f64::max),
        mean: errors.iter().sum::<f64>() / errors.len().max(1) as f64,
    }
}

fn a5_ig_completeness(runs: &mut Runs) -> Verdict {
    let (run, _) = runs.balanced();
    let baseline = synthetic_neutral_baseline(&run.model, &run.train).unwrap();
    let synth = completeness(&run.model, &run.explained.features, &baseline, TargetOutput::Index(0));

    let run = runs.iris();
    let mean = run.train.stats().unwrap().mean;
    let iris = completeness(&run.model, &run.explained.features, &mean, TargetOutput::PREDICTED);

    let ok = |c: &Completeness| c.checked >= 100 && c.over == 0;
    let show = |name: &str, c: &Completeness| {
        format!(
            "{name}: {} inputs, {} over 5%, mean {:.1}%, max {:.1}%",
            c.checked,
            c.over,
            100.0 * c.mean,
            100.0 * c.max
        )
    };
    Verdict::new(
        ok(&synth) && ok(&iris),
        format!("{}; {}", show("synthetic", &synth), show("iris", &iris)),
    )
}

fn random_layer(r: &mut impl Rng, inputs: usize, outputs: usize, activation: Activation) -> Layer {
    let weights = (0..outputs)
        .map(|_| (0..inputs).map(|_| r.random_range(-1.5..1.5)).collect())
        .collect();
    let bias = (0..outputs).map(|_| r.random_range(-0.5..0.5)).collect();
    Layer::new(weights, bias, activation).unwrap()
}

fn with_identity_output(model: &MlpModel) -> MlpModel {
    let mut layers = model.layers().to_vec();
    let last = layers.pop().unwrap();
    let weights = (0..last.outputs()).map(|o| last.weight_row(o).to_vec()).collect();
    layers.push(Layer::new(weights, last.bias().to_vec(), Activation::Identity).unwrap());
    MlpModel::new(model.input_width(), layers).unwrap()
}

fn a6_deeplift_summation(_: &mut Runs) -> Verdict {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let input_width = r.random_range(1..=6);
        let mut width = input_width;
        let mut layers = Vec::new();
        for _ in 0..r.random_range(1..=3) {
            let next = r.random_range(1..=8);
            let act = if r.random_bool(0.75) {
                Activation::Relu
            } else {
                Activation::Sigmoid
            };
            layers.push(random_layer(&mut r, width, next, act));
            width = next;
        }
        let (outputs, act) = match case % 3 {
            0 => (1, Activation::Sigmoid),
            1 => (r.random_range(1..=3), Activation::Identity),
            _ => (r.random_range(2..=4), Activation::Softmax),
        };
        layers.push(random_layer(&mut r, width, outputs, act));
        let model = MlpModel::new(input_width, layers).unwrap();
        let x: Vec<f64> = (0..input_width).map(|_| r.random_range(-3.0..3.0)).collect();
        let x0: Vec<f64> = (0..input_width).map(|_| r.random_range(-3.0..3.0)).collect();
        let target = r.random_range(0..outputs);

        let scored = if act == Activation::Softmax {
            with_identity_output(&model)
        } else {
            model.clone()
        };
        let delta = scored.forward(&x).unwrap()[target] - scored.forward(&x0).unwrap()[target];
        let total: f64 = deeplift_rescale(&model, &x, &x0, target).unwrap().iter().sum();
        worst = worst.max((total - delta).abs());
    }
    Verdict::new(
        worst <= 1e-6,
        format!("100 random models, worst |sum - delta| {worst:.2e}"),
    )
}

fn random_ranked(r: &mut impl Rng, n: usize) -> RankedAttribution {
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            let v = r.random_range(-1.0..1.0);
            if r.random_bool(0.1) {
                (v * 4.0_f64).round() / 4.0
            } else {
                v
            }
        })
        .collect();
    if raw.iter().all(|&v| v == 0.0) {
        return random_ranked(r, n);
    }
    normalize_weights(&raw).unwrap()
}

fn same_order_copy(r: &mut impl Rng, a: &RankedAttribution) -> RankedAttribution {
    let mut fresh: Vec<f64> = (0..a.len()).map(|_| r.random_range(0.01..1.0)).collect();
    fresh.sort_by(|x, y| y.total_cmp(x));
    fresh.dedup();
    if fresh.len() != a.len() {
        return same_order_copy(r, a);
    }
    let raw: Vec<f64> = a.ranks().iter().map(|&rank| fresh[rank - 1]).collect();
    normalize_weights(&raw).unwrap()
}

fn a7_distance_properties(_: &mut Runs) -> Verdict {
    let mut r = rng(7);
    let metrics = [Metric::Kendall, Metric::Spearman];
    let mut problems = Vec::new();

    let mut asym = 0;
    let mut negative = 0;
    let mut nonzero_same = 0;
    for _ in 0..1000 {
        let n = r.random_range(2..=10);
        let a = random_ranked(&mut r, n);
        let b = random_ranked(&mut r, n);
        let twin = same_order_copy(&mut r, &a);
        for m in metrics {
            let ab = m.distance(&a, &b).unwrap();
            if ab != m.distance(&b, &a).unwrap() {
                asym += 1;
            }
            if ab < 0.0 {
                negative += 1;
            }
            if m.distance(&a, &twin).unwrap() != 0.0 {
                nonzero_same += 1;
            }
        }
    }
    if asym > 0 {
        problems.push(format!("{asym} asymmetric pairs"));
    }
    if negative > 0 {
        problems.push(format!("{negative} negative distances"));
    }
    if nonzero_same > 0 {
        problems.push(format!("{nonzero_same} nonzero same-order distances"));
    }

    let mut violations = [0usize; 2];
    let mut worst = [0.0f64; 2];
    for _ in 0..1000 {
        let n = r.random_range(2..=10);
        let (a, b, c) = (
            random_ranked(&mut r, n),
            random_ranked(&mut r, n),
            random_ranked(&mut r, n),
        );
        for (slot, m) in metrics.into_iter().enumerate() {
            let excess = m.distance(&a, &c).unwrap() - m.distance(&a, &b).unwrap() - m.distance(&b, &c).unwrap();
            worst[slot] = worst[slot].max(excess);
            if excess > 1e-12 {
                violations[slot] += 1;
            }
        }
    }
    for (slot, name) in ["kendall", "spearman"].into_iter().enumerate() {
        if violations[slot] > 0 {
            problems.push(format!(
                "{name} triangle violated on {}/1000 triples (worst excess {:.3e})",
                violations[slot], worst[slot]
            ));
        }
    }

    let mut merge_gap: f64 = 0.0;
    for n in [2, 3, 7, 47, 48, 49, 64, 100, 150, 199, 200] {
        for _ in 0..5 {
            let a = random_ranked(&mut r, n);
            let b = random_ranked(&mut r, n);
            let gap = (kendall_tau_distance_merge(&a, &b).unwrap() - kendall_tau_distance_naive(&a, &b).unwrap()).abs();
            merge_gap = merge_gap.max(gap);
        }
    }
    if merge_gap > 1e-12 {
        problems.push(format!("merge vs naive Kendall gap {merge_gap:.3e}"));
    }

    if problems.is_empty() {
        Verdict::new(
            true,
            format!(
                "symmetry, same-order zero, nonnegativity on 1000 pairs; triangle worst excess kendall {:.1e}, spearman {:.1e}; merge vs naive gap {merge_gap:.1e} up to 200 features",
                worst[0], worst[1]
            ),
        )
    } else {
        Verdict::new(false, problems.join("; "))
    }
}

fn rank_distance_matrix(r: &mut impl Rng, n: usize, metric: Metric) -> DistanceMatrix {
    let features = r.random_range(3..=6);
    let attrs: Vec<RankedAttribution> = (0..n).map(|_| random_ranked(r, features)).collect();
    pairwise_distances(&attrs, metric).unwrap()
}

fn exhaustive_optimum(d: &DistanceMatrix, k: usize) -> f64 {
    fn walk(d: &DistanceMatrix, k: usize, start: usize, chosen: &mut Vec<usize>, best: &mut f64) {
        if chosen.len() == k {
            let cost: f64 = (0..d.n())
                .map(|i| chosen.iter().map(|&m| d.get(i, m)).fold(f64::INFINITY, f64::min))
                .sum();
            *best = best.min(cost);
            return;
        }
        for m in start..d.n() {
            chosen.push(m);
            walk(d, k, m + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    walk(d, k, 0, &mut Vec::new(), &mut best);
    best
}

fn a8_kmedoids(runs: &mut Runs) -> Verdict {
    let mut r = rng(8);
    let mut problems = Vec::new();

    let mut rising = 0;
    for case in 0..100u64 {
        let metric = if case % 2 == 0 {
            Metric::Kendall
        } else {
            Metric::Spearman
        };
        let n = r.random_range(10..=60);
        let d = rank_distance_matrix(&mut r, n, metric);
        let k = r.random_range(2..=5);
        let fit = fit_kmedoids(&d, k, case, 100).unwrap();
        if fit.cost_history.windows(2).any(|w| w[1] > w[0]) {
            rising += 1;
        }
    }
    if rising > 0 {
        problems.push(format!("cost rose on {rising}/100 matrices"));
    }

    let mut cases = 0;
    let mut misses = 0;
    for n in 2..=8usize {
        for k in 1..=3usize.min(n) {
            for case in 0..20u64 {
                let metric = if case % 2 == 0 {
                    Metric::Kendall
                } else {
                    Metric::Spearman
                };
                let d = rank_distance_matrix(&mut r, n, metric);
                let fit = fit_best_of(&d, k, case, 20, 100).unwrap();
                cases += 1;
                if (fit.cost - exhaustive_optimum(&d, k)).abs() > 1e-12 {
                    misses += 1;
                }
            }
        }
    }
    if misses > 0 {
        problems.push(format!("{misses}/{cases} runs missed the exhaustive optimum"));
    }

    let attrs: Vec<AttributionVector> = (0..200)
        .map(|_| AttributionVector::unnamed((0..5).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap())
        .collect();
    let config = GamConfig {
        seed: 42,
        ..GamConfig::default()
    };
    let first = fit_gam(&attrs, &config).unwrap().to_json().unwrap();
    let second = fit_gam(&attrs, &config).unwrap().to_json().unwrap();
    let again = pipeline_synthetic(SyntheticVariant::Balanced, SEED)
        .unwrap()
        .report
        .to_json()
        .unwrap();
    let pipeline_same = again == runs.balanced().0.report.to_json().unwrap();
    if first != second || !pipeline_same {
        problems.push("repeated runs produced different JSON".into());
    }

    if problems.is_empty() {
        Verdict::new(
            true,
            format!("cost monotone on 100 matrices; {cases} exhaustive optima matched; map and pipeline JSON byte-identical"),
        )
    } else {
        Verdict::new(false, problems.join("; "))
    }
}

fn brute_ranks(w: &[f64]) -> Vec<usize> {
    (0..w.len())
        .map(|i| 1 + (0..w.len()).filter(|&j| w[j] > w[i] || (w[j] == w[i] && j < i)).count())
        .collect()
}

fn brute_kendall(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (brute_ranks(a), brute_ranks(b));
    let mut total = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            let discordant = (ra[i] < ra[j] && rb[i] > rb[j]) || (ra[i] > ra[j] && rb[i] < rb[j]);
            if i < j && discordant {
                total += a[i] * b[i] * a[j] * b[j];
            }
        }
    }
    total
}

fn brute_spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (brute_ranks(a), brute_ranks(b));
    (0..a.len())
        .map(|i| a[i] * b[i] * (ra[i] as f64 - rb[i] as f64).powi(2))
        .sum()
}

fn a9_hand_examples(_: &mut Runs) -> Verdict {
    let two = ([0.7, 0.3].to_vec(), [0.4, 0.6].to_vec());
    let three = ([0.5, 0.3, 0.2].to_vec(), [0.2, 0.3, 0.5].to_vec());
    let cases = [
        (
            "kendall 2-feature",
            Metric::Kendall,
            &two,
            0.0504,
            brute_kendall(&two.0, &two.1),
        ),
        (
            "kendall 3-feature",
            Metric::Kendall,
            &three,
            0.028,
            brute_kendall(&three.0, &three.1),
        ),
        (
            "spearman 2-feature",
            Metric::Spearman,
            &two,
            0.46,
            brute_spearman(&two.0, &two.1),
        ),
        (
            "spearman 3-feature",
            Metric::Spearman,
            &three,
            0.8,
            brute_spearman(&three.0, &three.1),
        ),
    ];
    let mut problems = Vec::new();
    for (name, metric, (a, b), pinned, oracle) in cases {
        let ra = normalize_weights(a).unwrap();
        let rb = normalize_weights(b).unwrap();
        let direct = metric.distance(&ra, &rb).unwrap();
        let matrix = pairwise_distances(&[ra, rb], metric).unwrap();
        let ok = (oracle - pinned).abs() < 1e-12
            && (direct - pinned).abs() < 1e-12
            && (matrix.get(0, 1) - pinned).abs() < 1e-12
            && matrix.get(0, 1) == matrix.get(1, 0);
        if !ok {
            problems.push(format!("{name}: oracle {oracle}, library {direct}, expected {pinned}"));
        }
    }
    if problems.is_empty() {
        Verdict::new(
            true,
            "0.0504, 0.028, 0.46, 0.8 match the brute-force oracle and the library",
        )
    } else {
        Verdict::new(false, problems.join("; "))
    }
}
