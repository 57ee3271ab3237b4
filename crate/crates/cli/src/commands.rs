use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::anyhow;
use gam_core::cluster::{fit_best_of_with, select_k_with, silhouette, KScore, TieBreak};
use gam_core::data::{load_csv, synth_mixture, Dataset, SynthGroup};
use gam_core::experiment::{pipeline_iris, pipeline_synthetic, ExperimentRun, SyntheticVariant};
use gam_core::explain::{batch_explain, ExplainConfig, Method, TargetOutput};
use gam_core::gam::{
    fit_gam, subpopulation_summary, weight_l1, GamConfig, GlobalAttributionMap, KChoice, SubpopulationSummary,
};
use gam_core::graph::export_rank_graph;
use gam_core::io::{distance_csv_string, load_distance_csv, load_vector_csv, AttributionTable, ClusteringReport};
use gam_core::mlp::{train, Activation, LayerSpec, Loss, MlpModel, TrainConfig};
use gam_core::rank::{normalize, pairwise_distances, DistanceMatrix, Metric, RankedAttribution};

use crate::args::*;

/// Failure classes that map onto distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad input data or settings.
    Data(anyhow::Error),
    Internal(anyhow::Error),
}

type CmdResult<T = ()> = Result<T, Failure>;

trait DataContext<T> {
    fn data(self, what: impl FnOnce() -> String) -> CmdResult<T>;
}

impl<T, E> DataContext<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn data(self, what: impl FnOnce() -> String) -> CmdResult<T> {
        self.map_err(|e| Failure::Data(anyhow::Error::new(e).context(what())))
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure::Data(anyhow!(message.into()))
}

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train_cmd(a),
        Command::Explain(a) => explain(a),
        Command::Distances(a) => distances(a),
        Command::Cluster(a) => cluster(a),
        Command::Gam(a) => gam(a),
        Command::SelectK(a) => select_k_cmd(a),
        Command::Graph(a) => graph(a),
        Command::Experiment(a) => experiment(a),
    }
}

/// Writes `content` to `path` through a temporary file in the same
/// directory, or to stdout when no path is given.
fn emit(path: Option<&Path>, content: &str) -> CmdResult {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return match stdout.write_all(content.as_bytes()).and_then(|_| stdout.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(Failure::Internal(anyhow!(e).context("writing to stdout")))
            }
            _ => Ok(()),
        };
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let write = || -> anyhow::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(content.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path)?;
        Ok(())
    };
    write().map_err(|e| Failure::Internal(e.context(format!("writing {}", path.display()))))
}

fn json_text<T: serde::Serialize>(value: &T) -> CmdResult<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.into()))?;
    text.push('\n');
    Ok(text)
}

fn load_data(args: &DataArgs) -> CmdResult<Dataset> {
    load_csv(&args.data, &args.label_column, args.one_hot).data(|| format!("reading {}", args.data.display()))
}

fn load_table(path: &Path) -> CmdResult<AttributionTable> {
    AttributionTable::load(path).data(|| format!("reading {}", path.display()))
}

fn ranked(table: &AttributionTable) -> CmdResult<Vec<RankedAttribution>> {
    table
        .vectors()
        .and_then(|v| v.iter().map(normalize).collect())
        .data(|| "normalizing attributions".into())
}

/// Distance matrix plus the normalized attributions behind it, when known.
fn matrix(source: &MatrixSource, metric: Metric) -> CmdResult<(DistanceMatrix, Option<Vec<RankedAttribution>>)> {
    match (&source.attributions, &source.distances) {
        (Some(path), _) => {
            let ranked = ranked(&load_table(path)?)?;
            let d = pairwise_distances(&ranked, metric).data(|| "computing distances".into())?;
            Ok((d, Some(ranked)))
        }
        (None, Some(path)) => Ok((
            load_distance_csv(path).data(|| format!("reading {}", path.display()))?,
            None,
        )),
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn synth(args: SynthArgs) -> CmdResult {
    let fraction = args
        .fraction_a
        .unwrap_or_else(|| SyntheticVariant::from(args.variant).fraction_a());
    let mixture = synth_mixture(args.rows, fraction, args.seed).data(|| "generating data".into())?;
    let mut buf = Vec::new();
    mixture
        .dataset
        .write_csv(&mut buf, &args.label_column)
        .map_err(|e| Failure::Internal(e.into()))?;
    if let Some(path) = &args.groups_out {
        let groups: String = mixture
            .groups
            .iter()
            .map(|g| if *g == SynthGroup::A { "A\n" } else { "B\n" })
            .collect();
        emit(Some(path), &groups)?;
    }
    emit(args.out.out.as_deref(), &String::from_utf8_lossy(&buf))
}

fn train_cmd(args: TrainArgs) -> CmdResult {
    let data = load_data(&args.data)?;
    let classes = data.n_classes();
    let (output, loss) = match (args.output, classes) {
        (OutputArg::Auto | OutputArg::Sigmoid, 2) => (LayerSpec::new(1, Activation::Sigmoid), Loss::BinaryCrossEntropy),
        (OutputArg::Sigmoid, n) => return Err(invalid(format!("a sigmoid output needs 2 classes, data has {n}"))),
        (_, n) => (LayerSpec::new(n, Activation::Softmax), Loss::CategoricalCrossEntropy),
    };
    if args.hidden.contains(&0) {
        return Err(invalid("hidden layer widths must be positive"));
    }
    let mut layers: Vec<LayerSpec> = args
        .hidden
        .iter()
        .map(|&w| LayerSpec::new(w, Activation::Relu))
        .collect();
    layers.push(output);
    let config = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        seed: args.seed,
        loss,
        ..TrainConfig::default()
    };
    let model = train(&data, &layers, &config).data(|| "training".into())?;
    let accuracy = model.accuracy(&data).data(|| "evaluating".into())?;
    eprintln!("training accuracy: {accuracy:.4}");
    if let Some(path) = &args.validate {
        let held_out = load_csv(path, &args.data.label_column, args.data.one_hot)
            .data(|| format!("reading {}", path.display()))?;
        let accuracy = model.accuracy(&held_out).data(|| "evaluating held-out data".into())?;
        eprintln!("held-out accuracy: {accuracy:.4}");
    }
    let mut text = model.to_json().map_err(|e| Failure::Internal(e.into()))?;
    text.push('\n');
    emit(args.out.out.as_deref(), &text)
}

fn explain(args: ExplainArgs) -> CmdResult {
    let model = MlpModel::load(&args.model).data(|| format!("reading {}", args.model.display()))?;
    let data = load_data(&args.data)?;
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).data(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExplainConfig>(&text).data(|| format!("parsing {}", path.display()))?
        }
        None => ExplainConfig::default(),
    };
    if let Some(m) = args.method {
        config.method = match m {
            MethodArg::Lime => Method::Lime,
            MethodArg::Ig => Method::IntegratedGradients,
            MethodArg::Deeplift => Method::Deeplift,
        };
    }
    if let Some(steps) = args.steps {
        config.ig_steps = steps;
    }
    if let Some(samples) = args.samples {
        config.lime_samples = samples;
    }
    if let Some(width) = args.kernel_width {
        config.lime_kernel_width = Some(width);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(target) = &args.target {
        config.target_output = target.parse::<TargetOutput>().data(|| "parsing --target".into())?;
    }
    if let Some(path) = &args.baseline {
        config.baseline = Some(load_vector_csv(path).data(|| format!("reading {}", path.display()))?);
    }

    let stats_source = match &args.train_data {
        Some(path) => {
            load_csv(path, &args.data.label_column, args.data.one_hot).data(|| format!("reading {}", path.display()))?
        }
        None => data.clone(),
    };
    let stats = stats_source.stats().data(|| "computing feature statistics".into())?;
    let rows = batch_explain(&model, &data.features, &config, Some(&stats)).data(|| "explaining".into())?;
    let table = AttributionTable::new(data.feature_names.clone(), rows).data(|| "building attribution table".into())?;
    let text = table.to_csv_string().map_err(|e| Failure::Internal(e.into()))?;
    emit(args.out.out.as_deref(), &text)
}

fn distances(args: DistancesArgs) -> CmdResult {
    let ranked = ranked(&load_table(&args.attributions)?)?;
    let d = pairwise_distances(&ranked, args.metric.into()).data(|| "computing distances".into())?;
    let text = distance_csv_string(&d).map_err(|e| Failure::Internal(e.into()))?;
    emit(args.out.out.as_deref(), &text)
}

fn cluster(args: ClusterArgs) -> CmdResult {
    let p = &args.params;
    let (d, ranked) = matrix(&args.source, p.metric.into())?;
    let gap = |i: usize, j: usize| ranked.as_ref().map_or(0.0, |r| weight_l1(&r[i], &r[j]));
    let tie_break: Option<TieBreak<'_>> = ranked.is_some().then_some(&gap);
    let fit = fit_best_of_with(&d, args.k, p.seed, p.restarts, p.max_iter, tie_break).data(|| "clustering".into())?;
    let score = if fit.k >= 2 {
        Some(silhouette(&d, &fit.assignment).data(|| "scoring".into())?.mean)
    } else {
        None
    };
    emit(
        args.out.out.as_deref(),
        &json_text(&ClusteringReport::new(&fit, score))?,
    )
}

fn gam(args: GamArgs) -> CmdResult {
    let k = match (args.k, &args.auto_k) {
        (Some(k), _) => KChoice::Fixed(k),
        (None, Some(range)) => KChoice::Auto {
            k_min: range[0],
            k_max: range[1],
        },
        (None, None) => KChoice::default(),
    };
    let config = GamConfig {
        metric: args.params.metric.into(),
        k,
        seed: args.params.seed,
        restarts: args.params.restarts,
        max_iter: args.params.max_iter,
    };
    let table = load_table(&args.attributions)?;
    let vectors = table.vectors().data(|| "reading attributions".into())?;
    let map = fit_gam(&vectors, &config).data(|| "building the map".into())?;

    if let (Some(data_path), Some(summary_path)) = (&args.data, &args.summary_out) {
        let data =
            load_csv(data_path, &args.label_column, false).data(|| format!("reading {}", data_path.display()))?;
        let summary = subpopulation_summary(&map, &data.features).data(|| "summarizing subpopulations".into())?;
        #[derive(serde::Serialize)]
        struct Doc {
            feature_names: Vec<String>,
            clusters: Vec<SubpopulationSummary>,
        }
        let doc = Doc {
            feature_names: data.feature_names,
            clusters: summary,
        };
        emit(Some(summary_path), &json_text(&doc)?)?;
    }
    emit(args.out.out.as_deref(), &json_text(&map)?)
}

fn select_k_cmd(args: SelectKArgs) -> CmdResult {
    let p = &args.params;
    let (d, ranked) = matrix(&args.source, p.metric.into())?;
    let gap = |i: usize, j: usize| ranked.as_ref().map_or(0.0, |r| weight_l1(&r[i], &r[j]));
    let tie_break: Option<TieBreak<'_>> = ranked.is_some().then_some(&gap);
    let k_max = args.k_max.min(d.n().saturating_sub(1));
    let selection = select_k_with(&d, args.k_min, k_max, p.seed, p.restarts, p.max_iter, tie_break)
        .data(|| "selecting K".into())?;
    let mut table = String::from("k\tsilhouette\tcost\n");
    for s in &selection.scores {
        let _ = writeln!(table, "{}\t{:.4}\t{:.6}", s.k, s.silhouette, s.cost);
    }
    eprint!("{table}");
    #[derive(serde::Serialize)]
    struct Doc<'a> {
        k: usize,
        scores: &'a [KScore],
    }
    let doc = Doc {
        k: selection.k,
        scores: &selection.scores,
    };
    emit(args.out.out.as_deref(), &json_text(&doc)?)
}

fn graph(args: GraphArgs) -> CmdResult {
    let table = load_table(&args.attributions)?;
    let text = std::fs::read_to_string(&args.map).data(|| format!("reading {}", args.map.display()))?;
    let map = GlobalAttributionMap::from_json(&text).data(|| format!("parsing {}", args.map.display()))?;
    let metric = args.metric.map_or(map.config.metric, Metric::from);
    let dot = export_rank_graph(&ranked(&table)?, &map, metric).data(|| "building the graph".into())?;
    emit(args.out.out.as_deref(), &dot)
}

fn write_attributions(run: &ExperimentRun, path: &Path) -> CmdResult {
    let table = AttributionTable::new(run.explained.feature_names.clone(), run.attributions.clone())
        .map_err(|e| Failure::Internal(e.into()))?;
    emit(
        Some(path),
        &table.to_csv_string().map_err(|e| Failure::Internal(e.into()))?,
    )
}

fn experiment(args: ExperimentArgs) -> CmdResult {
    match args.which {
        ExperimentKind::Synthetic {
            variant,
            seed,
            attributions_out,
            out,
        } => {
            let run = pipeline_synthetic(variant.into(), seed).data(|| "running the synthetic experiment".into())?;
            if let Some(path) = &attributions_out {
                write_attributions(&run, path)?;
            }
            emit(out.out.as_deref(), &json_text(&run.report)?)
        }
        ExperimentKind::Iris {
            seed,
            attributions_out,
            graph_out,
            out,
        } => {
            let run = pipeline_iris(seed).data(|| "running the Iris experiment".into())?;
            if let Some(path) = &attributions_out {
                write_attributions(&run, path)?;
            }
            if let Some(path) = &graph_out {
                let ranked = run
                    .attributions
                    .iter()
                    .map(|w| gam_core::rank::normalize_weights(w))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Failure::Internal(e.into()))?;
                let dot = export_rank_graph(&ranked, &run.report.map, run.report.map.config.metric)
                    .map_err(|e| Failure::Internal(e.into()))?;
                emit(Some(path), &dot)?;
            }
            emit(out.out.as_deref(), &json_text(&run.report)?)
        }
    }
}
