use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gam_core::experiment::SyntheticVariant;
use gam_core::rank::Metric;

#[derive(Debug, Parser)]
#[command(
    name = "gam",
    version,
    about = "Global attribution maps from local feature attributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the two-feature synthetic dataset as CSV.
    Synth(SynthArgs),
    /// Train a feed-forward classifier on a CSV dataset.
    Train(TrainArgs),
    /// Compute one local attribution per dataset row.
    Explain(ExplainArgs),
    /// Pairwise rank-distance matrix of an attribution CSV.
    Distances(DistancesArgs),
    /// K-medoids over attributions or a distance matrix.
    Cluster(ClusterArgs),
    /// Build a global attribution map.
    Gam(GamArgs),
    /// Silhouette of every K in a range.
    SelectK(SelectKArgs),
    /// Export the rank-distance graph of a map as DOT.
    Graph(GraphArgs),
    /// Run a bundled experiment end to end.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Kendall,
    Spearman,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Kendall => Metric::Kendall,
            MetricArg::Spearman => Metric::Spearman,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Balanced,
    Unbalanced,
}

impl From<VariantArg> for SyntheticVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Balanced => SyntheticVariant::Balanced,
            VariantArg::Unbalanced => SyntheticVariant::Unbalanced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lime,
    Ig,
    Deeplift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    /// Sigmoid for two classes, softmax otherwise.
    Auto,
    Sigmoid,
    Softmax,
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Expand text columns into indicator features.
    #[arg(long)]
    pub one_hot: bool,
}

#[derive(Debug, Args)]
pub struct ClusterParams {
    #[arg(long, value_enum, default_value = "kendall")]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = gam_core::cluster::DEFAULT_RESTARTS, value_parser = positive)]
    pub restarts: usize,
    #[arg(long, default_value_t = gam_core::cluster::DEFAULT_MAX_ITER, value_parser = positive)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value = "balanced", conflicts_with = "fraction_a")]
    pub variant: VariantArg,
    /// Share of rows from the group where feature A decides the class.
    #[arg(long)]
    pub fraction_a: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub rows: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Also write the generating group of every row, one per line.
    #[arg(long)]
    pub groups_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Hidden ReLU layer widths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub hidden: Vec<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    pub output: OutputArg,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Held-out dataset CSV to report accuracy on.
    #[arg(long)]
    pub validate: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Dataset whose per-feature statistics scale LIME perturbations;
    /// defaults to the explained data.
    #[arg(long)]
    pub train_data: Option<PathBuf>,
    /// Explain settings as JSON; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Integrated Gradients steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// LIME perturbations per row.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub kernel_width: Option<f64>,
    /// Reference input for IG and DeepLIFT, a one-row CSV.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Output index to explain, or `predicted`.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    #[arg(long)]
    pub attributions: PathBuf,
    #[arg(long, value_enum, default_value = "kendall")]
    pub metric: MetricArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MatrixSource {
    /// Attribution CSV.
    #[arg(long)]
    pub attributions: Option<PathBuf>,
    /// Precomputed distance matrix CSV.
    #[arg(long)]
    pub distances: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub source: MatrixSource,
    #[arg(long, value_parser = positive)]
    pub k: usize,
    #[command(flatten)]
    pub params: ClusterParams,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct GamArgs {
    #[arg(long)]
    pub attributions: PathBuf,
    #[arg(long, conflicts_with = "auto_k", value_parser = positive)]
    pub k: Option<usize>,
    /// Choose K by silhouette within MIN..=MAX (default 2..=8).
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    pub auto_k: Option<Vec<usize>>,
    #[command(flatten)]
    pub params: ClusterParams,
    /// Raw rows behind the attributions, for per-cluster feature statistics.
    #[arg(long, requires = "summary_out")]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    #[arg(long, requires = "data")]
    pub summary_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    #[command(flatten)]
    pub source: MatrixSource,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
    #[command(flatten)]
    pub params: ClusterParams,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub attributions: PathBuf,
    /// Map JSON written by `gam gam`.
    #[arg(long)]
    pub map: PathBuf,
    /// Defaults to the metric recorded in the map.
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    pub which: ExperimentKind,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentKind {
    /// Two-feature synthetic mixture with K = 2.
    Synthetic {
        #[arg(long, value_enum, default_value = "balanced")]
        variant: VariantArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the attribution CSV.
        #[arg(long)]
        attributions_out: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Iris flowers with K chosen over 2..=4.
    Iris {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        attributions_out: Option<PathBuf>,
        /// Also write the rank-distance graph as DOT.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}
