use thiserror::Error;

/// Errors raised anywhere in the attribution pipeline.
#[derive(Debug, Error)]
pub enum GamError {
    #[error("attribution has no nonzero weight; normalization is undefined")]
    AllZeroAttribution,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("attribution needs at least 2 features, found {0}")]
    TooFewFeatures(usize),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("k must be at least 1")]
    KZero,
    #[error("k = {k} exceeds the number of points ({n})")]
    KTooLarge { k: usize, n: usize },
    #[error("medoid index {index} is invalid for {n} points")]
    InvalidMedoidIndex { index: usize, n: usize },
    #[error("cluster has no members")]
    EmptyCluster,
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("feature table has {found} rows, expected {expected}")]
    RowCountMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index {index} out of range (width {width})")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("malformed model file: {0}")]
    MalformedModelFile(String),
    #[error("sample count {0} must be even")]
    OddCount(usize),
    #[error("mixture fraction {fraction} leaves one group empty at n = {n}")]
    DegenerateFraction { fraction: f64, n: usize },
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("label column {0:?} not found")]
    UnknownLabelColumn(String),
    #[error("column {0:?} is not numeric; enable one-hot encoding")]
    NonNumericWithoutOneHot(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GamError>;

impl From<csv::Error> for GamError {
    fn from(err: csv::Error) -> Self {
        GamError::MalformedCsv(err.to_string())
    }
}
