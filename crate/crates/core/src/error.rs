use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("genome length {len} outside bounds [{min}, {max}]")]
    GenomeLength { len: usize, min: usize, max: usize },

    #[error("mutation rate {value} outside [0, 1]")]
    MutationRate { value: f64 },

    #[error("probability vector not normalized: sum = {sum}")]
    NotNormalized { sum: f64 },

    #[error("probability vector has negative entry {value}")]
    NegativeProbability { value: f64 },

    #[error("series too short: need at least 2 aligned steps, got {len}")]
    SeriesTooShort { len: usize },

    #[error("series length mismatch: source has {source_len}, target has {target_len}")]
    SeriesLengthMismatch { source_len: usize, target_len: usize },

    #[error("history lengths other than k = l = 1 are not supported (got k = {k}, l = {l})")]
    UnsupportedHistory { k: usize, l: usize },

    #[error("knockout assay requires a perfect brain: score {score} < {perfect}")]
    NotPerfect { score: u32, perfect: u32 },

    #[error("need at least {need} samples per class for a Gaussian fit, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("sample standard deviation is zero; Gaussian fit is degenerate")]
    DegenerateFit,

    #[error("erfc_inv argument {value} outside open interval (0, 2)")]
    ErfcInvDomain { value: f64 },

    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),

    #[error("malformed brain description: {0}")]
    MalformedBrain(String),

    #[error("malformed genome file: {0}")]
    MalformedGenome(String),

    #[error("no brain reports found in directory")]
    EmptyReportSet,

    #[error("threshold grids differ across reports; cannot pool")]
    GridMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
