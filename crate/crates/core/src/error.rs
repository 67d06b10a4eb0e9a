//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by dataset handling, model fitting, diagnostics,
/// rule mining and artifact IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema must declare exactly one target column, found {0}")]
    TargetCount(usize),

    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),

    #[error("invalid declared levels for column '{column}': {reason}")]
    BadDeclaredLevels { column: String, reason: String },

    #[error("header mismatch at position {position}: expected '{expected}', found '{found}'")]
    HeaderMismatch {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("header has {found} columns, schema declares {expected}")]
    HeaderWidth { expected: usize, found: usize },

    #[error("cannot parse cell at row {row}, column '{column}': '{value}' is not a valid {expected}")]
    ParseCell {
        row: usize,
        column: String,
        value: String,
        expected: String,
    },

    #[error("row {row}, column '{column}': value '{value}' is not among the declared levels")]
    UnknownLevel {
        row: usize,
        column: String,
        value: String,
    },

    #[error("target column '{column}' holds labels other than '{negative}'/'{positive}' (rows {rows:?})")]
    TargetLabelMismatch {
        column: String,
        negative: String,
        positive: String,
        rows: Vec<usize>,
    },

    #[error("target label '{0}' does not occur in the data")]
    TargetLabelAbsent(String),

    #[error("target column is not encoded to 0/1; call encode_target first")]
    TargetNotEncoded,

    #[error("no such column: '{0}'")]
    NoSuchColumn(String),

    #[error("column '{0}' does not have the required role {1}")]
    WrongRole(String, &'static str),

    #[error("continuous column '{0}' has no binning specification")]
    UnbinnedContinuous(String),

    #[error("column '{0}' has fewer than two distinct non-missing values")]
    DegenerateColumn(String),

    #[error("bin count must be at least 2, got {0}")]
    BadBinCount(usize),

    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),

    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },

    #[error("only one target class present among the selected rows ({0})")]
    SingleClass(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("design matrix has no usable rows after dropping incomplete records")]
    EmptyDesign,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("information matrix is singular; column '{0}' is collinear with earlier columns")]
    SingularInformation(String),

    #[error("fit did not converge; statistics are suppressed")]
    NotConverged,

    #[error("invalid argument: {0}")]
    BadArgument(String),

    #[error("model −2LL {model} exceeds null −2LL {null}; the nested fit is worse than its baseline")]
    NegativeLikelihoodRatio { null: f64, model: f64 },

    #[error("condition itemset has zero support; confidence is undefined")]
    ZeroConditionSupport,

    #[error("item catalog is empty")]
    EmptyCatalog,

    #[error("rule list is empty")]
    EmptyRuleList,

    #[error("unknown report format '{0}' (expected text, json or csv)")]
    UnknownFormat(String),

    #[error("cannot parse model file at byte offset {offset} (line {line}, column {column}): {message}")]
    ArtifactParse {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("model file format version {found} is not supported (expected {expected})")]
    ArtifactVersion { expected: u32, found: u32 },

    #[error("schema fingerprint mismatch: artifact was built against {expected}, dataset hashes to {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("field '{0}' is not finite; refusing to serialize")]
    NonFiniteField(String),
}

pub type Result<T> = std::result::Result<T, Error>;
