//! Bar-series ingestion, chronological splitting, min-max scaling, and
//! sliding-window slicing for the sequence model.

mod bars;
mod matrix;
mod scale;
mod split;
mod window;

pub use bars::{load_csv, write_csv, Bar, BarSeries, CsvSchema, TimestampFormat};
pub use matrix::Matrix;
pub use scale::MinMaxScaler;
pub use split::{chronological_split, SplitSpec};
pub use window::{make_windows, WindowedDataset};

use thiserror::Error;

/// Errors produced while loading, splitting, scaling, or windowing data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("row {row}: timestamps must be strictly increasing ({prev} then {curr})")]
    NonMonotonicTimestamps { row: usize, prev: i64, curr: i64 },
    #[error("row {row}: timestamp {ts} is off the {interval}s interval grid")]
    OffGrid { row: usize, ts: i64, interval: i64 },
    #[error("series of length {len} is too short: {reason}")]
    SeriesTooShort { len: usize, reason: String },
    #[error("split fraction {value} out of range: {name} must lie strictly in (0, 1)")]
    BadFraction { name: &'static str, value: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("scaler is not fitted for this input: {0}")]
    UnfittedScaler(String),
    #[error("need at least {need} rows, got {got}")]
    NotEnoughRows { need: usize, got: usize },
}
