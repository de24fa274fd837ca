//! End-to-end orchestration of the hybrid forecaster: data preparation
//! (denoise, featurize, scale, window), network training, AR residual
//! modelling, rolling evaluation with RMSE / MAPE / directional accuracy,
//! and the ablation benchmark grid.

mod benchmark;
mod metrics;
mod pipeline;
mod report;
mod svg;

pub use benchmark::{
    full_grid, run_benchmark, ArchVariant, BenchmarkCell, BenchmarkGrid, CellReport,
    PlainRecurrent,
};
pub use metrics::{combine, directional_accuracy, mape, residual_series, rmse, MetricsError};
pub use pipeline::{
    compute_metrics, evaluate, fit_hybrid, fit_hybrid_prepared, prepare, prepare_with,
    FittedTransforms, HybridModel, Prepared, ScalerSet,
};
pub use report::{ArimaSummary, ForecastReport, Metrics, Provenance};
pub use svg::write_plot;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
    #[error(transparent)]
    Wavelet(#[from] crate::wavelet::WaveletError),
    #[error(transparent)]
    Indicator(#[from] crate::indicators::IndicatorError),
    #[error(transparent)]
    Arima(#[from] crate::arima::ArimaError),
    #[error(transparent)]
    Arnn(#[from] crate::arnn::ArnnError),
    #[error(transparent)]
    Nn(#[from] crate::nn::NnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("invalid pipeline input: {0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// CLI exit code: 0 success, 2 data error, 3 numeric failure, 4 config.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 4,
            PipelineError::Arnn(crate::arnn::ArnnError::NanLoss { .. }) => 3,
            _ => 2,
        }
    }
}
