use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use fxcast::arima::ArimaModel;
use fxcast::arnn::{load_weights, save_weights, OptimizerKind, TrainMeta};
use fxcast::config::{ConfigError, PipelineConfig, SigmaScope};
use fxcast::data::{load_csv, CsvSchema};
use fxcast::hybrid::{
    evaluate, fit_hybrid, full_grid, prepare_with, run_benchmark, write_plot, FittedTransforms,
    HybridModel, PipelineError,
};
use fxcast::wavelet::{denoise, BoundaryMode, WaveletFilter};

/// Hybrid forex forecasting: wavelet denoising, attention encoder-decoder
/// network, ARIMA residual correction.
#[derive(Parser)]
#[command(name = "fxcast", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArg {
    /// TOML pipeline configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Wavelet-denoise a bar CSV column and append it as `<column>_denoised`.
    Denoise {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Price column to denoise.
        #[arg(long, default_value = "close")]
        column: String,
        #[arg(long, default_value = "sym15")]
        wavelet: String,
        #[arg(long, default_value_t = 4)]
        level: usize,
        /// Threshold rule (only `universal-hard` is implemented).
        #[arg(long, default_value = "universal-hard")]
        threshold: String,
    },
    /// Compute the 16-indicator feature matrix as CSV.
    Features {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Wavelet-denoise each indicator column.
        #[arg(long)]
        denoise_features: bool,
    },
    /// Train the hybrid model (network + AR residual model).
    Train {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        input: PathBuf,
        /// Output prefix: writes `<model>.arnn` and `<model>.json`.
        #[arg(long)]
        model: PathBuf,
        /// Optional evaluation report JSON written after training.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        overrides: TrainOverrides,
    },
    /// Per-sample predictions over the test split, as CSV.
    Predict {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Rolling one-step evaluation over the test split; JSON report.
    Evaluate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Optional SVG plot of predictions vs. truth.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Samples shown in the plot.
        #[arg(long, default_value_t = 300)]
        plot_window: usize,
    },
    /// Ablation grid: {RNN, LSTM, ARNN, ARNN+ARIMA} x {raw, denoised}.
    Benchmark {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Comma-separated variants to run (default: all four).
        #[arg(long, value_delimiter = ',')]
        variants: Vec<String>,
    },
}

/// Command-line overrides of config knobs.
#[derive(Args, Clone, Default)]
struct TrainOverrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Drop the ARIMA residual model (pure network).
    #[arg(long)]
    no_arima: bool,
    /// Refit the residual model every k test steps (0 = never).
    #[arg(long)]
    refit_every: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Denoise the decoder close-price input.
    #[arg(long)]
    denoise: Option<bool>,
    /// Denoise the encoder indicator columns.
    #[arg(long)]
    denoise_features: Option<bool>,
    #[arg(long)]
    wavelet: Option<String>,
    #[arg(long)]
    level: Option<usize>,
    /// Estimate thresholds on the whole series instead of the train split.
    #[arg(long)]
    full_series_sigma: bool,
    /// Initial LSTM forget-gate bias.
    #[arg(long)]
    forget_bias: Option<f64>,
    /// Simple-RNN cells carry a bias term.
    #[arg(long)]
    rnn_bias: Option<bool>,
    /// `adam` or `sgd`.
    #[arg(long)]
    optimizer: Option<String>,
}

impl TrainOverrides {
    fn apply(&self, config: &mut PipelineConfig) -> Result<(), ConfigError> {
        if let Some(v) = self.seed {
            config.train.seed = v;
        }
        if let Some(v) = self.epochs {
            config.train.epochs = v;
        }
        if let Some(v) = self.batch_size {
            config.train.batch_size = v;
        }
        if let Some(v) = self.learning_rate {
            config.train.learning_rate = v;
        }
        if self.no_arima {
            config.arima.enabled = false;
        }
        if let Some(v) = self.refit_every {
            config.arima.refit_every = v;
        }
        if let Some(v) = self.horizon {
            config.data.horizon = v;
        }
        if let Some(v) = self.denoise {
            config.wavelet.denoise = v;
        }
        if let Some(v) = self.denoise_features {
            config.wavelet.denoise_features = v;
        }
        if let Some(v) = &self.wavelet {
            config.wavelet.name = v.clone();
        }
        if let Some(v) = self.level {
            config.wavelet.level = v;
        }
        if self.full_series_sigma {
            config.wavelet.sigma_scope = SigmaScope::FullSeries;
        }
        if let Some(v) = self.forget_bias {
            config.train.forget_bias = v;
        }
        if let Some(v) = self.rnn_bias {
            config.arnn.rnn_bias = v;
        }
        if let Some(v) = &self.optimizer {
            config.train.optimizer = match v.as_str() {
                "adam" => OptimizerKind::Adam,
                "sgd" => OptimizerKind::Sgd,
                other => {
                    return Err(ConfigError::Invalid(format!(
                        "unknown optimizer `{other}` (adam or sgd)"
                    )))
                }
            };
        }
        config.validate()
    }
}

/// Everything except the weight tensors, stored beside the `.arnn` file.
#[derive(Serialize, Deserialize)]
struct ModelSidecar {
    config: PipelineConfig,
    transforms: FittedTransforms,
    residual_model: Option<ArimaModel>,
    train_residuals: Vec<f64>,
    weights_sha256: String,
    warnings: Vec<String>,
    meta: TrainMeta,
}

fn save_model(model: &HybridModel, prefix: &PathBuf) -> Result<(), PipelineError> {
    let weights_path = prefix.with_extension("arnn");
    let sidecar_path = prefix.with_extension("json");
    save_weights(&model.arnn, &weights_path).map_err(PipelineError::Arnn)?;
    let sidecar = ModelSidecar {
        config: model.config.clone(),
        transforms: model.transforms.clone(),
        residual_model: model.residual_model.clone(),
        train_residuals: model.train_residuals.clone(),
        weights_sha256: model.weights_sha256.clone(),
        warnings: model.warnings.clone(),
        meta: model.arnn.meta.clone(),
    };
    std::fs::write(
        &sidecar_path,
        serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
    )?;
    Ok(())
}

fn load_model(prefix: &PathBuf) -> Result<HybridModel, PipelineError> {
    let weights_path = prefix.with_extension("arnn");
    let sidecar_path = prefix.with_extension("json");
    let mut weights = load_weights(&weights_path).map_err(PipelineError::Arnn)?;
    let text = std::fs::read_to_string(&sidecar_path)?;
    let sidecar: ModelSidecar = serde_json::from_str(&text)
        .map_err(|e| PipelineError::Invalid(format!("bad model sidecar: {e}")))?;
    let hash = weights.content_hash();
    if hash != sidecar.weights_sha256 {
        return Err(PipelineError::Invalid(format!(
            "weight file does not match sidecar provenance: {hash} vs {}",
            sidecar.weights_sha256
        )));
    }
    weights.meta = sidecar.meta;
    Ok(HybridModel {
        arnn: weights,
        residual_model: sidecar.residual_model,
        transforms: sidecar.transforms,
        config: sidecar.config,
        train_residuals: sidecar.train_residuals,
        weights_sha256: sidecar.weights_sha256,
        warnings: sidecar.warnings,
    })
}

fn load_config(arg: &ConfigArg) -> Result<PipelineConfig, ConfigError> {
    match &arg.config {
        Some(path) => PipelineConfig::load(path),
        None => Ok(PipelineConfig::default()),
    }
}

fn run() -> Result<(), PipelineError> {
    match Cli::parse().command {
        Command::Denoise {
            config: _,
            input,
            output,
            column,
            wavelet,
            level,
            threshold,
        } => {
            if threshold != "universal-hard" {
                return Err(PipelineError::Config(ConfigError::Invalid(format!(
                    "unknown threshold rule `{threshold}`"
                ))));
            }
            let bars = load_csv(&input, CsvSchema::default())?;
            let values: Vec<f64> = match column.as_str() {
                "open" => bars.bars().iter().map(|b| b.open).collect(),
                "high" => bars.bars().iter().map(|b| b.high).collect(),
                "low" => bars.bars().iter().map(|b| b.low).collect(),
                "close" => bars.closes(),
                other => {
                    return Err(PipelineError::Config(ConfigError::Invalid(format!(
                        "unknown column `{other}`"
                    ))))
                }
            };
            let filter = WaveletFilter::by_name(&wavelet)?;
            let denoised = denoise(&values, &filter, level, BoundaryMode::Symmetric)?;
            let mut writer = csv::Writer::from_path(&output)
                .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            writer
                .write_record([
                    "timestamp",
                    "open",
                    "high",
                    "low",
                    "close",
                    "volume",
                    &format!("{column}_denoised"),
                ])
                .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            for (bar, d) in bars.bars().iter().zip(&denoised) {
                writer
                    .write_record([
                        bar.timestamp.to_string(),
                        bar.open.to_string(),
                        bar.high.to_string(),
                        bar.low.to_string(),
                        bar.close.to_string(),
                        bar.volume.to_string(),
                        d.to_string(),
                    ])
                    .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            }
            writer.flush()?;
            eprintln!("denoised {} rows -> {}", bars.len(), output.display());
            Ok(())
        }
        Command::Features {
            config,
            input,
            output,
            denoise_features,
        } => {
            let config = load_config(&config)?;
            let bars = load_csv(&input, CsvSchema::default())?;
            let fm =
                fxcast::indicators::compute_feature_matrix(&bars, &config.indicators.to_specs())?;
            let mut columns: Vec<Vec<f64>> =
                (0..fm.values.cols()).map(|j| fm.values.column(j)).collect();
            if denoise_features {
                let filter = WaveletFilter::by_name(&config.wavelet.name)?;
                for col in &mut columns {
                    *col = denoise(col, &filter, config.wavelet.level, config.wavelet.boundary)?;
                }
            }
            let mut writer = csv::Writer::from_path(&output)
                .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            let mut header = vec!["timestamp".to_string()];
            header.extend(fm.column_names.iter().cloned());
            writer
                .write_record(&header)
                .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            for i in 0..fm.values.rows() {
                let mut record = vec![fm.timestamps[i].to_string()];
                record.extend(columns.iter().map(|c| c[i].to_string()));
                writer
                    .write_record(&record)
                    .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            }
            writer.flush()?;
            eprintln!(
                "wrote {} rows x {} indicators (warm-up {} rows dropped) -> {}",
                fm.values.rows(),
                fm.values.cols(),
                fm.warmup,
                output.display()
            );
            Ok(())
        }
        Command::Train {
            config,
            input,
            model,
            report,
            overrides,
        } => {
            let mut config = load_config(&config)?;
            overrides.apply(&mut config)?;
            let bars = load_csv(&input, CsvSchema::default())?;
            let (hybrid, prepared) = fit_hybrid(&bars, &config)?;
            save_model(&hybrid, &model)?;
            for warning in &hybrid.warnings {
                eprintln!("warning: {warning}");
            }
            eprintln!(
                "trained on {} windows (val {}, test {}), weights sha256 {}",
                prepared.train.len(),
                prepared.val.len(),
                prepared.test.len(),
                &hybrid.weights_sha256[..16]
            );
            if let Some(report_path) = report {
                let eval = evaluate(&hybrid, &prepared)?;
                std::fs::write(&report_path, eval.to_json())?;
                eprintln!("report -> {}", report_path.display());
            }
            Ok(())
        }
        Command::Predict {
            config: _,
            input,
            model,
            output,
        } => {
            let hybrid = load_model(&model)?;
            let bars = load_csv(&input, CsvSchema::default())?;
            let prepared = prepare_with(&bars, &hybrid.config, Some(&hybrid.transforms))?;
            let report = evaluate(&hybrid, &prepared)?;
            let mut writer = csv::Writer::from_path(&output)
                .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            writer
                .write_record([
                    "timestamp",
                    "arnn_prediction",
                    "residual_forecast",
                    "hybrid_prediction",
                    "actual",
                ])
                .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            for i in 0..report.predictions.len() {
                let arnn = report.predictions[i] - report.residual_forecasts[i];
                writer
                    .write_record([
                        prepared.test_target_timestamps[i].to_string(),
                        arnn.to_string(),
                        report.residual_forecasts[i].to_string(),
                        report.predictions[i].to_string(),
                        report.ground_truth[i].to_string(),
                    ])
                    .map_err(|e| PipelineError::Invalid(e.to_string()))?;
            }
            writer.flush()?;
            eprintln!(
                "{} predictions -> {}",
                report.predictions.len(),
                output.display()
            );
            Ok(())
        }
        Command::Evaluate {
            config: _,
            input,
            model,
            report,
            plot,
            plot_window,
        } => {
            let hybrid = load_model(&model)?;
            let bars = load_csv(&input, CsvSchema::default())?;
            let prepared = prepare_with(&bars, &hybrid.config, Some(&hybrid.transforms))?;
            let eval = evaluate(&hybrid, &prepared)?;
            std::fs::write(&report, eval.to_json())?;
            println!(
                "rmse {:.6}  mape {:.4}%  da {:.4}  (normalized rmse {:.6})",
                eval.metrics.rmse,
                eval.metrics.mape_percent,
                eval.metrics.directional_accuracy,
                eval.metrics.rmse_normalized
            );
            if let Some(plot_path) = plot {
                write_plot(&plot_path, &eval.ground_truth, &eval.predictions, plot_window)?;
                eprintln!("plot -> {}", plot_path.display());
            }
            eprintln!("report -> {}", report.display());
            Ok(())
        }
        Command::Benchmark {
            config,
            input,
            report,
            variants,
        } => {
            let config = load_config(&config)?;
            let bars = load_csv(&input, CsvSchema::default())?;
            let cells = if variants.is_empty() {
                full_grid()
            } else {
                let mut cells = Vec::new();
                for name in &variants {
                    let variant = match name.as_str() {
                        "rnn" => fxcast::hybrid::ArchVariant::SimpleRnn,
                        "lstm" => fxcast::hybrid::ArchVariant::Lstm,
                        "arnn" => fxcast::hybrid::ArchVariant::Arnn,
                        "arnn-arima" => fxcast::hybrid::ArchVariant::ArnnArima,
                        other => {
                            return Err(PipelineError::Config(ConfigError::Invalid(format!(
                                "unknown variant `{other}` (rnn, lstm, arnn, arnn-arima)"
                            ))))
                        }
                    };
                    for denoised in [false, true] {
                        cells.push(fxcast::hybrid::BenchmarkCell { variant, denoised });
                    }
                }
                cells
            };
            let grid = run_benchmark(&bars, &config, &cells);
            std::fs::write(&report, grid.to_json())?;
            println!(
                "{:<12} {:>8} {:>12} {:>9} {:>7} {:>9}",
                "arch", "denoised", "rmse", "mape%", "da", "train_s"
            );
            for cell in &grid.cells {
                match (&cell.metrics, &cell.error) {
                    (Some(m), _) => println!(
                        "{:<12} {:>8} {:>12.6} {:>9.4} {:>7.4} {:>9.2}",
                        cell.variant.label(),
                        cell.denoised,
                        m.rmse,
                        m.mape_percent,
                        m.directional_accuracy,
                        cell.train_seconds
                    ),
                    (None, Some(e)) => println!(
                        "{:<12} {:>8} failed: {e}",
                        cell.variant.label(),
                        cell.denoised
                    ),
                    _ => unreachable!("cell has either metrics or an error"),
                }
            }
            eprintln!("report -> {}", report.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
