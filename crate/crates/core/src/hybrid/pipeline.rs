use serde::{Deserialize, Serialize};

use crate::arima::{ArimaError, ArimaModel, ArimaOrder, ArimaState};
use crate::arnn::{self, ArnnWeights};
use crate::config::{PipelineConfig, SigmaScope};
use crate::data::{make_windows, BarSeries, Matrix, MinMaxScaler, SplitSpec, WindowedDataset};
use crate::indicators::compute_feature_matrix;
use crate::wavelet::{denoise_with_rule, BoundaryMode, ThresholdRule, WaveletFilter};

use super::metrics::{combine, directional_accuracy, mape, residual_series, rmse};
use super::report::{ArimaSummary, ForecastReport, Metrics, Provenance};
use super::PipelineError;

/// Min-max scalers for the three data streams, fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerSet {
    pub features: MinMaxScaler,
    pub exogenous: MinMaxScaler,
    pub target: MinMaxScaler,
}

/// Everything fitted on the training split that must be reused verbatim
/// when new data flows through the same model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedTransforms {
    pub scalers: ScalerSet,
    /// One rule per feature column (when feature denoising is on).
    pub feature_rules: Option<Vec<ThresholdRule>>,
    /// One rule per exogenous column (when close denoising is on).
    pub exo_rules: Option<Vec<ThresholdRule>>,
    /// Decomposition level actually used (the configured level, clamped to
    /// what the shortest segment supports).
    pub effective_level: usize,
}

/// Windowed, scaled datasets for the three chronological splits.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: WindowedDataset,
    pub val: WindowedDataset,
    pub test: WindowedDataset,
    pub transforms: FittedTransforms,
    /// Indicator warm-up rows dropped before splitting.
    pub warmup: usize,
    pub feature_names: Vec<String>,
    /// Timestamp of each test sample's target row.
    pub test_target_timestamps: Vec<i64>,
}

impl Prepared {
    /// Ground-truth prices for the test samples (anti-normalized targets).
    pub fn test_truth_prices(&self) -> Vec<f64> {
        self.transforms
            .scalers
            .target
            .invert_vector(&self.test.targets)
            .expect("target scaler is 1-column")
    }
}

fn split_bounds(n: usize, spec: SplitSpec) -> Result<(usize, usize), PipelineError> {
    spec.validate()?;
    let (train, val, test) = spec.lengths(n);
    if train == 0 || val == 0 || test == 0 {
        return Err(PipelineError::Invalid(format!(
            "split of {n} rows leaves an empty block ({train}/{val}/{test})"
        )));
    }
    Ok((train, train + val))
}

/// Deepest level the shortest segment supports, capped at `requested`.
fn feasible_level(min_len: usize, filter_len: usize, requested: usize) -> usize {
    let mut level = 0;
    let mut len = min_len;
    while level < requested && len >= filter_len {
        len = (len + filter_len - 1) / 2;
        level += 1;
    }
    level
}

/// Denoises one column per the sigma scope: with `TrainOnly` the rule comes
/// from the training segment and is applied segment by segment (no
/// lookahead); with `FullSeries` the whole column is treated at once.
fn denoise_column(
    column: &[f64],
    bounds: (usize, usize),
    filter: &WaveletFilter,
    level: usize,
    mode: BoundaryMode,
    scope: SigmaScope,
    rule: Option<&ThresholdRule>,
) -> Result<(Vec<f64>, ThresholdRule), PipelineError> {
    match scope {
        SigmaScope::FullSeries => {
            let rule = match rule {
                Some(r) => *r,
                None => ThresholdRule::estimate(column, filter, level, mode)?,
            };
            let out = denoise_with_rule(column, filter, level, mode, &rule)?;
            Ok((out, rule))
        }
        SigmaScope::TrainOnly => {
            let (train_end, val_end) = bounds;
            let rule = match rule {
                Some(r) => *r,
                None => ThresholdRule::estimate(&column[..train_end], filter, level, mode)?,
            };
            let mut out = Vec::with_capacity(column.len());
            for segment in [
                &column[..train_end],
                &column[train_end..val_end],
                &column[val_end..],
            ] {
                out.extend(denoise_with_rule(segment, filter, level, mode, &rule)?);
            }
            Ok((out, rule))
        }
    }
}

/// Runs the full data pipeline: indicators on raw bars (causal), optional
/// per-column wavelet denoising, train-only min-max scaling, and windowing
/// per split. `transforms` supplies pre-fitted scalers and thresholds when
/// reusing a trained model on new data.
pub fn prepare_with(
    bars: &BarSeries,
    config: &PipelineConfig,
    transforms: Option<&FittedTransforms>,
) -> Result<Prepared, PipelineError> {
    config.validate()?;
    let specs = config.indicators.to_specs();
    let fm = compute_feature_matrix(bars, &specs)?;
    let n = fm.values.rows();
    let aligned = &bars.bars()[fm.warmup..];

    let spec = SplitSpec {
        test_fraction: config.data.test_fraction,
        val_fraction_of_train: config.data.val_fraction_of_train,
    };
    let (train_end, val_end) = split_bounds(n, spec)?;
    let window = config.arnn.window;
    let horizon = config.data.horizon;
    for (name, len) in [
        ("train", train_end),
        ("validation", val_end - train_end),
        ("test", n - val_end),
    ] {
        if len < window + horizon {
            return Err(PipelineError::Invalid(format!(
                "{name} split has {len} rows; need at least window + horizon = {}",
                window + horizon
            )));
        }
    }

    let filter = WaveletFilter::by_name(&config.wavelet.name)?;
    let needs_wavelet = config.wavelet.denoise || config.wavelet.denoise_features;
    let effective_level = if let Some(t) = transforms {
        t.effective_level
    } else if needs_wavelet {
        let min_len = match config.wavelet.sigma_scope {
            SigmaScope::FullSeries => n,
            SigmaScope::TrainOnly => train_end.min(val_end - train_end).min(n - val_end),
        };
        let level = feasible_level(min_len, filter.len(), config.wavelet.level);
        if level == 0 {
            return Err(PipelineError::Invalid(format!(
                "shortest split ({min_len} rows) cannot support even one {}-tap decomposition level",
                filter.len()
            )));
        }
        level
    } else {
        config.wavelet.level
    };

    // Encoder features: optionally denoise each indicator column.
    let mode = config.wavelet.boundary;
    let scope = config.wavelet.sigma_scope;
    let n_feat = fm.values.cols();
    let mut feature_columns: Vec<Vec<f64>> = (0..n_feat).map(|j| fm.values.column(j)).collect();
    let mut feature_rules: Option<Vec<ThresholdRule>> = None;
    if config.wavelet.denoise_features {
        let mut rules = Vec::with_capacity(n_feat);
        for (j, col) in feature_columns.iter_mut().enumerate() {
            let prior = transforms.and_then(|t| t.feature_rules.as_ref()).map(|r| &r[j]);
            let (denoised, rule) = denoise_column(
                col,
                (train_end, val_end),
                &filter,
                effective_level,
                mode,
                scope,
                prior,
            )?;
            *col = denoised;
            rules.push(rule);
        }
        feature_rules = Some(rules);
    }
    let features = Matrix::from_columns(&feature_columns);

    // Decoder exogenous input: close (and high, low for wider n_exo).
    let n_exo = config.arnn.n_exo;
    if n_exo > 3 {
        return Err(PipelineError::Invalid(format!(
            "n_exo must be 1..=3 (close, high, low), got {n_exo}"
        )));
    }
    let mut exo_columns: Vec<Vec<f64>> = Vec::with_capacity(n_exo);
    exo_columns.push(aligned.iter().map(|b| b.close).collect());
    if n_exo >= 2 {
        exo_columns.push(aligned.iter().map(|b| b.high).collect());
    }
    if n_exo >= 3 {
        exo_columns.push(aligned.iter().map(|b| b.low).collect());
    }
    let mut exo_rules: Option<Vec<ThresholdRule>> = None;
    if config.wavelet.denoise {
        let mut rules = Vec::with_capacity(n_exo);
        for (j, col) in exo_columns.iter_mut().enumerate() {
            let prior = transforms.and_then(|t| t.exo_rules.as_ref()).map(|r| &r[j]);
            let (denoised, rule) = denoise_column(
                col,
                (train_end, val_end),
                &filter,
                effective_level,
                mode,
                scope,
                prior,
            )?;
            *col = denoised;
            rules.push(rule);
        }
        exo_rules = Some(rules);
    }
    let exogenous = Matrix::from_columns(&exo_columns);

    // Target: the raw close price (never denoised; metrics compare against
    // what actually happened).
    let target: Vec<f64> = aligned.iter().map(|b| b.close).collect();

    let scalers = match transforms {
        Some(t) => t.scalers.clone(),
        None => ScalerSet {
            features: MinMaxScaler::fit(&features.slice_rows(0, train_end))?,
            exogenous: MinMaxScaler::fit(&exogenous.slice_rows(0, train_end))?,
            target: MinMaxScaler::fit_vector(&target[..train_end])?,
        },
    };
    let features_scaled = scalers.features.apply(&features)?;
    let exo_scaled = scalers.exogenous.apply(&exogenous)?;
    let target_scaled = scalers.target.apply_vector(&target)?;

    let make = |lo: usize, hi: usize| -> Result<WindowedDataset, PipelineError> {
        Ok(make_windows(
            &features_scaled.slice_rows(lo, hi),
            &exo_scaled.slice_rows(lo, hi),
            &target_scaled[lo..hi],
            window,
            horizon,
        )?)
    };
    let train = make(0, train_end)?;
    let val = make(train_end, val_end)?;
    let test = make(val_end, n)?;

    let test_timestamps: Vec<i64> = (0..test.len())
        .map(|i| aligned[val_end + i + window + horizon - 1].timestamp)
        .collect();

    Ok(Prepared {
        train,
        val,
        test,
        transforms: FittedTransforms {
            scalers,
            feature_rules,
            exo_rules,
            effective_level,
        },
        warmup: fm.warmup,
        feature_names: fm.column_names,
        test_target_timestamps: test_timestamps,
    })
}

/// [`prepare_with`] fitting all transforms from scratch.
pub fn prepare(bars: &BarSeries, config: &PipelineConfig) -> Result<Prepared, PipelineError> {
    prepare_with(bars, config, None)
}

/// The trained hybrid: network weights, the AR residual model fitted on the
/// network's training residuals, and every transform needed to reproduce
/// the data path.
#[derive(Debug, Clone)]
pub struct HybridModel {
    pub arnn: ArnnWeights,
    pub residual_model: Option<ArimaModel>,
    pub transforms: FittedTransforms,
    pub config: PipelineConfig,
    /// Training-split residuals (price units) the residual model was fitted
    /// on; kept for periodic refits during evaluation.
    pub train_residuals: Vec<f64>,
    pub weights_sha256: String,
    pub warnings: Vec<String>,
}

fn network_predictions_price(
    weights: &ArnnWeights,
    ds: &WindowedDataset,
    scalers: &ScalerSet,
) -> Result<Vec<f64>, PipelineError> {
    let mut norm = Vec::with_capacity(ds.len());
    for i in 0..ds.len() {
        norm.push(weights.predict(&ds.inputs[i], &ds.exogenous[i])?);
    }
    Ok(scalers.target.invert_vector(&norm)?)
}

/// Trains the full hybrid: prepare data, train the network, compute
/// training residuals in price units, fit the AR residual model on them.
pub fn fit_hybrid(
    bars: &BarSeries,
    config: &PipelineConfig,
) -> Result<(HybridModel, Prepared), PipelineError> {
    let prepared = prepare(bars, config)?;
    let model = fit_hybrid_prepared(&prepared, config)?;
    Ok((model, prepared))
}

/// Hybrid fitting from already-prepared datasets; used by the benchmark
/// and criterion-style tests that build synthetic feature sets directly.
pub fn fit_hybrid_prepared(
    prepared: &Prepared,
    config: &PipelineConfig,
) -> Result<HybridModel, PipelineError> {
    let mut warnings = Vec::new();
    let weights = arnn::train(&prepared.train, Some(&prepared.val), &config.arnn, &config.train)?;

    let train_truth = prepared
        .transforms
        .scalers
        .target
        .invert_vector(&prepared.train.targets)?;
    let train_pred = network_predictions_price(&weights, &prepared.train, &prepared.transforms.scalers)?;
    let residuals = residual_series(&train_truth, &train_pred)?;

    let residual_model = if config.arima.enabled {
        let order = ArimaOrder::new(config.arima.p, config.arima.d, config.arima.q)?;
        match ArimaModel::fit(&residuals, order) {
            Ok(model) => {
                if !model.stationary {
                    warnings.push(
                        "residual AR polynomial has roots on or inside the unit circle; forecasts may not mean-revert"
                            .to_string(),
                    );
                }
                Some(model)
            }
            Err(ArimaError::SingularDesign) => {
                warnings.push(
                    "residual series is degenerate (singular design); falling back to a zero residual forecast"
                        .to_string(),
                );
                None
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    let weights_sha256 = weights.content_hash();
    Ok(HybridModel {
        arnn: weights,
        residual_model,
        transforms: prepared.transforms.clone(),
        config: config.clone(),
        train_residuals: residuals,
        weights_sha256,
        warnings,
    })
}

/// Rolling one-step evaluation over the test split: the network predicts
/// each step, the residual model's state advances on the realized network
/// residual, and the final prediction is their sum (price units).
pub fn evaluate(model: &HybridModel, prepared: &Prepared) -> Result<ForecastReport, PipelineError> {
    let started = std::time::Instant::now();
    let test = &prepared.test;
    if test.is_empty() {
        return Err(PipelineError::Invalid("test split has no samples".into()));
    }
    let scalers = &model.transforms.scalers;
    let truth = prepared.test_truth_prices();
    let arnn_pred = network_predictions_price(&model.arnn, test, scalers)?;

    let refit_every = model.config.arima.refit_every;
    let mut residual_forecasts = Vec::with_capacity(test.len());
    let mut observed_residuals: Vec<f64> = Vec::with_capacity(test.len());
    let mut current_model = model.residual_model.clone();
    let mut state: Option<ArimaState> = current_model.as_ref().map(|m| m.initial_state());
    for i in 0..test.len() {
        let r_hat = match (&current_model, &state) {
            (Some(m), Some(s)) => m.one_step(s),
            _ => 0.0,
        };
        residual_forecasts.push(r_hat);
        let observed = truth[i] - arnn_pred[i];
        observed_residuals.push(observed);
        if let (Some(m), Some(s)) = (&current_model, &mut state) {
            let (_, next) = m.step(s, observed);
            *s = next;
        }
        // Periodic refit on everything seen so far (training residuals
        // followed by realized test residuals).
        if refit_every > 0 && (i + 1) % refit_every == 0 && current_model.is_some() {
            let mut series = model.train_residuals.clone();
            series.extend_from_slice(&observed_residuals);
            let order = current_model.as_ref().expect("checked above").order;
            if let Ok(refitted) = ArimaModel::fit(&series, order) {
                state = Some(refitted.initial_state());
                current_model = Some(refitted);
            }
        }
    }

    let predictions = combine(&arnn_pred, &residual_forecasts)?;
    let metrics = compute_metrics(&predictions, &truth, scalers)?;
    let target_bounds = [
        scalers.target.x_min()[0],
        scalers.target.x_max()[0],
    ];

    Ok(ForecastReport {
        schema_version: 1,
        config: model.config.clone(),
        metrics,
        predictions,
        ground_truth: truth,
        residual_forecasts,
        target_bounds,
        provenance: Provenance {
            weights_sha256: model.weights_sha256.clone(),
            config_sha256: model.config.content_hash(),
            residual_model: model.residual_model.as_ref().map(ArimaSummary::from),
            warnings: model.warnings.clone(),
        },
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Price-unit and normalized-unit metrics for a prediction/truth pair.
pub fn compute_metrics(
    predictions: &[f64],
    truth: &[f64],
    scalers: &ScalerSet,
) -> Result<Metrics, PipelineError> {
    let pred_norm = scalers.target.apply_vector(predictions)?;
    let truth_norm = scalers.target.apply_vector(truth)?;
    Ok(Metrics {
        rmse: rmse(predictions, truth)?,
        mape_percent: mape(predictions, truth)?,
        directional_accuracy: directional_accuracy(predictions, truth)?,
        rmse_normalized: rmse(&pred_norm, &truth_norm)?,
        mape_normalized_percent: mape(&pred_norm, &truth_norm).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn quick_config() -> PipelineConfig {
        let mut config = PipelineConfig::default();
        config.arnn = crate::arnn::ArnnArchitecture {
            window: 6,
            encoder_layers: vec![8, 6],
            decoder_layers: vec![8, 6],
            step_feature_dim: 4,
            head_rnn_width: 6,
            head_dense: vec![4, 1],
            n_features: 16,
            n_exo: 1,
            rnn_bias: true,
        };
        config.train.epochs = 2;
        config.train.batch_size = 32;
        config.wavelet.level = 2;
        config
    }

    #[test]
    fn prepare_builds_disjoint_scaled_windows() {
        let bars = synth::random_walk_bars(1_200, 3);
        let config = quick_config();
        let prepared = prepare(&bars, &config).unwrap();
        assert_eq!(prepared.warmup, 43);
        let n = 1_200 - 43;
        let (train_len, val_len, test_len) = SplitSpec::default().lengths(n);
        assert_eq!(prepared.train.len(), train_len - 6 - 1 + 1);
        assert_eq!(prepared.val.len(), val_len - 6 - 1 + 1);
        assert_eq!(prepared.test.len(), test_len - 6 - 1 + 1);
        assert_eq!(prepared.test_target_timestamps.len(), prepared.test.len());
        // Train targets are scaled into [0, 1]; test may exceed slightly.
        for t in &prepared.train.targets {
            assert!((-1e-12..=1.0 + 1e-12).contains(t));
        }
    }

    #[test]
    fn scalers_do_not_see_test_rows() {
        let bars = synth::random_walk_bars(1_200, 4);
        let config = quick_config();
        let a = prepare(&bars, &config).unwrap();
        // Replace the last 100 bars with a wild excursion; training-split
        // transforms must be bit-identical.
        let mut mutated = bars.bars().to_vec();
        let n = mutated.len();
        for bar in &mut mutated[n - 100..] {
            bar.close *= 1.5;
            bar.high = bar.high.max(bar.close) * 1.5;
            bar.low = bar.low.min(bar.close);
            bar.open = bar.open.min(bar.high).max(bar.low);
        }
        let bars2 = crate::data::BarSeries::with_interval(mutated, 300).unwrap();
        let b = prepare(&bars2, &config).unwrap();
        assert_eq!(a.transforms.scalers, b.transforms.scalers);
        assert_eq!(a.transforms.feature_rules, b.transforms.feature_rules);
        assert_eq!(a.transforms.exo_rules, b.transforms.exo_rules);
    }

    #[test]
    fn fit_hybrid_produces_ar3_residual_model() {
        let bars = synth::random_walk_bars(900, 5);
        let mut config = quick_config();
        config.train.epochs = 1;
        let (model, prepared) = fit_hybrid(&bars, &config).unwrap();
        let residual = model.residual_model.as_ref().expect("arima enabled");
        assert_eq!(residual.order, ArimaOrder::new(3, 0, 0).unwrap());
        assert_eq!(model.train_residuals.len(), prepared.train.len());
        assert_eq!(model.weights_sha256.len(), 64);
    }

    #[test]
    fn no_arima_flag_gives_pure_network_model() {
        let bars = synth::random_walk_bars(900, 6);
        let mut config = quick_config();
        config.train.epochs = 1;
        config.arima.enabled = false;
        let (model, prepared) = fit_hybrid(&bars, &config).unwrap();
        assert!(model.residual_model.is_none());
        let report = evaluate(&model, &prepared).unwrap();
        assert!(report.residual_forecasts.iter().all(|v| *v == 0.0));
        // With a zero residual forecast the hybrid equals the network.
        let arnn_pred = network_predictions_price(&model.arnn, &prepared.test, &model.transforms.scalers).unwrap();
        assert_eq!(report.predictions, arnn_pred);
    }

    #[test]
    fn evaluation_is_deterministic_and_self_consistent() {
        let bars = synth::random_walk_bars(900, 7);
        let mut config = quick_config();
        config.train.epochs = 1;
        let (model_a, prep_a) = fit_hybrid(&bars, &config).unwrap();
        let (model_b, prep_b) = fit_hybrid(&bars, &config).unwrap();
        let ra = evaluate(&model_a, &prep_a).unwrap();
        let rb = evaluate(&model_b, &prep_b).unwrap();
        assert_eq!(ra.metrics.rmse, rb.metrics.rmse);
        assert_eq!(ra.predictions, rb.predictions);
        // The stored vectors re-yield the stored metrics.
        let recomputed = ra.recompute_metrics().unwrap();
        assert!((recomputed.rmse - ra.metrics.rmse).abs() < 1e-12);
        assert!((recomputed.mape_percent - ra.metrics.mape_percent).abs() < 1e-12);
        assert!(
            (recomputed.directional_accuracy - ra.metrics.directional_accuracy).abs() < 1e-12
        );
    }

    #[test]
    fn stored_transforms_are_reused_on_new_data() {
        let bars = synth::random_walk_bars(900, 8);
        let mut config = quick_config();
        config.train.epochs = 1;
        let (model, _) = fit_hybrid(&bars, &config).unwrap();
        // Prepare different bars through the stored transforms: scalers must
        // come through unchanged rather than being refitted.
        let other = synth::random_walk_bars(900, 99);
        let prepared = prepare_with(&other, &config, Some(&model.transforms)).unwrap();
        assert_eq!(prepared.transforms.scalers, model.transforms.scalers);
    }
}
