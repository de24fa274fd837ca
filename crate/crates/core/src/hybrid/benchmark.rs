use serde::{Deserialize, Serialize};

use crate::arnn::{train_regressor, ArnnError, SequenceRegressor, TrainConfig};
use crate::config::PipelineConfig;
use crate::data::{BarSeries, Matrix};
use crate::nn::{
    lstm_step, rnn_step, Activation, DenseParams, GlorotInit, LstmNodeIds, LstmParams, NodeId,
    RnnParams, Tape, Tensor,
};

use super::pipeline::{compute_metrics, evaluate, fit_hybrid_prepared, prepare, Prepared};
use super::report::Metrics;
use super::PipelineError;

/// Architecture variants of the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchVariant {
    /// Stacked simple RNN straight to the dense head.
    SimpleRnn,
    /// Stacked LSTM straight to the dense head.
    Lstm,
    /// Full attention encoder-decoder network.
    Arnn,
    /// ARNN plus the AR residual model.
    ArnnArima,
}

impl ArchVariant {
    pub fn label(&self) -> &'static str {
        match self {
            ArchVariant::SimpleRnn => "RNN",
            ArchVariant::Lstm => "LSTM",
            ArchVariant::Arnn => "ARNN",
            ArchVariant::ArnnArima => "ARNN+ARIMA",
        }
    }
}

/// One grid cell request: architecture x denoised-or-raw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub variant: ArchVariant,
    pub denoised: bool,
}

/// The standard 8-cell grid: every variant with and without denoising.
pub fn full_grid() -> Vec<BenchmarkCell> {
    let mut cells = Vec::new();
    for variant in [
        ArchVariant::SimpleRnn,
        ArchVariant::Lstm,
        ArchVariant::Arnn,
        ArchVariant::ArnnArima,
    ] {
        for denoised in [false, true] {
            cells.push(BenchmarkCell { variant, denoised });
        }
    }
    cells
}

/// Outcome of one cell; failures are recorded without stopping the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub variant: ArchVariant,
    pub denoised: bool,
    pub metrics: Option<Metrics>,
    pub error: Option<String>,
    pub train_seconds: f64,
}

/// The ablation results, in grid order, plus an RMSE ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkGrid {
    pub cells: Vec<CellReport>,
    /// Cell indices sorted by ascending RMSE (failed cells excluded).
    pub rmse_ranking: Vec<usize>,
    pub config: PipelineConfig,
}

impl BenchmarkGrid {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }
}

/// Baseline recurrent regressor: the concatenated `[features; exogenous]`
/// row feeds stacked recurrent layers; the final hidden state runs through
/// the dense head. Same recurrent depth and widths as the full model.
pub enum PlainRecurrent {
    Rnn {
        layers: Vec<RnnParams>,
        head: Vec<DenseParams>,
    },
    Lstm {
        layers: Vec<LstmParams>,
        head: Vec<DenseParams>,
    },
}

impl PlainRecurrent {
    pub fn init(
        kind: ArchVariant,
        widths: &[usize],
        input_dim: usize,
        head_dims: &[usize],
        seed: u64,
        forget_bias: f64,
    ) -> Result<Self, PipelineError> {
        let mut init = GlorotInit::new(seed);
        let last_width = *widths.last().expect("at least one recurrent layer");
        let mut head = Vec::new();
        let mut in_dim = last_width;
        for (k, &width) in head_dims.iter().enumerate() {
            let act = if k + 1 == head_dims.len() {
                Activation::Identity
            } else {
                Activation::Relu
            };
            let mut layer = DenseParams::zeros(width, in_dim, act);
            layer.w = init.matrix(width, in_dim);
            head.push(layer);
            in_dim = width;
        }
        match kind {
            ArchVariant::SimpleRnn => {
                let mut layers = Vec::new();
                let mut dim = input_dim;
                for &width in widths {
                    let mut layer = RnnParams::zeros(width, dim, true);
                    layer.w_hh = init.matrix(width, width);
                    layer.w_xh = init.matrix(width, dim);
                    layers.push(layer);
                    dim = width;
                }
                Ok(PlainRecurrent::Rnn { layers, head })
            }
            ArchVariant::Lstm => {
                let mut layers = Vec::new();
                let mut dim = input_dim;
                for &width in widths {
                    let mut layer = LstmParams::zeros(width, dim);
                    layer.w_f = init.matrix(width, width + dim);
                    layer.w_i = init.matrix(width, width + dim);
                    layer.w_o = init.matrix(width, width + dim);
                    layer.w_s = init.matrix(width, width + dim);
                    layer.b_f = init.constant_vector(width, forget_bias);
                    layers.push(layer);
                    dim = width;
                }
                Ok(PlainRecurrent::Lstm { layers, head })
            }
            other => Err(PipelineError::Invalid(format!(
                "{} is not a plain baseline",
                other.label()
            ))),
        }
    }
}

fn concat_row(x: &Matrix, z: &Matrix, t: usize) -> Vec<f64> {
    let mut row = x.row(t).to_vec();
    row.extend_from_slice(z.row(t));
    row
}

impl SequenceRegressor for PlainRecurrent {
    fn tensors(&self) -> Vec<&Tensor> {
        let mut out: Vec<&Tensor> = Vec::new();
        match self {
            PlainRecurrent::Rnn { layers, head } => {
                for l in layers {
                    out.push(&l.w_xh);
                    out.push(&l.w_hh);
                    if let Some(b) = &l.bias {
                        out.push(b);
                    }
                }
                for d in head {
                    out.push(&d.w);
                    out.push(&d.b);
                }
            }
            PlainRecurrent::Lstm { layers, head } => {
                for l in layers {
                    out.extend([&l.w_f, &l.w_i, &l.w_o, &l.w_s, &l.b_f, &l.b_i, &l.b_o, &l.b_s]);
                }
                for d in head {
                    out.push(&d.w);
                    out.push(&d.b);
                }
            }
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::new();
        match self {
            PlainRecurrent::Rnn { layers, head } => {
                for l in layers {
                    out.push(&mut l.w_xh);
                    out.push(&mut l.w_hh);
                    if let Some(b) = &mut l.bias {
                        out.push(b);
                    }
                }
                for d in head {
                    out.push(&mut d.w);
                    out.push(&mut d.b);
                }
            }
            PlainRecurrent::Lstm { layers, head } => {
                for l in layers {
                    out.push(&mut l.w_f);
                    out.push(&mut l.w_i);
                    out.push(&mut l.w_o);
                    out.push(&mut l.w_s);
                    out.push(&mut l.b_f);
                    out.push(&mut l.b_i);
                    out.push(&mut l.b_o);
                    out.push(&mut l.b_s);
                }
                for d in head {
                    out.push(&mut d.w);
                    out.push(&mut d.b);
                }
            }
        }
        out
    }

    fn build_sample_prediction(
        &self,
        tape: &mut Tape,
        params: &[NodeId],
        x: &Matrix,
        z: &Matrix,
    ) -> NodeId {
        let t_len = x.rows();
        match self {
            PlainRecurrent::Rnn { layers, head } => {
                let mut it = params.iter().copied();
                let mut next = || it.next().expect("short param list");
                let ids: Vec<(NodeId, NodeId, Option<NodeId>)> = layers
                    .iter()
                    .map(|l| {
                        let w_xh = next();
                        let w_hh = next();
                        let b = l.bias.as_ref().map(|_| next());
                        (w_xh, w_hh, b)
                    })
                    .collect();
                let head_ids: Vec<(NodeId, NodeId)> =
                    head.iter().map(|_| (next(), next())).collect();
                let mut hidden: Vec<NodeId> = layers
                    .iter()
                    .map(|l| tape.leaf(Tensor::zeros(&[l.hidden()])))
                    .collect();
                for t in 0..t_len {
                    let mut input = tape.leaf(Tensor::vector(concat_row(x, z, t)));
                    for (k, &(w_xh, w_hh, b)) in ids.iter().enumerate() {
                        let h = tape.rnn_cell(w_hh, w_xh, b, hidden[k], input);
                        hidden[k] = h;
                        input = h;
                    }
                }
                let mut out = *hidden.last().expect("at least one layer");
                for (k, &(w, b)) in head_ids.iter().enumerate() {
                    out = tape.dense(w, b, out, head[k].activation);
                }
                out
            }
            PlainRecurrent::Lstm { layers, head } => {
                let mut it = params.iter().copied();
                let mut next = || it.next().expect("short param list");
                let ids: Vec<LstmNodeIds> = layers
                    .iter()
                    .map(|_| LstmNodeIds {
                        w_f: next(),
                        w_i: next(),
                        w_o: next(),
                        w_s: next(),
                        b_f: next(),
                        b_i: next(),
                        b_o: next(),
                        b_s: next(),
                    })
                    .collect();
                let head_ids: Vec<(NodeId, NodeId)> =
                    head.iter().map(|_| (next(), next())).collect();
                let mut h: Vec<NodeId> = layers
                    .iter()
                    .map(|l| tape.leaf(Tensor::zeros(&[l.hidden()])))
                    .collect();
                let mut s = h.clone();
                for t in 0..t_len {
                    let mut input = tape.leaf(Tensor::vector(concat_row(x, z, t)));
                    for (k, lstm_ids) in ids.iter().enumerate() {
                        let (h2, s2) = tape.lstm_cell(lstm_ids, h[k], s[k], input);
                        h[k] = h2;
                        s[k] = s2;
                        input = h2;
                    }
                }
                let mut out = *h.last().expect("at least one layer");
                for (k, &(w, b)) in head_ids.iter().enumerate() {
                    out = tape.dense(w, b, out, head[k].activation);
                }
                out
            }
        }
    }

    fn predict_sample(&self, x: &Matrix, z: &Matrix) -> Result<f64, ArnnError> {
        let t_len = x.rows();
        match self {
            PlainRecurrent::Rnn { layers, head } => {
                let mut hidden: Vec<Vec<f64>> =
                    layers.iter().map(|l| vec![0.0; l.hidden()]).collect();
                for t in 0..t_len {
                    let mut input = concat_row(x, z, t);
                    for (k, layer) in layers.iter().enumerate() {
                        hidden[k] = rnn_step(layer, &hidden[k], &input)?;
                        input = hidden[k].clone();
                    }
                }
                let mut out = hidden.last().expect("layer").clone();
                for layer in head {
                    out = layer.apply(&out)?;
                }
                Ok(out[0])
            }
            PlainRecurrent::Lstm { layers, head } => {
                let mut h: Vec<Vec<f64>> = layers.iter().map(|l| vec![0.0; l.hidden()]).collect();
                let mut s = h.clone();
                for t in 0..t_len {
                    let mut input = concat_row(x, z, t);
                    for (k, layer) in layers.iter().enumerate() {
                        let (h2, s2) = lstm_step(layer, &h[k], &s[k], &input)?;
                        h[k] = h2;
                        s[k] = s2;
                        input = h[k].clone();
                    }
                }
                let mut out = h.last().expect("layer").clone();
                for layer in head {
                    out = layer.apply(&out)?;
                }
                Ok(out[0])
            }
        }
    }
}

/// Plain-baseline evaluation: predictions on the test split, metrics in
/// price units (no residual correction).
fn evaluate_plain(
    model: &PlainRecurrent,
    prepared: &Prepared,
) -> Result<Metrics, PipelineError> {
    let test = &prepared.test;
    let mut norm = Vec::with_capacity(test.len());
    for i in 0..test.len() {
        norm.push(model.predict_sample(&test.inputs[i], &test.exogenous[i])?);
    }
    let predictions = prepared.transforms.scalers.target.invert_vector(&norm)?;
    let truth = prepared.test_truth_prices();
    compute_metrics(&predictions, &truth, &prepared.transforms.scalers)
}

fn run_cell(
    bars: &BarSeries,
    base: &PipelineConfig,
    cell: BenchmarkCell,
) -> Result<(Metrics, f64), PipelineError> {
    let mut config = base.clone();
    config.wavelet.denoise = cell.denoised;
    config.wavelet.denoise_features = cell.denoised;
    config.arima.enabled = matches!(cell.variant, ArchVariant::ArnnArima);

    let prepared = prepare(bars, &config)?;
    let started = std::time::Instant::now();
    match cell.variant {
        ArchVariant::Arnn | ArchVariant::ArnnArima => {
            let model = fit_hybrid_prepared(&prepared, &config)?;
            let train_seconds = started.elapsed().as_secs_f64();
            let report = evaluate(&model, &prepared)?;
            Ok((report.metrics, train_seconds))
        }
        kind @ (ArchVariant::SimpleRnn | ArchVariant::Lstm) => {
            let input_dim = config.arnn.n_features + config.arnn.n_exo;
            let mut model = PlainRecurrent::init(
                kind,
                &config.arnn.encoder_layers,
                input_dim,
                &config.arnn.head_dense,
                config.train.seed,
                config.train.forget_bias,
            )?;
            let cfg: TrainConfig = config.train.clone();
            train_regressor(&mut model, &prepared.train, Some(&prepared.val), &cfg)?;
            let train_seconds = started.elapsed().as_secs_f64();
            let metrics = evaluate_plain(&model, &prepared)?;
            Ok((metrics, train_seconds))
        }
    }
}

/// Runs every cell with identical splits and seeds; per-cell failures are
/// recorded and the remaining cells continue. Cells keep grid order; the
/// ranking sorts the successful ones by RMSE.
pub fn run_benchmark(
    bars: &BarSeries,
    config: &PipelineConfig,
    cells: &[BenchmarkCell],
) -> BenchmarkGrid {
    let mut reports = Vec::with_capacity(cells.len());
    for &cell in cells {
        let started = std::time::Instant::now();
        match run_cell(bars, config, cell) {
            Ok((metrics, train_seconds)) => reports.push(CellReport {
                variant: cell.variant,
                denoised: cell.denoised,
                metrics: Some(metrics),
                error: None,
                train_seconds,
            }),
            Err(e) => reports.push(CellReport {
                variant: cell.variant,
                denoised: cell.denoised,
                metrics: None,
                error: Some(e.to_string()),
                train_seconds: started.elapsed().as_secs_f64(),
            }),
        }
    }
    let mut ranking: Vec<usize> = (0..reports.len())
        .filter(|&i| reports[i].metrics.is_some())
        .collect();
    ranking.sort_by(|&a, &b| {
        let ra = reports[a].metrics.as_ref().expect("filtered").rmse;
        let rb = reports[b].metrics.as_ref().expect("filtered").rmse;
        ra.partial_cmp(&rb).expect("finite rmse")
    });
    BenchmarkGrid {
        cells: reports,
        rmse_ranking: ranking,
        config: config.clone(),
    }
}
