use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;
use serde::{Deserialize, Serialize};

use crate::data::{Matrix, WindowedDataset};
use crate::nn::{AdamState, NodeId, Tape, Tensor};

use super::{ArnnError, ArnnArchitecture, ArnnWeights};

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Keep the weights with the best validation loss instead of the final
    /// ones.
    pub keep_best: bool,
    /// Initial LSTM forget-gate bias.
    pub forget_bias: f64,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            epochs: 100,
            learning_rate: 0.001,
            seed: 42,
            keep_best: true,
            forget_bias: 1.0,
            optimizer: OptimizerKind::Adam,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

/// Loss curves and the selected epoch from one training run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub train_losses: Vec<f64>,
    pub val_losses: Vec<f64>,
    pub best_epoch: Option<usize>,
    pub best_val_loss: Option<f64>,
}

/// A model trainable by minibatch MSE: exposes its parameter tensors in a
/// fixed order and can lay its per-sample prediction onto a tape.
pub trait SequenceRegressor {
    fn tensors(&self) -> Vec<&Tensor>;
    fn tensors_mut(&mut self) -> Vec<&mut Tensor>;
    /// Builds the scalar prediction node for one sample; `params` are leaf
    /// ids aligned with [`SequenceRegressor::tensors`].
    fn build_sample_prediction(
        &self,
        tape: &mut Tape,
        params: &[NodeId],
        x: &Matrix,
        z: &Matrix,
    ) -> NodeId;
    /// Plain (tape-free) prediction for evaluation.
    fn predict_sample(&self, x: &Matrix, z: &Matrix) -> Result<f64, ArnnError>;
}

impl SequenceRegressor for ArnnWeights {
    fn tensors(&self) -> Vec<&Tensor> {
        self.named_tensors().into_iter().map(|(_, t)| t).collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        ArnnWeights::tensors_mut(self)
    }

    fn build_sample_prediction(
        &self,
        tape: &mut Tape,
        params: &[NodeId],
        x: &Matrix,
        z: &Matrix,
    ) -> NodeId {
        let ids = self.node_ids(params);
        self.build_prediction(tape, &ids, x, z)
    }

    fn predict_sample(&self, x: &Matrix, z: &Matrix) -> Result<f64, ArnnError> {
        self.predict(x, z)
    }
}

/// Mean squared error of plain predictions over a dataset.
pub fn dataset_mse<M: SequenceRegressor>(model: &M, ds: &WindowedDataset) -> Result<f64, ArnnError> {
    if ds.is_empty() {
        return Err(ArnnError::EmptyDataset);
    }
    let mut acc = 0.0;
    for i in 0..ds.len() {
        let p = model.predict_sample(&ds.inputs[i], &ds.exogenous[i])?;
        let e = p - ds.targets[i];
        acc += e * e;
    }
    Ok(acc / ds.len() as f64)
}

/// Minibatch-MSE training loop: seeded shuffling, one tape per batch with
/// shared parameter leaves, Adam (or SGD) updates in fixed tensor order,
/// optional keep-best-validation snapshotting.
pub fn train_regressor<M: SequenceRegressor>(
    model: &mut M,
    train: &WindowedDataset,
    val: Option<&WindowedDataset>,
    cfg: &TrainConfig,
) -> Result<TrainLog, ArnnError> {
    if train.is_empty() {
        return Err(ArnnError::EmptyDataset);
    }
    let mut log = TrainLog::default();
    if cfg.epochs == 0 {
        return Ok(log);
    }
    let mut rng = Pcg64Mcg::seed_from_u64(cfg.seed);
    let mut adam = {
        let tensors = model.tensors();
        AdamState::new(&tensors, cfg.learning_rate)
    };
    let mut best: Option<(f64, Vec<Tensor>, usize)> = None;
    let mut indices: Vec<usize> = (0..train.len()).collect();

    for epoch in 1..=cfg.epochs {
        indices.shuffle(&mut rng);
        let mut epoch_sse = 0.0;
        for batch in indices.chunks(cfg.batch_size.max(1)) {
            let mut tape = Tape::new();
            let (flat, shapes): (Vec<NodeId>, Vec<Vec<usize>>) = {
                let tensors = model.tensors();
                let flat: Vec<NodeId> = tensors.iter().map(|t| tape.leaf((*t).clone())).collect();
                let shapes = tensors.iter().map(|t| t.shape().to_vec()).collect();
                (flat, shapes)
            };
            let per_sample: Vec<NodeId> = batch
                .iter()
                .map(|&i| {
                    let p = model.build_sample_prediction(
                        &mut tape,
                        &flat,
                        &train.inputs[i],
                        &train.exogenous[i],
                    );
                    tape.sq_diff(p, train.targets[i])
                })
                .collect();
            let sum = tape.sum_scalars(per_sample);
            let loss_node = tape.scale(sum, 1.0 / batch.len() as f64);
            let loss = tape.scalar_value(loss_node);
            if !loss.is_finite() {
                return Err(ArnnError::NanLoss { epoch });
            }
            epoch_sse += loss * batch.len() as f64;

            let grads = tape.backward(loss_node);
            let grad_tensors: Vec<Tensor> = flat
                .iter()
                .zip(&shapes)
                .map(|(&id, shape)| {
                    Tensor::from_vec(shape, grads.get(id, shape.iter().product()))
                })
                .collect();
            match cfg.optimizer {
                OptimizerKind::Adam => {
                    let mut tensors = model.tensors_mut();
                    adam.update(&mut tensors, &grad_tensors);
                }
                OptimizerKind::Sgd => {
                    for (t, g) in model.tensors_mut().into_iter().zip(&grad_tensors) {
                        for (pv, gv) in t.data_mut().iter_mut().zip(g.data()) {
                            *pv -= cfg.learning_rate * gv;
                        }
                    }
                }
            }
        }
        log.train_losses.push(epoch_sse / train.len() as f64);

        if let Some(val_ds) = val {
            let val_loss = dataset_mse(model, val_ds)?;
            if !val_loss.is_finite() {
                return Err(ArnnError::NanLoss { epoch });
            }
            log.val_losses.push(val_loss);
            let improved = best.as_ref().map_or(true, |(b, _, _)| val_loss < *b);
            if improved {
                let snapshot: Vec<Tensor> = model.tensors().into_iter().cloned().collect();
                best = Some((val_loss, snapshot, epoch));
            }
        }
    }

    if cfg.keep_best {
        if let Some((val_loss, snapshot, epoch)) = best {
            for (slot, t) in model.tensors_mut().into_iter().zip(snapshot) {
                *slot = t;
            }
            log.best_epoch = Some(epoch);
            log.best_val_loss = Some(val_loss);
        }
    } else if let Some((val_loss, _, epoch)) = best {
        log.best_epoch = Some(epoch);
        log.best_val_loss = Some(val_loss);
    }
    Ok(log)
}

/// Trains a freshly initialized network on windowed data; returns weights
/// at the best validation epoch (when a validation set is given and
/// keep-best is on) with the loss curves recorded in the metadata.
pub fn train(
    train_ds: &WindowedDataset,
    val_ds: Option<&WindowedDataset>,
    arch: &ArnnArchitecture,
    cfg: &TrainConfig,
) -> Result<ArnnWeights, ArnnError> {
    let mut weights = ArnnWeights::init(arch, cfg.seed, cfg.forget_bias)?;
    let log = train_regressor(&mut weights, train_ds, val_ds, cfg)?;
    weights.meta = super::TrainMeta {
        seed: cfg.seed,
        epochs_run: cfg.epochs,
        best_val_loss: log.best_val_loss,
        train_loss_curve: log.train_losses,
        val_loss_curve: log.val_losses,
    };
    Ok(weights)
}
