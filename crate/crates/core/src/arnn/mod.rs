//! The attention encoder-decoder network: a stacked simple-RNN encoder
//! over indicator windows, a stacked LSTM decoder over the close-price
//! window, dot-product attention fusing the two streams, and an LSTM +
//! dense head emitting the one-step forecast.
//!
//! Layout per step (defaults in parentheses):
//!
//! ```text
//! encoder: T x n_features (10 x 16) -> RNN(64) -> RNN(32) -> ReLU proj -> T x 10
//! decoder: T x n_exo      (10 x 1)  -> LSTM(64) -> LSTM(32) -> ReLU proj -> T x 10
//! attention: scores e_ij = <dec_i, enc_j>, alpha_i = softmax(e_i.),
//!            context c_i = sum_j alpha_ij enc_j, fused s_i = dec_i * c_i
//! head: fused T x 10 -> LSTM(32), final state -> Dense(16, ReLU) -> Dense(1)
//! ```

mod model;
mod train;
mod weights;

pub use model::attend;
pub use train::{
    dataset_mse, train, train_regressor, OptimizerKind, SequenceRegressor, TrainConfig, TrainLog,
};
pub use weights::{load_weights, save_weights, ArnnWeights, TrainMeta, FORMAT_VERSION};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArnnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("training diverged: loss became non-finite at epoch {epoch} (try a lower learning rate, and check that inputs and targets are min-max scaled)")]
    NanLoss { epoch: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("weight file i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad weight file: {0}")]
    BadWeightFile(String),
    #[error("weight file format version {got}, this build reads {expected}")]
    VersionMismatch { expected: u16, got: u16 },
    #[error("weight file checksum mismatch (file truncated or corrupted)")]
    ChecksumMismatch,
    #[error("architecture mismatch: {0}")]
    ArchitectureMismatch(String),
    #[error(transparent)]
    Nn(#[from] crate::nn::NnError),
}

/// Network dimensions. `step_feature_dim` is shared by the encoder and
/// decoder projections because dot-product attention needs equal widths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArnnArchitecture {
    /// Window length T.
    pub window: usize,
    /// Simple-RNN encoder layer widths.
    pub encoder_layers: Vec<usize>,
    /// LSTM decoder layer widths.
    pub decoder_layers: Vec<usize>,
    /// Per-step projected representation width for both streams.
    pub step_feature_dim: usize,
    /// Head LSTM width.
    pub head_rnn_width: usize,
    /// Dense head widths; the last must be 1.
    pub head_dense: Vec<usize>,
    /// Encoder input width (indicator count).
    pub n_features: usize,
    /// Decoder exogenous input width.
    pub n_exo: usize,
    /// Include a bias term in the simple-RNN cells.
    pub rnn_bias: bool,
}

impl Default for ArnnArchitecture {
    fn default() -> Self {
        Self {
            window: 10,
            encoder_layers: vec![64, 32],
            decoder_layers: vec![64, 32],
            step_feature_dim: 10,
            head_rnn_width: 32,
            head_dense: vec![16, 1],
            n_features: 16,
            n_exo: 1,
            rnn_bias: true,
        }
    }
}

impl ArnnArchitecture {
    pub fn validate(&self) -> Result<(), ArnnError> {
        if self.window == 0
            || self.encoder_layers.is_empty()
            || self.decoder_layers.is_empty()
            || self.step_feature_dim == 0
            || self.head_rnn_width == 0
            || self.n_features == 0
            || self.n_exo == 0
        {
            return Err(ArnnError::ShapeMismatch(
                "all architecture dimensions must be positive".into(),
            ));
        }
        if self.head_dense.last() != Some(&1) {
            return Err(ArnnError::ShapeMismatch(
                "the dense head must end in a single output".into(),
            ));
        }
        Ok(())
    }

    /// Canonical single-line descriptor embedded in weight files.
    pub fn descriptor(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "window={};encoder={};decoder={};step_dim={};head_rnn={};head_dense={};n_features={};n_exo={};rnn_bias={}",
            self.window,
            join(&self.encoder_layers),
            join(&self.decoder_layers),
            self.step_feature_dim,
            self.head_rnn_width,
            join(&self.head_dense),
            self.n_features,
            self.n_exo,
            self.rnn_bias
        )
    }

    /// Parses [`ArnnArchitecture::descriptor`] output.
    pub fn from_descriptor(text: &str) -> Result<Self, ArnnError> {
        let mut arch = ArnnArchitecture::default();
        for part in text.split(';') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| ArnnError::BadWeightFile(format!("bad descriptor field `{part}`")))?;
            let parse_usize = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| ArnnError::BadWeightFile(format!("bad number `{v}` in descriptor")))
            };
            let parse_list = |v: &str| -> Result<Vec<usize>, ArnnError> {
                v.split(',').map(parse_usize).collect()
            };
            match key {
                "window" => arch.window = parse_usize(value)?,
                "encoder" => arch.encoder_layers = parse_list(value)?,
                "decoder" => arch.decoder_layers = parse_list(value)?,
                "step_dim" => arch.step_feature_dim = parse_usize(value)?,
                "head_rnn" => arch.head_rnn_width = parse_usize(value)?,
                "head_dense" => arch.head_dense = parse_list(value)?,
                "n_features" => arch.n_features = parse_usize(value)?,
                "n_exo" => arch.n_exo = parse_usize(value)?,
                "rnn_bias" => {
                    arch.rnn_bias = value
                        .parse::<bool>()
                        .map_err(|_| ArnnError::BadWeightFile(format!("bad bool `{value}`")))?
                }
                other => {
                    return Err(ArnnError::BadWeightFile(format!(
                        "unknown descriptor key `{other}`"
                    )))
                }
            }
        }
        arch.validate()?;
        Ok(arch)
    }
}
