//! Minimal deterministic neural-network substrate: dense / simple-RNN /
//! LSTM cells in float64, a tensor-valued reverse-mode tape, Adam, and
//! finite-difference gradient checking.
//!
//! Everything is single-threaded and seeded; identical seeds and inputs
//! give bit-identical parameters after any number of training steps.

mod adam;
mod gradcheck;
mod init;
mod layers;
mod tape;
mod tensor;

pub use adam::{adam_update, AdamState};
pub use gradcheck::{gradient_check, GradCheckReport};
pub use init::GlorotInit;
pub use layers::{
    lstm_step, relu, rnn_step, sigmoid, softmax, Activation, DenseParams, LstmParams, RnnParams,
};
pub use tape::{Gradients, LstmNodeIds, NodeId, Tape};
pub use tensor::Tensor;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite loss encountered{0}")]
    NonFiniteLoss(String),
}
