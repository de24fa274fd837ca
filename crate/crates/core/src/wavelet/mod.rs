//! Multilevel discrete wavelet transform, noise estimation, and
//! hard-threshold denoising.
//!
//! The decomposition follows the usual pyramid scheme: at each level the
//! running approximation is filtered by the decomposition pair and
//! downsampled by two, producing one detail band per level plus the final
//! approximation. Denoising estimates the noise level from the finest
//! detail band (MAD / 0.6745), derives the universal threshold
//! `lambda = sigma * sqrt(2 ln n)`, hard-thresholds every detail band, and
//! reconstructs.

mod denoise;
mod filters;
mod transform;

pub use denoise::{denoise, denoise_with_rule, estimate_sigma, hard_threshold, universal_threshold, ThresholdRule};
pub use filters::WaveletFilter;
pub use transform::{dwt_multilevel, idwt_multilevel, BoundaryMode, CoeffPyramid};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WaveletError {
    #[error("unknown wavelet `{0}` (registered: haar, db2, db4, sym8, sym15)")]
    UnknownFilter(String),
    #[error("signal of length {len} is too short for {filter_len}-tap filters at level {level}")]
    SignalTooShort {
        len: usize,
        filter_len: usize,
        level: usize,
    },
    #[error("decomposition level must be >= 1")]
    ZeroLevel,
    #[error("pyramid was built with {expected}-tap filters, got {got}-tap")]
    FilterMismatch { expected: usize, got: usize },
    #[error("pyramid has no detail bands")]
    EmptyPyramid,
    #[error("universal threshold needs n >= 2, got {0}")]
    ThresholdTooFewSamples(usize),
}
