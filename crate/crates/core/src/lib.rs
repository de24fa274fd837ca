//! Hybrid forex price forecasting toolkit.
//!
//! The pipeline combines three stages:
//!
//! 1. **Wavelet denoising** ([`wavelet`]) — multilevel DWT with symlet
//!    filters and universal hard thresholding removes high-frequency noise
//!    from price and indicator series.
//! 2. **Attention encoder-decoder network** ([`arnn`]) — a stacked
//!    simple-RNN encoder over technical indicators, a stacked LSTM decoder
//!    over the close price, dot-product attention fusing the two, and an
//!    LSTM + dense head producing the one-step forecast.
//! 3. **ARIMA residual correction** ([`arima`]) — an AR model fitted on the
//!    network's training residuals forecasts the linear structure the
//!    network leaves behind; the final prediction is the sum of both.
//!
//! [`hybrid`] orchestrates the full pipeline and the evaluation harness
//! (RMSE / MAPE / directional accuracy plus the ablation benchmark), and
//! the `fxcast` binary exposes everything as CLI subcommands.

pub mod arima;
pub mod arnn;
pub mod config;
pub mod data;
pub mod hybrid;
pub mod indicators;
pub mod nn;
pub mod synth;
pub mod wavelet;
