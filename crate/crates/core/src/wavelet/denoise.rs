use serde::{Deserialize, Serialize};

use super::{dwt_multilevel, idwt_multilevel, BoundaryMode, CoeffPyramid, WaveletError, WaveletFilter};

/// Hard-threshold rule: coefficients with `|c| <= lambda` are zeroed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub lambda: f64,
    pub sigma_estimate: f64,
}

impl ThresholdRule {
    /// Estimates the rule from a reference signal: MAD noise level on the
    /// finest detail band, then the universal threshold for `n` samples.
    /// Using the training segment as the reference keeps later applications
    /// of the same rule leakage-free.
    pub fn estimate(
        reference: &[f64],
        filter: &WaveletFilter,
        level: usize,
        mode: BoundaryMode,
    ) -> Result<Self, WaveletError> {
        let pyramid = dwt_multilevel(reference, filter, level, mode)?;
        let sigma = estimate_sigma(&pyramid)?;
        let lambda = universal_threshold(sigma, reference.len())?;
        Ok(Self {
            lambda,
            sigma_estimate: sigma,
        })
    }
}

/// MAD noise estimate from the finest detail band:
/// `sigma = median(|d|) / 0.6745`.
pub fn estimate_sigma(pyramid: &CoeffPyramid) -> Result<f64, WaveletError> {
    let finest = pyramid
        .details
        .last()
        .ok_or(WaveletError::EmptyPyramid)?;
    if finest.is_empty() {
        return Err(WaveletError::EmptyPyramid);
    }
    let mut abs: Vec<f64> = finest.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).expect("finite coefficients"));
    let mid = abs.len() / 2;
    let median = if abs.len() % 2 == 1 {
        abs[mid]
    } else {
        0.5 * (abs[mid - 1] + abs[mid])
    };
    Ok(median / 0.6745)
}

/// Universal (VisuShrink) threshold `lambda = sigma * sqrt(2 ln n)`.
pub fn universal_threshold(sigma: f64, n: usize) -> Result<f64, WaveletError> {
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if n < 2 {
        return Err(WaveletError::ThresholdTooFewSamples(n));
    }
    Ok(sigma * (2.0 * (n as f64).ln()).sqrt())
}

/// Keeps coefficients strictly above `lambda` in magnitude, zeroes the rest.
pub fn hard_threshold(coeffs: &[f64], lambda: f64) -> Vec<f64> {
    assert!(lambda >= 0.0, "lambda must be non-negative");
    coeffs
        .iter()
        .map(|&c| if c.abs() > lambda { c } else { 0.0 })
        .collect()
}

/// Denoises with a pre-estimated rule: decompose, hard-threshold every
/// detail band, reconstruct.
pub fn denoise_with_rule(
    signal: &[f64],
    filter: &WaveletFilter,
    level: usize,
    mode: BoundaryMode,
    rule: &ThresholdRule,
) -> Result<Vec<f64>, WaveletError> {
    let mut pyramid = dwt_multilevel(signal, filter, level, mode)?;
    for band in &mut pyramid.details {
        *band = hard_threshold(band, rule.lambda);
    }
    idwt_multilevel(&pyramid, filter)
}

/// Self-contained denoising: the threshold is estimated from the signal
/// itself (decompose, MAD sigma on the finest band, universal threshold on
/// all detail bands, reconstruct).
pub fn denoise(
    signal: &[f64],
    filter: &WaveletFilter,
    level: usize,
    mode: BoundaryMode,
) -> Result<Vec<f64>, WaveletError> {
    let rule = ThresholdRule::estimate(signal, filter, level, mode)?;
    denoise_with_rule(signal, filter, level, mode, &rule)
}
