use serde::{Deserialize, Serialize};

use crate::arima::{ArimaModel, ArimaOrder};
use crate::config::PipelineConfig;

use super::metrics::{directional_accuracy, mape, rmse};
use super::PipelineError;

/// Evaluation metrics in price units plus normalized-unit variants (the
/// same affine rescaling the network trained in), so both unit readings of
/// reported results are covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mape_percent: f64,
    pub directional_accuracy: f64,
    pub rmse_normalized: f64,
    /// None when a normalized truth value is exactly zero.
    pub mape_normalized_percent: Option<f64>,
}

/// Compact audit record of the fitted residual model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaSummary {
    pub order: ArimaOrder,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub c: f64,
    pub sigma2: f64,
    pub stationary: bool,
}

impl From<&ArimaModel> for ArimaSummary {
    fn from(model: &ArimaModel) -> Self {
        Self {
            order: model.order,
            phi: model.phi.clone(),
            theta: model.theta.clone(),
            c: model.c,
            sigma2: model.sigma2,
            stationary: model.stationary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub weights_sha256: String,
    pub config_sha256: String,
    pub residual_model: Option<ArimaSummary>,
    pub warnings: Vec<String>,
}

/// Full evaluation output: stored vectors, metrics recomputable from them,
/// the configuration echo, and provenance hashes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub schema_version: u32,
    pub config: PipelineConfig,
    pub metrics: Metrics,
    /// Hybrid predictions, price units.
    pub predictions: Vec<f64>,
    /// Ground truth, price units.
    pub ground_truth: Vec<f64>,
    /// Residual-model forecasts, price units; prediction minus this is the
    /// pure network output.
    pub residual_forecasts: Vec<f64>,
    /// Training-split target min/max backing the normalized metrics.
    pub target_bounds: [f64; 2],
    pub provenance: Provenance,
    pub runtime_seconds: f64,
}

impl ForecastReport {
    /// Recomputes every metric from the stored vectors (self-consistency
    /// check; the report carries everything needed).
    pub fn recompute_metrics(&self) -> Result<Metrics, PipelineError> {
        let [lo, hi] = self.target_bounds;
        let norm = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .map(|x| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 })
                .collect()
        };
        let pred_norm = norm(&self.predictions);
        let truth_norm = norm(&self.ground_truth);
        Ok(Metrics {
            rmse: rmse(&self.predictions, &self.ground_truth)?,
            mape_percent: mape(&self.predictions, &self.ground_truth)?,
            directional_accuracy: directional_accuracy(&self.predictions, &self.ground_truth)?,
            rmse_normalized: rmse(&pred_norm, &truth_norm)?,
            mape_normalized_percent: mape(&pred_norm, &truth_norm).ok(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips_through_json() {
        let report = ForecastReport {
            schema_version: 1,
            config: PipelineConfig::default(),
            metrics: Metrics {
                rmse: 0.5,
                mape_percent: 1.0,
                directional_accuracy: 0.75,
                rmse_normalized: 0.05,
                mape_normalized_percent: None,
            },
            predictions: vec![1.0, 2.0],
            ground_truth: vec![1.5, 2.5],
            residual_forecasts: vec![0.0, 0.0],
            target_bounds: [1.0, 3.0],
            provenance: Provenance {
                weights_sha256: "ab".into(),
                config_sha256: "cd".into(),
                residual_model: None,
                warnings: vec![],
            },
            runtime_seconds: 0.1,
        };
        let json = report.to_json();
        let back = ForecastReport::from_json(&json).unwrap();
        assert_eq!(back, report);
    }
}
