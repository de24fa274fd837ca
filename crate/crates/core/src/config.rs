//! Pipeline configuration: one TOML file covering every knob of the data
//! preparation, denoising, network, training, and residual-model stages.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arnn::{ArnnArchitecture, TrainConfig};
use crate::indicators::IndicatorSpec;
use crate::wavelet::BoundaryMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Complete pipeline configuration. Every section has defaults, so an empty
/// file (or no `--config` at all) runs the reference setup.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub data: DataConfig,
    pub wavelet: WaveletConfig,
    pub indicators: IndicatorConfig,
    pub arnn: ArnnArchitecture,
    pub train: TrainConfig,
    pub arima: ArimaConfig,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: PipelineConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.data.test_fraction > 0.0 && self.data.test_fraction < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "data.test_fraction must be in (0, 1), got {}",
                self.data.test_fraction
            )));
        }
        if !(self.data.val_fraction_of_train > 0.0 && self.data.val_fraction_of_train < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "data.val_fraction_of_train must be in (0, 1), got {}",
                self.data.val_fraction_of_train
            )));
        }
        if self.data.horizon == 0 {
            return Err(ConfigError::Invalid("data.horizon must be >= 1".into()));
        }
        if self.wavelet.level == 0 {
            return Err(ConfigError::Invalid("wavelet.level must be >= 1".into()));
        }
        crate::wavelet::WaveletFilter::by_name(&self.wavelet.name)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.arnn
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.arima.enabled {
            crate::arima::ArimaOrder::new(self.arima.p, self.arima.d, self.arima.q)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialized configuration.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let text = toml::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Split fractions and forecast horizon. The window length lives in
/// `arnn.window`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataConfig {
    pub test_fraction: f64,
    pub val_fraction_of_train: f64,
    /// Steps ahead of the window end that the target sits at.
    pub horizon: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            test_fraction: 0.25,
            val_fraction_of_train: 0.20,
            horizon: 1,
        }
    }
}

/// Which span of data the noise level is estimated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaScope {
    /// Estimate sigma and the threshold on the training segment only, then
    /// apply the same rule to validation and test segments (no lookahead).
    TrainOnly,
    /// Estimate on the whole series before splitting.
    FullSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveletConfig {
    pub name: String,
    pub level: usize,
    /// Threshold rule; only `universal-hard` is implemented.
    pub threshold: ThresholdKind,
    pub boundary: BoundaryMode,
    /// Denoise the decoder's close-price input.
    pub denoise: bool,
    /// Denoise each indicator column fed to the encoder.
    pub denoise_features: bool,
    pub sigma_scope: SigmaScope,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self {
            name: "sym15".into(),
            level: 4,
            threshold: ThresholdKind::UniversalHard,
            boundary: BoundaryMode::Symmetric,
            denoise: true,
            denoise_features: true,
            sigma_scope: SigmaScope::TrainOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdKind {
    UniversalHard,
}

/// Indicator periods (industry-standard defaults).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct IndicatorConfig {
    pub adx: usize,
    pub apo_fast: usize,
    pub apo_slow: usize,
    pub aroon: usize,
    pub cci: usize,
    pub cmo: usize,
    pub ppo_fast: usize,
    pub ppo_slow: usize,
    pub macd_fast: usize,
    pub macd_slow: usize,
    pub willr: usize,
    pub momentum: usize,
    pub rsi: usize,
    pub stochastic: usize,
    pub trix: usize,
    pub atr: usize,
    pub natr: usize,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        Self {
            adx: 14,
            apo_fast: 12,
            apo_slow: 26,
            aroon: 25,
            cci: 20,
            cmo: 14,
            ppo_fast: 12,
            ppo_slow: 26,
            macd_fast: 12,
            macd_slow: 26,
            willr: 14,
            momentum: 10,
            rsi: 14,
            stochastic: 14,
            trix: 15,
            atr: 14,
            natr: 14,
        }
    }
}

impl IndicatorConfig {
    /// The 16-column registry in its documented order with these periods.
    pub fn to_specs(&self) -> Vec<IndicatorSpec> {
        use IndicatorSpec::*;
        vec![
            Adx { period: self.adx },
            Apo {
                fast: self.apo_fast,
                slow: self.apo_slow,
            },
            AroonOsc { period: self.aroon },
            Bop,
            Cci { period: self.cci },
            Cmo { period: self.cmo },
            Ppo {
                fast: self.ppo_fast,
                slow: self.ppo_slow,
            },
            Macd {
                fast: self.macd_fast,
                slow: self.macd_slow,
            },
            WilliamsR { period: self.willr },
            Momentum {
                period: self.momentum,
            },
            Rsi { period: self.rsi },
            StochasticK {
                period: self.stochastic,
            },
            Trix { period: self.trix },
            Atr { period: self.atr },
            Natr { period: self.natr },
            TrueRange,
        ]
    }
}

/// Residual-model settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArimaConfig {
    pub enabled: bool,
    pub p: usize,
    pub d: usize,
    pub q: usize,
    /// Re-estimate the residual model every k test steps; 0 fits once on
    /// the training residuals and only advances the rolling state.
    pub refit_every: usize,
}

impl Default for ArimaConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            p: 3,
            d: 0,
            q: 0,
            refit_every: 0,
        }
    }
}
