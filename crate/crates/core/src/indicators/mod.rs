//! The 16 technical-indicator series fed to the encoder: 13 momentum
//! (ADX, APO, Aroon oscillator, BOP, CCI, CMO, PPO, MACD line, Williams %R,
//! Momentum, RSI, Stochastic %K, TRIX) and 3 volatility (ATR, NATR, TR).
//!
//! Formulas follow the industry-standard definitions (Wilder smoothing for
//! RSI/ATR/ADX, SMA-seeded EMAs). Leading rows where any indicator's
//! lookback window is unfilled are dropped from the feature matrix and
//! reported as warm-up.

mod calc;

pub use calc::*;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{BarSeries, Matrix};

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("unknown indicator `{0}`")]
    UnknownIndicator(String),
    #[error("{indicator}: need more than {need} bars, got {got}")]
    InsufficientHistory {
        indicator: &'static str,
        need: usize,
        got: usize,
    },
    #[error("{indicator}: period must be >= 1")]
    BadPeriod { indicator: &'static str },
}

/// One registered indicator with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum IndicatorSpec {
    Adx { period: usize },
    Apo { fast: usize, slow: usize },
    AroonOsc { period: usize },
    Bop,
    Cci { period: usize },
    Cmo { period: usize },
    Ppo { fast: usize, slow: usize },
    Macd { fast: usize, slow: usize },
    WilliamsR { period: usize },
    Momentum { period: usize },
    Rsi { period: usize },
    StochasticK { period: usize },
    Trix { period: usize },
    Atr { period: usize },
    Natr { period: usize },
    TrueRange,
}

impl IndicatorSpec {
    /// The default 16-column registry in its documented order.
    pub fn default_registry() -> Vec<IndicatorSpec> {
        use IndicatorSpec::*;
        vec![
            Adx { period: 14 },
            Apo { fast: 12, slow: 26 },
            AroonOsc { period: 25 },
            Bop,
            Cci { period: 20 },
            Cmo { period: 14 },
            Ppo { fast: 12, slow: 26 },
            Macd { fast: 12, slow: 26 },
            WilliamsR { period: 14 },
            Momentum { period: 10 },
            Rsi { period: 14 },
            StochasticK { period: 14 },
            Trix { period: 15 },
            Atr { period: 14 },
            Natr { period: 14 },
            TrueRange,
        ]
    }

    /// Column name including parameters, e.g. `rsi_14`.
    pub fn column_name(&self) -> String {
        use IndicatorSpec::*;
        match self {
            Adx { period } => format!("adx_{period}"),
            Apo { fast, slow } => format!("apo_{fast}_{slow}"),
            AroonOsc { period } => format!("aroonosc_{period}"),
            Bop => "bop".to_string(),
            Cci { period } => format!("cci_{period}"),
            Cmo { period } => format!("cmo_{period}"),
            Ppo { fast, slow } => format!("ppo_{fast}_{slow}"),
            Macd { fast, slow } => format!("macd_{fast}_{slow}"),
            WilliamsR { period } => format!("willr_{period}"),
            Momentum { period } => format!("mom_{period}"),
            Rsi { period } => format!("rsi_{period}"),
            StochasticK { period } => format!("stochk_{period}"),
            Trix { period } => format!("trix_{period}"),
            Atr { period } => format!("atr_{period}"),
            Natr { period } => format!("natr_{period}"),
            TrueRange => "tr".to_string(),
        }
    }

    fn validate(&self) -> Result<(), IndicatorError> {
        use IndicatorSpec::*;
        let ok = match self {
            Adx { period } | AroonOsc { period } | Cci { period } | Cmo { period }
            | WilliamsR { period } | Momentum { period } | Rsi { period }
            | StochasticK { period } | Trix { period } | Atr { period } | Natr { period } => {
                *period >= 1
            }
            Apo { fast, slow } | Ppo { fast, slow } | Macd { fast, slow } => {
                *fast >= 1 && *slow >= 1
            }
            Bop | TrueRange => true,
        };
        if ok {
            Ok(())
        } else {
            Err(IndicatorError::BadPeriod { indicator: "period" })
        }
    }

    /// Evaluates the indicator over the bars, aligned to the input; `None`
    /// marks warm-up steps.
    pub fn evaluate(&self, bars: &BarSeries) -> Result<Vec<Option<f64>>, IndicatorError> {
        use IndicatorSpec::*;
        self.validate()?;
        let b = bars.bars();
        let closes = bars.closes();
        match *self {
            Adx { period } => adx(b, period),
            Apo { fast, slow } => apo(&closes, fast, slow),
            AroonOsc { period } => aroon_oscillator(b, period),
            Bop => Ok(balance_of_power(b)),
            Cci { period } => cci(b, period),
            Cmo { period } => cmo(&closes, period),
            Ppo { fast, slow } => ppo(&closes, fast, slow),
            Macd { fast, slow } => macd_line(&closes, fast, slow),
            WilliamsR { period } => williams_r(b, period),
            Momentum { period } => momentum(&closes, period),
            Rsi { period } => rsi(&closes, period),
            StochasticK { period } => stochastic_k(b, period),
            Trix { period } => trix(&closes, period),
            Atr { period } => atr(b, period),
            Natr { period } => natr(b, period),
            TrueRange => Ok(true_range_series(b)),
        }
    }
}

/// Per-timestep indicator matrix with warm-up rows removed.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub values: Matrix,
    pub column_names: Vec<String>,
    /// Number of leading bar rows dropped (longest indicator lookback).
    pub warmup: usize,
    /// Timestamps of the retained rows.
    pub timestamps: Vec<i64>,
}

/// Evaluates all requested indicators in order and drops the common warm-up
/// prefix, so every retained row is fully defined.
pub fn compute_feature_matrix(
    bars: &BarSeries,
    specs: &[IndicatorSpec],
) -> Result<FeatureMatrix, IndicatorError> {
    let mut columns = Vec::with_capacity(specs.len());
    let mut names = Vec::with_capacity(specs.len());
    for spec in specs {
        columns.push(spec.evaluate(bars)?);
        names.push(spec.column_name());
    }
    let n = bars.len();
    let mut warmup = 0usize;
    for col in &columns {
        let first = col.iter().position(|v| v.is_some()).unwrap_or(n);
        warmup = warmup.max(first);
    }
    if warmup >= n {
        return Err(IndicatorError::InsufficientHistory {
            indicator: "feature matrix",
            need: warmup,
            got: n,
        });
    }
    let rows = n - warmup;
    let mut values = Matrix::zeros(rows, specs.len());
    for (j, col) in columns.iter().enumerate() {
        for i in 0..rows {
            values[(i, j)] = col[warmup + i].expect("fully defined after warmup");
        }
    }
    let timestamps = bars.bars()[warmup..].iter().map(|b| b.timestamp).collect();
    Ok(FeatureMatrix {
        values,
        column_names: names,
        warmup,
        timestamps,
    })
}
