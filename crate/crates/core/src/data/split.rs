use serde::{Deserialize, Serialize};

use super::{BarSeries, DataError};

/// Chronological split fractions: the test block is the series suffix, the
/// validation block is the suffix of what remains.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub val_fraction_of_train: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.25,
            val_fraction_of_train: 0.20,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), DataError> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(DataError::BadFraction {
                name: "test_fraction",
                value: self.test_fraction,
            });
        }
        if !(self.val_fraction_of_train > 0.0 && self.val_fraction_of_train < 1.0) {
            return Err(DataError::BadFraction {
                name: "val_fraction_of_train",
                value: self.val_fraction_of_train,
            });
        }
        Ok(())
    }

    /// Split lengths (train, val, test) for a series of length `n`:
    /// |test| = round(test_fraction * n), |val| = round(val_fraction * rest).
    pub fn lengths(&self, n: usize) -> (usize, usize, usize) {
        let test = (self.test_fraction * n as f64).round() as usize;
        let rest = n - test;
        let val = (self.val_fraction_of_train * rest as f64).round() as usize;
        (rest - val, val, test)
    }
}

/// Splits a series into chronological (train, val, test) blocks whose
/// concatenation reproduces the input.
pub fn chronological_split(
    series: &BarSeries,
    spec: SplitSpec,
) -> Result<(BarSeries, BarSeries, BarSeries), DataError> {
    spec.validate()?;
    let n = series.len();
    if n < 10 {
        return Err(DataError::SeriesTooShort {
            len: n,
            reason: "need at least 10 bars to split".into(),
        });
    }
    let (train, val, test) = spec.lengths(n);
    if train == 0 || val == 0 || test == 0 {
        return Err(DataError::SeriesTooShort {
            len: n,
            reason: format!("split ({train}, {val}, {test}) leaves an empty block"),
        });
    }
    Ok((
        series.slice(0..train),
        series.slice(train..train + val),
        series.slice(train + val..n),
    ))
}
