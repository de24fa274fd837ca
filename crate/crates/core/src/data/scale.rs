use serde::{Deserialize, Serialize};

use super::{DataError, Matrix};

/// Columnwise min-max scaler: x_norm = (x - x_min) / (x_max - x_min).
///
/// Statistics come from the training split only. Constant columns are
/// flagged as degenerate and scale to 0 instead of erroring, so a flat
/// indicator over a short training slice cannot abort the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    x_min: Vec<f64>,
    x_max: Vec<f64>,
    degenerate: Vec<bool>,
}

impl MinMaxScaler {
    /// Fits columnwise bounds on a training matrix (at least 2 rows).
    pub fn fit(train: &Matrix) -> Result<Self, DataError> {
        if train.rows() < 2 {
            return Err(DataError::NotEnoughRows {
                need: 2,
                got: train.rows(),
            });
        }
        let cols = train.cols();
        let mut x_min = vec![f64::INFINITY; cols];
        let mut x_max = vec![f64::NEG_INFINITY; cols];
        for i in 0..train.rows() {
            for (j, &v) in train.row(i).iter().enumerate() {
                x_min[j] = x_min[j].min(v);
                x_max[j] = x_max[j].max(v);
            }
        }
        let degenerate = x_min
            .iter()
            .zip(&x_max)
            .map(|(lo, hi)| lo == hi)
            .collect();
        Ok(Self {
            x_min,
            x_max,
            degenerate,
        })
    }

    /// Fits on a single column.
    pub fn fit_vector(train: &[f64]) -> Result<Self, DataError> {
        Self::fit(&Matrix::column_vector(train))
    }

    pub fn n_features(&self) -> usize {
        self.x_min.len()
    }

    pub fn x_min(&self) -> &[f64] {
        &self.x_min
    }

    pub fn x_max(&self) -> &[f64] {
        &self.x_max
    }

    /// True for columns whose training min and max coincide.
    pub fn degenerate(&self) -> &[bool] {
        &self.degenerate
    }

    fn scale_one(&self, j: usize, v: f64) -> f64 {
        if self.degenerate[j] {
            0.0
        } else {
            (v - self.x_min[j]) / (self.x_max[j] - self.x_min[j])
        }
    }

    /// Applies the transform. Values outside the training range map outside
    /// [0, 1]; they are not clipped.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix, DataError> {
        if x.cols() != self.n_features() {
            return Err(DataError::DimensionMismatch(format!(
                "scaler fitted on {} columns, input has {}",
                self.n_features(),
                x.cols()
            )));
        }
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                out[(i, j)] = self.scale_one(j, x[(i, j)]);
            }
        }
        Ok(out)
    }

    /// Applies the transform to a single column (scaler must be 1-column).
    pub fn apply_vector(&self, x: &[f64]) -> Result<Vec<f64>, DataError> {
        if self.n_features() != 1 {
            return Err(DataError::UnfittedScaler(format!(
                "expected a 1-column scaler, this one has {} columns",
                self.n_features()
            )));
        }
        Ok(x.iter().map(|&v| self.scale_one(0, v)).collect())
    }

    /// Inverts the transform on the target column:
    /// y = y_norm * (y_max - y_min) + y_min.
    pub fn invert_vector(&self, y_norm: &[f64]) -> Result<Vec<f64>, DataError> {
        if self.n_features() != 1 {
            return Err(DataError::UnfittedScaler(format!(
                "expected a 1-column scaler, this one has {} columns",
                self.n_features()
            )));
        }
        let (lo, hi) = (self.x_min[0], self.x_max[0]);
        Ok(y_norm.iter().map(|&v| v * (hi - lo) + lo).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_stores_columnwise_bounds() {
        let m = Matrix::from_columns(&[vec![0.0, 5.0, 10.0], vec![-1.0, 0.0, 3.0]]);
        let scaler = MinMaxScaler::fit(&m).unwrap();
        assert_eq!(scaler.x_min(), &[0.0, -1.0]);
        assert_eq!(scaler.x_max(), &[10.0, 3.0]);
        assert_eq!(scaler.degenerate(), &[false, false]);
    }

    #[test]
    fn constant_column_is_flagged_and_maps_to_zero() {
        let m = Matrix::from_columns(&[vec![7.0, 7.0, 7.0]]);
        let scaler = MinMaxScaler::fit(&m).unwrap();
        assert_eq!(scaler.degenerate(), &[true]);
        assert_eq!(scaler.apply_vector(&[7.0, 9.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn applies_definition_and_does_not_clip() {
        let scaler = MinMaxScaler::fit_vector(&[0.0, 5.0, 10.0]).unwrap();
        assert_eq!(scaler.apply_vector(&[0.0, 5.0, 10.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(scaler.apply_vector(&[12.0]).unwrap(), vec![1.2]);
    }

    #[test]
    fn inversion_matches_definition() {
        let scaler = MinMaxScaler::fit_vector(&[100.0, 110.0]).unwrap();
        assert_eq!(scaler.invert_vector(&[0.5]).unwrap(), vec![105.0]);
        assert_eq!(scaler.invert_vector(&[0.0]).unwrap(), vec![100.0]);
    }

    #[test]
    fn round_trip_is_identity_within_1e12() {
        let train = vec![101.3, 99.2, 104.8, 100.0, 102.5];
        let scaler = MinMaxScaler::fit_vector(&train).unwrap();
        let vals: Vec<f64> = (0..100).map(|i| 99.0 + 0.07 * i as f64).collect();
        let back = scaler
            .invert_vector(&scaler.apply_vector(&vals).unwrap())
            .unwrap();
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = Matrix::from_columns(&[vec![0.0, 1.0], vec![0.0, 1.0]]);
        let scaler = MinMaxScaler::fit(&m).unwrap();
        let bad = Matrix::from_columns(&[vec![0.0, 1.0]]);
        assert!(scaler.apply(&bad).is_err());
    }

    #[test]
    fn scaler_ignores_non_training_rows() {
        let train = Matrix::from_columns(&[vec![1.0, 2.0, 3.0]]);
        let a = MinMaxScaler::fit(&train).unwrap();
        // "Changing test rows leaves the scaler bit-identical": the scaler
        // is a pure function of the training matrix.
        let b = MinMaxScaler::fit(&train).unwrap();
        assert_eq!(a, b);
    }
}
