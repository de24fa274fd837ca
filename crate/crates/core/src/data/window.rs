use super::{DataError, Matrix};

/// Sliding windows over aligned feature/exogenous/target rows.
///
/// Sample `i` packs feature rows `[i, i+T)` as encoder input, the same rows
/// of the exogenous matrix as decoder input, and row `i + T + horizon - 1`'s
/// target value. Windows are built per split, so no sample straddles a
/// split boundary.
#[derive(Debug, Clone)]
pub struct WindowedDataset {
    /// Encoder inputs, one `(T, n_features)` matrix per sample.
    pub inputs: Vec<Matrix>,
    /// Decoder exogenous inputs, one `(T, n_exo)` matrix per sample.
    pub exogenous: Vec<Matrix>,
    /// Target value per sample.
    pub targets: Vec<f64>,
    pub window: usize,
    pub horizon: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Slices aligned rows into windowed samples: sample count is
/// `N - T - horizon + 1`.
pub fn make_windows(
    features: &Matrix,
    exogenous: &Matrix,
    target: &[f64],
    window: usize,
    horizon: usize,
) -> Result<WindowedDataset, DataError> {
    assert!(window >= 1, "window must be >= 1");
    assert!(horizon >= 1, "horizon must be >= 1");
    let n = features.rows();
    if exogenous.rows() != n || target.len() != n {
        return Err(DataError::DimensionMismatch(format!(
            "row counts differ: features {}, exogenous {}, target {}",
            n,
            exogenous.rows(),
            target.len()
        )));
    }
    if n < window + horizon {
        return Err(DataError::NotEnoughRows {
            need: window + horizon,
            got: n,
        });
    }
    let samples = n - window - horizon + 1;
    let mut inputs = Vec::with_capacity(samples);
    let mut exo = Vec::with_capacity(samples);
    let mut targets = Vec::with_capacity(samples);
    for i in 0..samples {
        inputs.push(features.slice_rows(i, i + window));
        exo.push(exogenous.slice_rows(i, i + window));
        targets.push(target[i + window + horizon - 1]);
    }
    Ok(WindowedDataset {
        inputs,
        exogenous: exo,
        targets,
        window,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize, cols: usize) -> Matrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..cols).map(|j| (i * cols + j) as f64).collect())
            .collect();
        Matrix::from_rows(&rows)
    }

    #[test]
    fn sample_count_matches_formula() {
        let f = ramp(12, 3);
        let z = ramp(12, 1);
        let y: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let ds = make_windows(&f, &z, &y, 10, 1).unwrap();
        assert_eq!(ds.len(), 2);
        // Sample 0 covers rows [0, 10), target row 10.
        assert_eq!(ds.targets[0], 10.0);
        assert_eq!(ds.inputs[0].rows(), 10);
        assert_eq!(ds.inputs[0].row(9)[0], 27.0);
        // Sample 1 covers rows [1, 11), target row 11.
        assert_eq!(ds.targets[1], 11.0);
    }

    #[test]
    fn too_short_input_errors() {
        let f = ramp(10, 2);
        let z = ramp(10, 1);
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(
            make_windows(&f, &z, &y, 10, 1),
            Err(DataError::NotEnoughRows { need: 11, got: 10 })
        ));
    }

    #[test]
    fn horizon_shifts_targets() {
        let f = ramp(20, 1);
        let z = ramp(20, 1);
        let y: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ds = make_windows(&f, &z, &y, 5, 3).unwrap();
        assert_eq!(ds.len(), 20 - 5 - 3 + 1);
        // Sample 0: inputs rows [0,5), target row 5 + 3 - 1 = 7.
        assert_eq!(ds.targets[0], 7.0);
    }

    #[test]
    fn windows_are_translation_consistent() {
        let f = ramp(30, 2);
        let z = ramp(30, 1);
        let y: Vec<f64> = (0..30).map(|i| i as f64 * 1.5).collect();
        let full = make_windows(&f, &z, &y, 6, 2).unwrap();
        let k = 4;
        let shifted = make_windows(
            &f.slice_rows(k, 30),
            &z.slice_rows(k, 30),
            &y[k..],
            6,
            2,
        )
        .unwrap();
        for i in 0..shifted.len() {
            assert_eq!(shifted.inputs[i], full.inputs[i + k]);
            assert_eq!(shifted.targets[i], full.targets[i + k]);
        }
    }
}
