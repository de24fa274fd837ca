use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("vectors must have equal non-zero length, got {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("MAPE is undefined: ground truth contains a zero at index {0}")]
    ZeroTruth(usize),
    #[error("directional accuracy needs at least 2 points, got {0}")]
    TooShort(usize),
}

fn check_lengths(y_hat: &[f64], y: &[f64]) -> Result<(), MetricsError> {
    if y_hat.len() != y.len() || y.is_empty() {
        return Err(MetricsError::LengthMismatch(y_hat.len(), y.len()));
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse(y_hat: &[f64], y: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(y_hat, y)?;
    let sse: f64 = y_hat.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sse / y.len() as f64).sqrt())
}

/// Mean absolute percentage error, in percent.
pub fn mape(y_hat: &[f64], y: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(y_hat, y)?;
    if let Some(i) = y.iter().position(|v| *v == 0.0) {
        return Err(MetricsError::ZeroTruth(i));
    }
    let acc: f64 = y_hat
        .iter()
        .zip(y)
        .map(|(a, b)| ((a - b) / b).abs())
        .sum();
    Ok(acc / y.len() as f64 * 100.0)
}

/// Directional accuracy over the N-1 comparable pairs: step t counts as a
/// hit when the actual move `y_{t+1} - y_t` and the predicted move
/// `y_hat_{t+1} - y_t` agree in sign. Either factor being zero counts as
/// correct (the product is >= 0).
pub fn directional_accuracy(y_hat: &[f64], y: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(y_hat, y)?;
    if y.len() < 2 {
        return Err(MetricsError::TooShort(y.len()));
    }
    let mut hits = 0usize;
    for t in 0..y.len() - 1 {
        if (y[t + 1] - y[t]) * (y_hat[t + 1] - y[t]) >= 0.0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / (y.len() - 1) as f64)
}

/// Residuals `R_t = y_t - y_hat_t` per the hybrid decomposition.
pub fn residual_series(y: &[f64], y_hat_arnn: &[f64]) -> Result<Vec<f64>, MetricsError> {
    check_lengths(y_hat_arnn, y)?;
    Ok(y.iter().zip(y_hat_arnn).map(|(a, b)| a - b).collect())
}

/// Final hybrid prediction `y_hat = y_hat_arnn + r_hat`.
pub fn combine(y_hat_arnn: &[f64], r_hat: &[f64]) -> Result<Vec<f64>, MetricsError> {
    check_lengths(y_hat_arnn, r_hat)?;
    Ok(y_hat_arnn.iter().zip(r_hat).map(|(a, b)| a + b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_cases() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let v = rmse(&[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert!((v - 2.5f64.sqrt()).abs() < 1e-12, "{v}");
        // Homogeneity: scaling both vectors scales the metric.
        let a = rmse(&[1.0, 3.0, -2.0], &[0.5, 2.0, 1.0]).unwrap();
        let b = rmse(&[3.0, 9.0, -6.0], &[1.5, 6.0, 3.0]).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-12);
        assert!(rmse(&[1.0], &[]).is_err());
    }

    #[test]
    fn mape_cases() {
        assert!((mape(&[110.0], &[100.0]).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(mape(&[5.0, 7.0], &[5.0, 7.0]).unwrap(), 0.0);
        let v = mape(&[90.0, 110.0], &[100.0, 100.0]).unwrap();
        assert!((v - 10.0).abs() < 1e-12);
        assert!(matches!(
            mape(&[1.0, 1.0], &[1.0, 0.0]),
            Err(MetricsError::ZeroTruth(1))
        ));
    }

    #[test]
    fn directional_accuracy_cases() {
        // Perfect prediction.
        assert_eq!(
            directional_accuracy(&[1.0, 2.0, 1.5], &[1.0, 2.0, 1.5]).unwrap(),
            1.0
        );
        // Every predicted move opposite: (2-1)(0-1) < 0, (1-2)(3-2) < 0.
        assert_eq!(
            directional_accuracy(&[1.0, 0.0, 3.0], &[1.0, 2.0, 1.0]).unwrap(),
            0.0
        );
        // Flat truth: first factor is 0, ties count as correct.
        assert_eq!(directional_accuracy(&[5.0, 9.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(directional_accuracy(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn da_is_bounded_and_perfect_on_self() {
        let y = vec![1.0, 3.0, 2.0, 2.5, 2.5, 4.0];
        let da = directional_accuracy(&y, &y).unwrap();
        assert_eq!(da, 1.0);
    }

    #[test]
    fn residual_and_combine_are_inverse() {
        let y = vec![2.0, 3.0];
        let y_hat = vec![1.0, 1.0];
        let r = residual_series(&y, &y_hat).unwrap();
        assert_eq!(r, vec![1.0, 2.0]);
        // combine(y_hat, residual_series(y, y_hat)) == y, bitwise.
        assert_eq!(combine(&y_hat, &r).unwrap(), y);
        // r_hat = 0 keeps the network prediction.
        assert_eq!(combine(&y_hat, &[0.0, 0.0]).unwrap(), y_hat);
        assert_eq!(combine(&[1.0], &[0.5]).unwrap(), vec![1.5]);
    }

    #[test]
    fn perfect_residual_forecast_recovers_truth() {
        let y = vec![7.25, -1.5, 0.0, 3.75];
        let y_hat = vec![7.0, -1.0, 0.5, 3.5];
        let r = residual_series(&y, &y_hat).unwrap();
        let recovered = combine(&y_hat, &r).unwrap();
        assert_eq!(recovered, y);
        let zero_resid = residual_series(&recovered, &combine(&y_hat, &r).unwrap()).unwrap();
        assert!(zero_resid.iter().all(|v| *v == 0.0));
    }
}
