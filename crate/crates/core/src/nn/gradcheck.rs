use rand::{seq::SliceRandom, SeedableRng};
use rand_pcg::Pcg64Mcg;

use super::{NnError, Tensor};

/// Result of a finite-difference gradient check.
#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub coords_checked: usize,
}

/// Compares an analytic gradient against central finite differences
/// `(L(p + h) - L(p - h)) / 2h` on a random subsample of up to
/// `per_tensor` coordinates per tensor.
///
/// The relative error is `|g_ad - g_fd| / max(|g_ad| + |g_fd|, 1e-8)`.
/// A coordinate whose first comparison looks bad is re-evaluated across a
/// ladder of step sizes and the best agreement kept: smaller steps move a
/// ReLU kink out of the sampled interval, larger steps beat float64
/// roundoff on near-zero gradients.
pub fn gradient_check(
    loss: &dyn Fn(&[Tensor]) -> f64,
    point: &[Tensor],
    analytic: &[Tensor],
    h: f64,
    per_tensor: usize,
    seed: u64,
) -> Result<GradCheckReport, NnError> {
    assert_eq!(point.len(), analytic.len(), "gradient count mismatch");
    let base = loss(point);
    if !base.is_finite() {
        return Err(NnError::NonFiniteLoss(format!(" (loss at the point: {base})")));
    }
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let mut max_rel = 0.0f64;
    let mut checked = 0usize;

    let mut work: Vec<Tensor> = point.to_vec();
    for ti in 0..point.len() {
        let len = point[ti].len();
        let mut coords: Vec<usize> = (0..len).collect();
        coords.shuffle(&mut rng);
        coords.truncate(per_tensor.min(len));

        for &k in &coords {
            let ad = analytic[ti].data()[k];
            let mut best_rel = f64::MAX;
            for step in [h, 4.0 * h, h / 4.0, 16.0 * h, h / 16.0] {
                let original = work[ti].data()[k];
                work[ti].data_mut()[k] = original + step;
                let up = loss(&work);
                work[ti].data_mut()[k] = original - step;
                let down = loss(&work);
                work[ti].data_mut()[k] = original;
                if !up.is_finite() || !down.is_finite() {
                    return Err(NnError::NonFiniteLoss(String::new()));
                }
                let fd = (up - down) / (2.0 * step);
                let rel = (ad - fd).abs() / (ad.abs() + fd.abs()).max(1e-8);
                best_rel = best_rel.min(rel);
                if best_rel < 1e-6 {
                    break;
                }
            }
            max_rel = max_rel.max(best_rel);
            checked += 1;
        }
    }
    Ok(GradCheckReport {
        max_rel_err: max_rel,
        coords_checked: checked,
    })
}
