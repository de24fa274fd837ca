use serde::{Deserialize, Serialize};

use super::{WaveletError, WaveletFilter};

/// Boundary extension used by the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Half-point mirror (`... x1 x0 | x0 x1 ...`). Band length per level is
    /// `(n + L - 1) / 2` (integer division). The transform is redundant at
    /// the edges but exactly invertible for any length.
    #[default]
    Symmetric,
    /// Circular wrap-around on an even-length signal (odd inputs are padded
    /// by repeating the last sample). Non-redundant: band length is
    /// `ceil(n / 2)` and the transform is orthogonal, so energy is conserved.
    Periodic,
}

/// Multilevel wavelet decomposition: one approximation band at the deepest
/// level plus one detail band per level, deepest first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffPyramid {
    pub approx: Vec<f64>,
    /// Detail bands, deepest level first; the finest band is last.
    pub details: Vec<Vec<f64>>,
    pub level: usize,
    pub original_length: usize,
    pub boundary_mode: BoundaryMode,
    pub filter_name: String,
    pub filter_len: usize,
}

impl CoeffPyramid {
    /// Detail band of the finest (level-1) scale.
    pub fn finest_detail(&self) -> &[f64] {
        self.details.last().expect("pyramid has at least one level")
    }
}

fn sym_ext(x: &[f64], idx: i64) -> f64 {
    let n = x.len() as i64;
    let period = 2 * n;
    let mut m = idx % period;
    if m < 0 {
        m += period;
    }
    let pos = if m < n { m } else { period - 1 - m };
    x[pos as usize]
}

fn per_ext(x: &[f64], idx: i64) -> f64 {
    let n = x.len() as i64;
    let mut m = idx % n;
    if m < 0 {
        m += n;
    }
    x[m as usize]
}

/// One analysis step: filter with the decomposition pair and downsample by
/// two. `out[i] = sum_k f[k] * ext(x)[2i + 1 - k]`.
fn analyze(x: &[f64], filter: &WaveletFilter, mode: BoundaryMode) -> (Vec<f64>, Vec<f64>) {
    let l = filter.len();
    match mode {
        BoundaryMode::Symmetric => {
            let m = (x.len() + l - 1) / 2;
            let mut approx = vec![0.0; m];
            let mut detail = vec![0.0; m];
            for i in 0..m {
                let (mut a, mut d) = (0.0, 0.0);
                for k in 0..l {
                    let v = sym_ext(x, 2 * i as i64 + 1 - k as i64);
                    a += filter.lowpass_dec()[k] * v;
                    d += filter.highpass_dec()[k] * v;
                }
                approx[i] = a;
                detail[i] = d;
            }
            (approx, detail)
        }
        BoundaryMode::Periodic => {
            let padded: Vec<f64> = if x.len() % 2 == 1 {
                let mut p = x.to_vec();
                p.push(*x.last().unwrap());
                p
            } else {
                x.to_vec()
            };
            let m = padded.len() / 2;
            let mut approx = vec![0.0; m];
            let mut detail = vec![0.0; m];
            for i in 0..m {
                let (mut a, mut d) = (0.0, 0.0);
                for k in 0..l {
                    let v = per_ext(&padded, 2 * i as i64 + 1 - k as i64);
                    a += filter.lowpass_dec()[k] * v;
                    d += filter.highpass_dec()[k] * v;
                }
                approx[i] = a;
                detail[i] = d;
            }
            (approx, detail)
        }
    }
}

/// One synthesis step, inverting [`analyze`] back to `target_len` samples.
fn synthesize(
    approx: &[f64],
    detail: &[f64],
    filter: &WaveletFilter,
    mode: BoundaryMode,
    target_len: usize,
) -> Vec<f64> {
    let l = filter.len();
    let m = approx.len();
    debug_assert_eq!(detail.len(), m);
    match mode {
        BoundaryMode::Symmetric => {
            // rec[j] = sum_i a[i] rec_lo[j + L - 2 - 2i] + d[i] rec_hi[...],
            // keeping filter indices inside [0, L).
            let mut out = vec![0.0; target_len];
            for (j, slot) in out.iter_mut().enumerate() {
                let t = j as i64 + l as i64 - 2;
                let mut acc = 0.0;
                let i_lo = ((t - (l as i64 - 1)) + 1) / 2; // smallest i with t - 2i <= L-1
                let i_lo = i_lo.max(0) as usize;
                for i in i_lo..m {
                    let k = t - 2 * i as i64;
                    if k < 0 {
                        break;
                    }
                    let k = k as usize;
                    acc += approx[i] * filter.lowpass_rec()[k] + detail[i] * filter.highpass_rec()[k];
                }
                *slot = acc;
            }
            out
        }
        BoundaryMode::Periodic => {
            // Transpose of the orthogonal analysis operator on 2m samples.
            let n = 2 * m;
            let mut full = vec![0.0; n];
            for i in 0..m {
                for k in 0..l {
                    let mut j = (2 * i as i64 + 1 - k as i64) % n as i64;
                    if j < 0 {
                        j += n as i64;
                    }
                    full[j as usize] +=
                        approx[i] * filter.lowpass_dec()[k] + detail[i] * filter.highpass_dec()[k];
                }
            }
            full.truncate(target_len);
            full
        }
    }
}

/// Decomposes a signal into `level` detail bands plus one approximation.
pub fn dwt_multilevel(
    signal: &[f64],
    filter: &WaveletFilter,
    level: usize,
    mode: BoundaryMode,
) -> Result<CoeffPyramid, WaveletError> {
    if level == 0 {
        return Err(WaveletError::ZeroLevel);
    }
    let mut current = signal.to_vec();
    let mut details_finest_first = Vec::with_capacity(level);
    for depth in 1..=level {
        if current.len() < filter.len() {
            return Err(WaveletError::SignalTooShort {
                len: current.len(),
                filter_len: filter.len(),
                level: depth,
            });
        }
        let (approx, detail) = analyze(&current, filter, mode);
        details_finest_first.push(detail);
        current = approx;
    }
    details_finest_first.reverse();
    Ok(CoeffPyramid {
        approx: current,
        details: details_finest_first,
        level,
        original_length: signal.len(),
        boundary_mode: mode,
        filter_name: filter.name().to_string(),
        filter_len: filter.len(),
    })
}

/// Reconstructs the signal from a pyramid. With an untouched pyramid this is
/// the exact inverse of [`dwt_multilevel`].
pub fn idwt_multilevel(
    pyramid: &CoeffPyramid,
    filter: &WaveletFilter,
) -> Result<Vec<f64>, WaveletError> {
    if pyramid.filter_len != filter.len() {
        return Err(WaveletError::FilterMismatch {
            expected: pyramid.filter_len,
            got: filter.len(),
        });
    }
    if pyramid.details.is_empty() {
        return Err(WaveletError::EmptyPyramid);
    }
    let mut current = pyramid.approx.clone();
    for (idx, detail) in pyramid.details.iter().enumerate() {
        if detail.len() != current.len() {
            return Err(WaveletError::FilterMismatch {
                expected: current.len(),
                got: detail.len(),
            });
        }
        // Target length of this synthesis step: the band length one level
        // shallower, or the original signal length at the last step.
        let target = match pyramid.details.get(idx + 1) {
            Some(next) => next.len(),
            None => pyramid.original_length,
        };
        current = synthesize(&current, detail, filter, pyramid.boundary_mode, target);
    }
    Ok(current)
}
