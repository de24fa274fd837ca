use crate::data::Bar;

use super::IndicatorError;

/// True range of one bar given the previous close:
/// `max(high - low, |high - prev_close|, |low - prev_close|)`.
pub fn true_range(bar: &Bar, prev_close: f64) -> f64 {
    (bar.high - bar.low)
        .max((bar.high - prev_close).abs())
        .max((bar.low - prev_close).abs())
}

/// TR per bar; undefined at t = 0 where there is no previous close.
pub fn true_range_series(bars: &[Bar]) -> Vec<Option<f64>> {
    let mut out = vec![None; bars.len()];
    for t in 1..bars.len() {
        out[t] = Some(true_range(&bars[t], bars[t - 1].close));
    }
    out
}

fn insufficient(indicator: &'static str, need: usize, got: usize) -> IndicatorError {
    IndicatorError::InsufficientHistory {
        indicator,
        need,
        got,
    }
}

/// SMA-seeded EMA over a column that may start with undefined steps.
/// Defined from `first_defined + period - 1` on.
fn ema_option(values: &[Option<f64>], period: usize) -> Vec<Option<f64>> {
    let n = values.len();
    let mut out = vec![None; n];
    let Some(start) = values.iter().position(|v| v.is_some()) else {
        return out;
    };
    if n - start < period {
        return out;
    }
    let alpha = 2.0 / (period as f64 + 1.0);
    let seed_at = start + period - 1;
    let seed: f64 = values[start..=seed_at]
        .iter()
        .map(|v| v.expect("contiguous definedness"))
        .sum::<f64>()
        / period as f64;
    out[seed_at] = Some(seed);
    let mut prev = seed;
    for t in seed_at + 1..n {
        let x = values[t].expect("contiguous definedness");
        prev = prev + alpha * (x - prev);
        out[t] = Some(prev);
    }
    out
}

fn ema(values: &[f64], period: usize) -> Vec<Option<f64>> {
    let wrapped: Vec<Option<f64>> = values.iter().copied().map(Some).collect();
    ema_option(&wrapped, period)
}

/// Wilder moving average (alpha = 1/period) of a column whose first defined
/// index is `start`; seeded with the plain mean of the first `period` values.
fn wilder_option(values: &[Option<f64>], period: usize) -> Vec<Option<f64>> {
    let n = values.len();
    let mut out = vec![None; n];
    let Some(start) = values.iter().position(|v| v.is_some()) else {
        return out;
    };
    if n - start < period {
        return out;
    }
    let seed_at = start + period - 1;
    let seed: f64 = values[start..=seed_at]
        .iter()
        .map(|v| v.expect("contiguous definedness"))
        .sum::<f64>()
        / period as f64;
    out[seed_at] = Some(seed);
    let mut prev = seed;
    let alpha = 1.0 / period as f64;
    for t in seed_at + 1..n {
        let x = values[t].expect("contiguous definedness");
        prev = prev + alpha * (x - prev);
        out[t] = Some(prev);
    }
    out
}

/// Wilder-smoothed RSI in [0, 100]; defined from t = period.
pub fn rsi(closes: &[f64], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if closes.len() <= period {
        return Err(insufficient("rsi", period + 1, closes.len()));
    }
    let n = closes.len();
    let mut gains = vec![None; n];
    let mut losses = vec![None; n];
    for t in 1..n {
        let d = closes[t] - closes[t - 1];
        gains[t] = Some(d.max(0.0));
        losses[t] = Some((-d).max(0.0));
    }
    let ag = wilder_option(&gains, period);
    let al = wilder_option(&losses, period);
    let mut out = vec![None; n];
    for t in 0..n {
        if let (Some(g), Some(l)) = (ag[t], al[t]) {
            out[t] = Some(if g + l == 0.0 {
                // Flat history: neither gains nor losses.
                50.0
            } else {
                100.0 * g / (g + l)
            });
        }
    }
    Ok(out)
}

/// Price momentum `close_t - close_{t-period}`; defined from t = period.
pub fn momentum(closes: &[f64], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if closes.len() <= period {
        return Err(insufficient("momentum", period + 1, closes.len()));
    }
    let mut out = vec![None; closes.len()];
    for t in period..closes.len() {
        out[t] = Some(closes[t] - closes[t - period]);
    }
    Ok(out)
}

/// Stochastic %K over the trailing window; a flat window maps to 50.
pub fn stochastic_k(bars: &[Bar], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if bars.len() < period {
        return Err(insufficient("stochastic_k", period, bars.len()));
    }
    let mut out = vec![None; bars.len()];
    for t in period - 1..bars.len() {
        let window = &bars[t + 1 - period..=t];
        let hh = window.iter().map(|b| b.high).fold(f64::NEG_INFINITY, f64::max);
        let ll = window.iter().map(|b| b.low).fold(f64::INFINITY, f64::min);
        out[t] = Some(if hh == ll {
            50.0
        } else {
            100.0 * (bars[t].close - ll) / (hh - ll)
        });
    }
    Ok(out)
}

/// Williams %R in [-100, 0]; a flat window maps to -50.
pub fn williams_r(bars: &[Bar], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if bars.len() < period {
        return Err(insufficient("williams_r", period, bars.len()));
    }
    let mut out = vec![None; bars.len()];
    for t in period - 1..bars.len() {
        let window = &bars[t + 1 - period..=t];
        let hh = window.iter().map(|b| b.high).fold(f64::NEG_INFINITY, f64::max);
        let ll = window.iter().map(|b| b.low).fold(f64::INFINITY, f64::min);
        out[t] = Some(if hh == ll {
            -50.0
        } else {
            -100.0 * (hh - bars[t].close) / (hh - ll)
        });
    }
    Ok(out)
}

/// Balance of power `(close - open) / (high - low)`, 0 on a degenerate bar.
pub fn balance_of_power(bars: &[Bar]) -> Vec<Option<f64>> {
    bars.iter()
        .map(|b| {
            Some(if b.high == b.low {
                0.0
            } else {
                (b.close - b.open) / (b.high - b.low)
            })
        })
        .collect()
}

/// Commodity channel index over the typical price (H+L+C)/3.
pub fn cci(bars: &[Bar], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if bars.len() < period {
        return Err(insufficient("cci", period, bars.len()));
    }
    let tp: Vec<f64> = bars.iter().map(|b| (b.high + b.low + b.close) / 3.0).collect();
    let mut out = vec![None; bars.len()];
    for t in period - 1..bars.len() {
        let window = &tp[t + 1 - period..=t];
        let mean = window.iter().sum::<f64>() / period as f64;
        let mad = window.iter().map(|v| (v - mean).abs()).sum::<f64>() / period as f64;
        out[t] = Some(if mad == 0.0 {
            0.0
        } else {
            (tp[t] - mean) / (0.015 * mad)
        });
    }
    Ok(out)
}

/// Chande momentum oscillator: 100 * (sum gains - sum losses) / (sum gains + sum losses).
pub fn cmo(closes: &[f64], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if closes.len() <= period {
        return Err(insufficient("cmo", period + 1, closes.len()));
    }
    let mut out = vec![None; closes.len()];
    for t in period..closes.len() {
        let (mut up, mut down) = (0.0, 0.0);
        for i in t + 1 - period..=t {
            let d = closes[i] - closes[i - 1];
            if d >= 0.0 {
                up += d;
            } else {
                down -= d;
            }
        }
        out[t] = Some(if up + down == 0.0 {
            0.0
        } else {
            100.0 * (up - down) / (up + down)
        });
    }
    Ok(out)
}

/// Absolute price oscillator: EMA(fast) - EMA(slow).
pub fn apo(closes: &[f64], fast: usize, slow: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if closes.len() < fast.max(slow) {
        return Err(insufficient("apo", fast.max(slow), closes.len()));
    }
    let f = ema(closes, fast);
    let s = ema(closes, slow);
    Ok(f.iter()
        .zip(&s)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        })
        .collect())
}

/// Percentage price oscillator: 100 * (EMA(fast) - EMA(slow)) / EMA(slow).
pub fn ppo(closes: &[f64], fast: usize, slow: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if closes.len() < fast.max(slow) {
        return Err(insufficient("ppo", fast.max(slow), closes.len()));
    }
    let f = ema(closes, fast);
    let s = ema(closes, slow);
    Ok(f.iter()
        .zip(&s)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(if *b == 0.0 { 0.0 } else { 100.0 * (a - b) / b }),
            _ => None,
        })
        .collect())
}

/// MACD line: EMA(fast) - EMA(slow). The signal and histogram are not part
/// of the feature set.
pub fn macd_line(
    closes: &[f64],
    fast: usize,
    slow: usize,
) -> Result<Vec<Option<f64>>, IndicatorError> {
    apo(closes, fast, slow)
}

/// TRIX: 1-step percent rate of change of a triple EMA.
pub fn trix(closes: &[f64], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    let need = 3 * (period - 1) + 2;
    if closes.len() < need {
        return Err(insufficient("trix", need, closes.len()));
    }
    let e1 = ema(closes, period);
    let e2 = ema_option(&e1, period);
    let e3 = ema_option(&e2, period);
    let mut out = vec![None; closes.len()];
    for t in 1..closes.len() {
        if let (Some(curr), Some(prev)) = (e3[t], e3[t - 1]) {
            out[t] = Some(if prev == 0.0 {
                0.0
            } else {
                100.0 * (curr / prev - 1.0)
            });
        }
    }
    Ok(out)
}

/// Aroon oscillator: AroonUp - AroonDown over the trailing `period + 1`
/// bars. The most recent extreme wins ties.
pub fn aroon_oscillator(bars: &[Bar], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if bars.len() <= period {
        return Err(insufficient("aroon_oscillator", period + 1, bars.len()));
    }
    let mut out = vec![None; bars.len()];
    for t in period..bars.len() {
        let (mut hi_off, mut lo_off) = (0usize, 0usize);
        let (mut hi, mut lo) = (bars[t].high, bars[t].low);
        for off in 1..=period {
            let b = &bars[t - off];
            if b.high > hi {
                hi = b.high;
                hi_off = off;
            }
            if b.low < lo {
                lo = b.low;
                lo_off = off;
            }
        }
        let up = 100.0 * (period - hi_off) as f64 / period as f64;
        let down = 100.0 * (period - lo_off) as f64 / period as f64;
        out[t] = Some(up - down);
    }
    Ok(out)
}

/// Average true range: Wilder moving average of TR; defined from t = period.
pub fn atr(bars: &[Bar], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if bars.len() <= period {
        return Err(insufficient("atr", period + 1, bars.len()));
    }
    Ok(wilder_option(&true_range_series(bars), period))
}

/// Normalized ATR: 100 * ATR / close.
pub fn natr(bars: &[Bar], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    let atr_series = atr(bars, period)?;
    Ok(atr_series
        .iter()
        .zip(bars)
        .map(|(a, b)| a.map(|v| if b.close == 0.0 { 0.0 } else { 100.0 * v / b.close }))
        .collect())
}

/// Average directional movement index (Wilder). Defined from t = 2*period - 1.
pub fn adx(bars: &[Bar], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    let need = 2 * period;
    if bars.len() < need {
        return Err(insufficient("adx", need, bars.len()));
    }
    let n = bars.len();
    let tr = true_range_series(bars);
    let mut pdm = vec![None; n];
    let mut ndm = vec![None; n];
    for t in 1..n {
        let up = bars[t].high - bars[t - 1].high;
        let down = bars[t - 1].low - bars[t].low;
        pdm[t] = Some(if up > down && up > 0.0 { up } else { 0.0 });
        ndm[t] = Some(if down > up && down > 0.0 { down } else { 0.0 });
    }
    let tr_s = wilder_option(&tr, period);
    let pdm_s = wilder_option(&pdm, period);
    let ndm_s = wilder_option(&ndm, period);
    let mut dx = vec![None; n];
    for t in 0..n {
        if let (Some(trv), Some(p), Some(m)) = (tr_s[t], pdm_s[t], ndm_s[t]) {
            let (pdi, ndi) = if trv == 0.0 {
                (0.0, 0.0)
            } else {
                (100.0 * p / trv, 100.0 * m / trv)
            };
            dx[t] = Some(if pdi + ndi == 0.0 {
                0.0
            } else {
                100.0 * (pdi - ndi).abs() / (pdi + ndi)
            });
        }
    }
    // ADX is the Wilder average of DX.
    Ok(wilder_option(&dx, period))
}
