//! Seeded synthetic series generators for demos and tests.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rand_pcg::Pcg64Mcg;

use crate::data::{Bar, BarSeries};

/// Geometric-random-walk OHLCV bars on a 5-minute grid.
pub fn random_walk_bars(n: usize, seed: u64) -> BarSeries {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.0006).unwrap();
    let mut close: f64 = 108.0;
    let mut bars = Vec::with_capacity(n);
    for i in 0..n {
        let open = close;
        close *= 1.0 + normal.sample(&mut rng);
        let span = close.max(open) - close.min(open);
        let wick_up: f64 = rng.random_range(0.0..=0.5) * (span + 0.01);
        let wick_down: f64 = rng.random_range(0.0..=0.5) * (span + 0.01);
        bars.push(Bar {
            timestamp: i as i64 * 300,
            open,
            high: open.max(close) + wick_up,
            low: open.min(close) - wick_down,
            close,
            volume: rng.random_range(10.0..500.0),
        });
    }
    BarSeries::with_interval(bars, 300).expect("generated bars are valid")
}

/// Bars whose close is a given series; open is the previous close, wicks are
/// small and keep the OHLC invariants.
pub fn bars_from_closes(closes: &[f64], seed: u64) -> BarSeries {
    let mut rng = Pcg64Mcg::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut bars = Vec::with_capacity(closes.len());
    let mut prev = closes.first().copied().unwrap_or(0.0);
    for (i, &close) in closes.iter().enumerate() {
        let open = if i == 0 { close } else { prev };
        let span = (close - open).abs();
        let wick_up: f64 = rng.random_range(0.0..=0.5) * (span + 1e-3);
        let wick_down: f64 = rng.random_range(0.0..=0.5) * (span + 1e-3);
        bars.push(Bar {
            timestamp: i as i64 * 300,
            open,
            high: open.max(close) + wick_up,
            low: open.min(close) - wick_down,
            close,
            volume: rng.random_range(10.0..500.0),
        });
        prev = close;
    }
    BarSeries::with_interval(bars, 300).expect("generated bars are valid")
}

/// Smooth multi-sine signal of length `n` with seeded phases, amplitude ~1.
pub fn smooth_signal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let phases: Vec<(f64, f64, f64)> = (0..4)
        .map(|k| {
            (
                rng.random_range(0.0..std::f64::consts::TAU),
                // Periods between ~40 and ~400 steps.
                std::f64::consts::TAU / rng.random_range(40.0..400.0),
                0.3 + 0.7 / (k + 1) as f64,
            )
        })
        .collect();
    (0..n)
        .map(|t| {
            phases
                .iter()
                .map(|(phase, omega, amp)| amp * (omega * t as f64 + phase).sin())
                .sum()
        })
        .collect()
}

/// AR(p) process `x_t = c + sum phi_i x_{t-i} + eps_t` with N(0, sigma^2)
/// innovations, after a 200-step burn-in.
pub fn ar_process(n: usize, phi: &[f64], c: f64, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let burn = 200;
    let mut x = vec![0.0; n + burn];
    for t in 0..x.len() {
        let mut v = c + if sigma > 0.0 { normal.sample(&mut rng) } else { 0.0 };
        for (i, &p) in phi.iter().enumerate() {
            if t > i {
                v += p * x[t - 1 - i];
            }
        }
        x[t] = v;
    }
    x.split_off(burn)
}

/// Gaussian white noise.
pub fn white_noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}
