use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use super::Tensor;

/// Glorot-uniform initializer backed by a seeded PCG generator. Matrices
/// draw from `U(-limit, limit)` with `limit = sqrt(6 / (fan_in + fan_out))`;
/// biases start at zero (callers may then add a forget-gate offset).
pub struct GlorotInit {
    rng: Pcg64Mcg,
}

impl GlorotInit {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Pcg64Mcg::seed_from_u64(seed),
        }
    }

    /// `(rows, cols)` weight matrix; fan-in is `cols`, fan-out `rows`.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> Tensor {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| self.rng.random_range(-limit..limit))
            .collect();
        Tensor::matrix(rows, cols, data)
    }

    pub fn zero_vector(&mut self, len: usize) -> Tensor {
        Tensor::zeros(&[len])
    }

    pub fn constant_vector(&mut self, len: usize, value: f64) -> Tensor {
        Tensor::vector(vec![value; len])
    }
}
