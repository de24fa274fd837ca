use super::Tensor;

/// Adam optimizer state: first/second moment estimates per parameter tensor
/// and the shared step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Tensor>,
    v: Vec<Tensor>,
    t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(params: &[&Tensor], lr: f64) -> Self {
        Self {
            m: params.iter().map(|p| Tensor::zeros(p.shape())).collect(),
            v: params.iter().map(|p| Tensor::zeros(p.shape())).collect(),
            t: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One bias-corrected Adam step, in parameter order.
    pub fn update(&mut self, params: &mut [&mut Tensor], grads: &[Tensor]) {
        assert_eq!(params.len(), self.m.len(), "parameter count changed");
        assert_eq!(params.len(), grads.len(), "gradient count mismatch");
        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        for (i, p) in params.iter_mut().enumerate() {
            assert_eq!(p.shape(), grads[i].shape(), "gradient shape mismatch");
            let m = self.m[i].data_mut();
            let v = self.v[i].data_mut();
            let g = grads[i].data();
            for (k, pv) in p.data_mut().iter_mut().enumerate() {
                m[k] = self.beta1 * m[k] + (1.0 - self.beta1) * g[k];
                v[k] = self.beta2 * v[k] + (1.0 - self.beta2) * g[k] * g[k];
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                *pv -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
    }
}

/// Functional single-tensor Adam step; returns the updated parameter and
/// state. Convenience wrapper over [`AdamState::update`].
pub fn adam_update(param: &Tensor, grad: &Tensor, state: Option<AdamState>, lr: f64) -> (Tensor, AdamState) {
    let mut state = state.unwrap_or_else(|| AdamState::new(&[param], lr));
    let mut p = param.clone();
    state.update(&mut [&mut p], std::slice::from_ref(grad));
    (p, state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let p = Tensor::vector(vec![1.0, -2.0, 3.0]);
        let g = Tensor::vector(vec![0.0, 0.0, 0.0]);
        let (p2, _) = adam_update(&p, &g, None, 0.001);
        assert_eq!(p2, p);
    }

    #[test]
    fn first_step_magnitude_is_learning_rate() {
        // Bias correction makes m_hat / sqrt(v_hat) = sign(g) on step one.
        let p = Tensor::vector(vec![0.0, 0.0]);
        let g = Tensor::vector(vec![3.0, -0.01]);
        let lr = 0.001;
        let (p2, _) = adam_update(&p, &g, None, lr);
        assert!((p2.data()[0] + lr).abs() < 1e-6, "{}", p2.data()[0]);
        assert!((p2.data()[1] - lr).abs() < 1e-6, "{}", p2.data()[1]);
    }

    #[test]
    fn constant_gradient_decreases_parameter_monotonically() {
        let mut p = Tensor::vector(vec![1.0]);
        let g = Tensor::vector(vec![0.5]);
        let mut state = AdamState::new(&[&p], 0.01);
        let mut prev = p.data()[0];
        for _ in 0..50 {
            state.update(&mut [&mut p], std::slice::from_ref(&g));
            assert!(p.data()[0] < prev);
            prev = p.data()[0];
        }
    }

    #[test]
    fn update_is_deterministic() {
        let run = || {
            let mut p = Tensor::vector(vec![0.3, -0.7]);
            let mut state = AdamState::new(&[&p], 0.001);
            for step in 0..100 {
                let g = Tensor::vector(vec![(step as f64 * 0.1).sin(), 0.2]);
                state.update(&mut [&mut p], std::slice::from_ref(&g));
            }
            p
        };
        assert_eq!(run(), run());
    }
}
