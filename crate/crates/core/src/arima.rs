//! Backshift differencing, AR/MA/ARMA/ARIMA estimation, and h-step
//! forecasting.
//!
//! Pure AR models are fitted by exact ordinary least squares on the lagged
//! regression (normal equations, with an orthogonal-decomposition fallback
//! when the Gram matrix is ill-conditioned). Models with an MA component
//! minimize the conditional sum of squares with zero-seeded innovations via
//! Nelder-Mead. Full maximum likelihood is out of scope; the hybrid's
//! residual model is AR(3), where OLS is exact.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArimaError {
    #[error("order ({p},{d},{q}) is trivial: need p + q >= 1 or d >= 1")]
    TrivialOrder { p: usize, d: usize, q: usize },
    #[error("series of length {got} is too short: need at least {need}")]
    NotEnoughData { need: usize, got: usize },
    #[error("singular design matrix (e.g. constant series with p > 0)")]
    SingularDesign,
    #[error("difference order {d} needs more than {d} observations, got {got}")]
    TooShortToDifference { d: usize, got: usize },
    #[error("undifference needs exactly {need} seed values, got {got}")]
    WrongSeedLength { need: usize, got: usize },
}

/// ARIMA(p, d, q) orders. A trivial (0, 0, 0) model is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self, ArimaError> {
        if p + q == 0 && d == 0 {
            return Err(ArimaError::TrivialOrder { p, d, q });
        }
        Ok(Self { p, d, q })
    }
}

/// `d`-th difference: output length is `len - d`; `d = 0` is the identity.
pub fn difference(series: &[f64], d: usize) -> Result<Vec<f64>, ArimaError> {
    if series.len() <= d {
        return Err(ArimaError::TooShortToDifference {
            d,
            got: series.len(),
        });
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Exact inverse of [`difference`]: `seed_values` are the first `d` values
/// of the original series.
pub fn undifference(diffed: &[f64], seed_values: &[f64], d: usize) -> Result<Vec<f64>, ArimaError> {
    if seed_values.len() != d {
        return Err(ArimaError::WrongSeedLength {
            need: d,
            got: seed_values.len(),
        });
    }
    let mut out = diffed.to_vec();
    for level in (0..d).rev() {
        // Rebuild the next-shallower difference level: its first value is
        // the level-th difference of the seed block.
        let seed = difference(&seed_values[..=level], level)?[0];
        let mut rebuilt = Vec::with_capacity(out.len() + 1);
        rebuilt.push(seed);
        let mut acc = seed;
        for &v in &out {
            acc += v;
            rebuilt.push(acc);
        }
        out = rebuilt;
    }
    Ok(out)
}

/// A fitted ARIMA model plus the series tails needed to forecast onward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    /// AR coefficients, lag 1 first.
    pub phi: Vec<f64>,
    /// MA coefficients, lag 1 first.
    pub theta: Vec<f64>,
    /// Intercept of the differenced series regression.
    pub c: f64,
    /// Innovation variance estimate.
    pub sigma2: f64,
    /// Whether all AR roots lie outside the unit circle. A violation is a
    /// warning, not an error: borderline residual series must not abort the
    /// hybrid.
    pub stationary: bool,
    /// Tail of the differenced series (most recent last), length >= p.
    pub last_values: Vec<f64>,
    /// Tail of in-sample innovations (most recent last), length >= q.
    pub last_residuals: Vec<f64>,
    /// Last `d` original-scale observations for undifferencing forecasts.
    pub integration_seeds: Vec<f64>,
}

/// One-step rolling forecast state. Advancing on an observation returns a
/// new state, the model itself never mutates.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaState {
    diffed_tail: Vec<f64>,
    resid_tail: Vec<f64>,
    original_tail: Vec<f64>,
}

impl ArimaState {
    /// Most recent differenced observation.
    pub fn last_value(&self) -> Option<f64> {
        self.diffed_tail.last().copied()
    }
}

impl ArimaModel {
    /// Fits by OLS (q = 0) or conditional sum of squares (q > 0).
    pub fn fit(series: &[f64], order: ArimaOrder) -> Result<Self, ArimaError> {
        let ArimaOrder { p, d, q } = order;
        let need = p + q + d + 2;
        if series.len() < need {
            return Err(ArimaError::NotEnoughData {
                need,
                got: series.len(),
            });
        }
        let w = difference(series, d)?;
        let (phi, theta, c, sigma2, residuals) = if q == 0 {
            let (phi, c, sigma2, residuals) = fit_ar_ols(&w, p)?;
            (phi, Vec::new(), c, sigma2, residuals)
        } else {
            fit_css(&w, p, q)?
        };
        let stationary = ar_is_stationary(&phi);
        let tail_len = p.max(1).min(w.len());
        let resid_len = q.min(residuals.len());
        Ok(Self {
            order,
            phi,
            theta,
            c,
            sigma2,
            stationary,
            last_values: w[w.len() - tail_len..].to_vec(),
            last_residuals: residuals[residuals.len() - resid_len..].to_vec(),
            integration_seeds: series[series.len() - d..].to_vec(),
        })
    }

    /// Unconditional mean of the differenced process, `c / (1 - sum phi)`.
    pub fn mean(&self) -> f64 {
        let s: f64 = self.phi.iter().sum();
        if (1.0 - s).abs() < 1e-12 {
            self.c
        } else {
            self.c / (1.0 - s)
        }
    }

    /// h-step-ahead forecasts with future innovations set to zero. For
    /// d > 0 the differenced path is integrated back to original scale.
    pub fn forecast(&self, steps: usize) -> Vec<f64> {
        assert!(steps >= 1, "steps must be >= 1");
        let mut values = self.last_values.clone();
        let mut residuals = self.last_residuals.clone();
        let mut diffed_path = Vec::with_capacity(steps);
        for _ in 0..steps {
            let next = self.next_diffed(&values, &residuals);
            values.push(next);
            residuals.push(0.0); // future innovations are their expectation
            diffed_path.push(next);
        }
        self.integrate(&diffed_path)
    }

    /// Expectation of the next differenced value given tails.
    fn next_diffed(&self, values: &[f64], residuals: &[f64]) -> f64 {
        let mut v = self.c;
        for (i, &phi) in self.phi.iter().enumerate() {
            if values.len() > i {
                v += phi * values[values.len() - 1 - i];
            }
        }
        for (j, &theta) in self.theta.iter().enumerate() {
            if residuals.len() > j {
                v += theta * residuals[residuals.len() - 1 - j];
            }
        }
        v
    }

    /// Integrates a differenced forecast path onto the original scale.
    fn integrate(&self, diffed_path: &[f64]) -> Vec<f64> {
        let d = self.order.d;
        if d == 0 {
            return diffed_path.to_vec();
        }
        // Difference the observed tail down level by level, then cumulate
        // the forecast path back up from the deepest level.
        let mut tails: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
        tails.push(self.integration_seeds.clone());
        for level in 1..=d {
            let prev = &tails[level - 1];
            tails.push(prev.windows(2).map(|w| w[1] - w[0]).collect());
        }
        let mut path = diffed_path.to_vec();
        for level in (0..d).rev() {
            let mut acc = *tails[level].last().expect("non-empty tail");
            let mut rebuilt = Vec::with_capacity(path.len());
            for &v in &path {
                acc += v;
                rebuilt.push(acc);
            }
            path = rebuilt;
        }
        path
    }

    /// Fresh rolling state from the fitted tails.
    pub fn initial_state(&self) -> ArimaState {
        ArimaState {
            diffed_tail: self.last_values.clone(),
            resid_tail: self.last_residuals.clone(),
            original_tail: self.integration_seeds.clone(),
        }
    }

    /// One-step forecast in original units from a rolling state.
    pub fn one_step(&self, state: &ArimaState) -> f64 {
        let next_diffed = self.next_diffed(&state.diffed_tail, &state.resid_tail);
        if self.order.d == 0 {
            return next_diffed;
        }
        let mut tails: Vec<Vec<f64>> = vec![state.original_tail.clone()];
        for level in 1..=self.order.d {
            let prev = &tails[level - 1];
            tails.push(prev.windows(2).map(|w| w[1] - w[0]).collect());
        }
        let mut v = next_diffed;
        for level in (0..self.order.d).rev() {
            v += *tails[level].last().expect("non-empty tail");
        }
        v
    }

    /// Returns the one-step forecast and the state advanced on the realized
    /// observation (original units).
    pub fn step(&self, state: &ArimaState, observed: f64) -> (f64, ArimaState) {
        let forecast = self.one_step(state);
        let d = self.order.d;
        let diffed_obs = if d == 0 {
            observed
        } else {
            let mut block = state.original_tail.clone();
            block.push(observed);
            *difference(&block, d)
                .expect("tail has d + 1 values")
                .last()
                .expect("non-empty")
        };
        let predicted_diffed = self.next_diffed(&state.diffed_tail, &state.resid_tail);
        let residual = diffed_obs - predicted_diffed;

        let keep = |v: &mut Vec<f64>, cap: usize| {
            if v.len() > cap {
                let excess = v.len() - cap;
                v.drain(..excess);
            }
        };
        let mut next = state.clone();
        next.diffed_tail.push(diffed_obs);
        keep(&mut next.diffed_tail, self.order.p.max(1) + 1);
        next.resid_tail.push(residual);
        keep(&mut next.resid_tail, self.order.q + 1);
        if d > 0 {
            next.original_tail.push(observed);
            keep(&mut next.original_tail, d);
        }
        (forecast, next)
    }
}

/// Exact OLS on the lagged regression `w_t = c + sum phi_i w_{t-i} + e_t`.
/// Returns (phi, c, sigma2, residuals).
fn fit_ar_ols(w: &[f64], p: usize) -> Result<(Vec<f64>, f64, f64, Vec<f64>), ArimaError> {
    let n = w.len();
    if p == 0 {
        // Intercept-only model: the mean.
        let c = w.iter().sum::<f64>() / n as f64;
        let residuals: Vec<f64> = w.iter().map(|v| v - c).collect();
        let dof = (n as f64 - 1.0).max(1.0);
        let sigma2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof;
        return Ok((Vec::new(), c, sigma2, residuals));
    }
    let rows = n - p;
    if rows < p + 1 {
        return Err(ArimaError::NotEnoughData { need: 2 * p + 1, got: n });
    }
    let mut x = DMatrix::zeros(rows, p + 1);
    let mut y = DVector::zeros(rows);
    for t in p..n {
        let r = t - p;
        x[(r, 0)] = 1.0;
        for i in 0..p {
            x[(r, i + 1)] = w[t - 1 - i];
        }
        y[r] = w[t];
    }

    let beta = solve_least_squares(&x, &y)?;
    let c = beta[0];
    let phi: Vec<f64> = (0..p).map(|i| beta[i + 1]).collect();
    let fitted = &x * &beta;
    let residuals: Vec<f64> = (0..rows).map(|r| y[r] - fitted[r]).collect();
    let dof = (rows as f64 - (p + 1) as f64).max(1.0);
    let sigma2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof;
    Ok((phi, c, sigma2, residuals))
}

/// Normal equations via Cholesky; falls back to an SVD solve when the Gram
/// matrix is ill-conditioned, and rejects rank-deficient designs.
fn solve_least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>, ArimaError> {
    let xtx = x.transpose() * x;
    let xty = x.transpose() * y;
    if let Some(chol) = xtx.clone().cholesky() {
        let beta = chol.solve(&xty);
        if beta.iter().all(|v| v.is_finite()) {
            // Accept only if the solution really solves the system.
            let back = &xtx * &beta;
            let err: f64 = (&back - &xty).norm();
            let scale = xty.norm().max(1.0);
            if err / scale < 1e-8 {
                return Ok(beta);
            }
        }
    }
    let svd = x.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let tol = max_sv * 1e-10 * x.nrows().max(x.ncols()) as f64;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < x.ncols() {
        return Err(ArimaError::SingularDesign);
    }
    svd.solve(y, tol).map_err(|_| ArimaError::SingularDesign)
}

/// Conditional sum of squares for ARMA(p, q): innovations are seeded with
/// zero and accumulated recursively; the first p steps are conditioning.
fn css_objective(w: &[f64], p: usize, q: usize, params: &[f64]) -> f64 {
    let c = params[0];
    let phi = &params[1..1 + p];
    let theta = &params[1 + p..1 + p + q];
    let n = w.len();
    let mut eps = vec![0.0; n];
    let mut sse = 0.0;
    for t in p..n {
        let mut pred = c;
        for (i, &ph) in phi.iter().enumerate() {
            pred += ph * w[t - 1 - i];
        }
        for (j, &th) in theta.iter().enumerate() {
            if t >= j + 1 {
                pred += th * eps[t - 1 - j];
            }
        }
        let e = w[t] - pred;
        eps[t] = e;
        sse += e * e;
        if !sse.is_finite() {
            return f64::MAX;
        }
    }
    sse
}

fn fit_css(
    w: &[f64],
    p: usize,
    q: usize,
) -> Result<(Vec<f64>, Vec<f64>, f64, f64, Vec<f64>), ArimaError> {
    // Start from the AR-only OLS solution when available.
    let mut start = vec![0.0; 1 + p + q];
    if p > 0 {
        if let Ok((phi, c, _, _)) = fit_ar_ols(w, p) {
            start[0] = c;
            start[1..1 + p].copy_from_slice(&phi);
        }
    } else {
        start[0] = w.iter().sum::<f64>() / w.len() as f64;
    }
    let dim = 1 + p + q;
    let objective = |params: &[f64]| css_objective(w, p, q, params);
    let rough = nelder_mead(&objective, &start, 0.1, 400 * dim * dim);
    let best = nelder_mead(&objective, &rough, 1e-4, 200 * dim * dim);

    let c = best[0];
    let phi = best[1..1 + p].to_vec();
    let theta = best[1 + p..1 + p + q].to_vec();
    let n = w.len();
    let mut eps = vec![0.0; n];
    for t in p..n {
        let mut pred = c;
        for (i, &ph) in phi.iter().enumerate() {
            pred += ph * w[t - 1 - i];
        }
        for (j, &th) in theta.iter().enumerate() {
            if t >= j + 1 {
                pred += th * eps[t - 1 - j];
            }
        }
        eps[t] = w[t] - pred;
    }
    let residuals = eps[p..].to_vec();
    let dof = (residuals.len() as f64 - dim as f64).max(1.0);
    let sigma2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof;
    Ok((phi, theta, c, sigma2, residuals))
}

/// Standard Nelder-Mead simplex minimization.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, start: &[f64], step: f64, max_iter: usize) -> Vec<f64> {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += if v[i].abs() > 1e-8 { step * v[i].abs() } else { step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iter {
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let ordered_vals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        simplex = ordered;
        values = ordered_vals;

        if (values[dim] - values[0]).abs() < 1e-14 * (1.0 + values[0].abs()) {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim).map(|j| 2.0 * centroid[j] - worst[j]).collect();
        let fr = f(&reflect);

        if fr < values[0] {
            let expand: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + 2.0 * (reflect[j] - centroid[j]))
                .collect();
            let fe = f(&expand);
            if fe < fr {
                simplex[dim] = expand;
                values[dim] = fe;
            } else {
                simplex[dim] = reflect;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = reflect;
            values[dim] = fr;
        } else {
            let contract: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + 0.5 * (worst[j] - centroid[j]))
                .collect();
            let fc = f(&contract);
            if fc < values[dim] {
                simplex[dim] = contract;
                values[dim] = fc;
            } else {
                for i in 1..=dim {
                    for j in 0..dim {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    simplex[best].clone()
}

/// All roots of `1 - sum phi_i z^i` outside the unit circle, checked via the
/// companion matrix eigenvalues (inverse roots strictly inside).
fn ar_is_stationary(phi: &[f64]) -> bool {
    let p = phi.len();
    if p == 0 {
        return true;
    }
    let mut companion = DMatrix::zeros(p, p);
    for (i, &v) in phi.iter().enumerate() {
        companion[(0, i)] = v;
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .all(|e| e.norm() < 1.0 - 1e-10)
}
