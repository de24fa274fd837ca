use serde::{Deserialize, Serialize};

use super::{NnError, Tensor};

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Dense-layer output activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => relu(x),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }
}

/// LSTM cell parameters: four gate matrices of shape
/// `(hidden, hidden + input)` acting on `[h_prev; x]`, and four bias
/// vectors of length `hidden`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub w_f: Tensor,
    pub w_i: Tensor,
    pub w_o: Tensor,
    pub w_s: Tensor,
    pub b_f: Tensor,
    pub b_i: Tensor,
    pub b_o: Tensor,
    pub b_s: Tensor,
}

impl LstmParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        let w = || Tensor::zeros(&[hidden, hidden + input]);
        let b = || Tensor::zeros(&[hidden]);
        Self {
            w_f: w(),
            w_i: w(),
            w_o: w(),
            w_s: w(),
            b_f: b(),
            b_i: b(),
            b_o: b(),
            b_s: b(),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_f.rows()
    }

    pub fn input(&self) -> usize {
        self.w_f.cols() - self.w_f.rows()
    }

    fn check(&self, h_prev: &[f64], s_prev: &[f64], x: &[f64]) -> Result<(), NnError> {
        let hidden = self.hidden();
        let input = self.input();
        if h_prev.len() != hidden || s_prev.len() != hidden || x.len() != input {
            return Err(NnError::DimensionMismatch(format!(
                "lstm cell ({hidden}, {input}) got h={}, s={}, x={}",
                h_prev.len(),
                s_prev.len(),
                x.len()
            )));
        }
        Ok(())
    }
}

/// One LSTM update:
///
/// ```text
/// f = sigmoid(W_f [h; x] + b_f)
/// i = sigmoid(W_i [h; x] + b_i)
/// o = sigmoid(W_o [h; x] + b_o)
/// s = f * s_prev + i * tanh(W_s [h; x] + b_s)
/// h = o * tanh(s)
/// ```
pub fn lstm_step(
    params: &LstmParams,
    h_prev: &[f64],
    s_prev: &[f64],
    x: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), NnError> {
    params.check(h_prev, s_prev, x)?;
    let hidden = params.hidden();
    let mut hx = Vec::with_capacity(h_prev.len() + x.len());
    hx.extend_from_slice(h_prev);
    hx.extend_from_slice(x);

    let gate = |w: &Tensor, b: &Tensor| -> Vec<f64> {
        w.matvec(&hx)
            .iter()
            .zip(b.data())
            .map(|(v, b)| sigmoid(v + b))
            .collect()
    };
    let f = gate(&params.w_f, &params.b_f);
    let i = gate(&params.w_i, &params.b_i);
    let o = gate(&params.w_o, &params.b_o);
    let g: Vec<f64> = params
        .w_s
        .matvec(&hx)
        .iter()
        .zip(params.b_s.data())
        .map(|(v, b)| (v + b).tanh())
        .collect();

    let mut s = vec![0.0; hidden];
    let mut h = vec![0.0; hidden];
    for k in 0..hidden {
        s[k] = f[k] * s_prev[k] + i[k] * g[k];
        h[k] = o[k] * s[k].tanh();
    }
    Ok((h, s))
}

/// Simple-RNN cell parameters. The bias is optional: the plain formulation
/// `h = tanh(W_hh h_prev + W_xh x)` has none, and it can be disabled to
/// match that form exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnParams {
    pub w_hh: Tensor,
    pub w_xh: Tensor,
    pub bias: Option<Tensor>,
}

impl RnnParams {
    pub fn zeros(hidden: usize, input: usize, with_bias: bool) -> Self {
        Self {
            w_hh: Tensor::zeros(&[hidden, hidden]),
            w_xh: Tensor::zeros(&[hidden, input]),
            bias: with_bias.then(|| Tensor::zeros(&[hidden])),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_hh.rows()
    }

    pub fn input(&self) -> usize {
        self.w_xh.cols()
    }
}

/// Simple-RNN update `h = tanh(W_hh h_prev + W_xh x + bias)`.
pub fn rnn_step(params: &RnnParams, h_prev: &[f64], x: &[f64]) -> Result<Vec<f64>, NnError> {
    if h_prev.len() != params.hidden() || x.len() != params.input() {
        return Err(NnError::DimensionMismatch(format!(
            "rnn cell ({}, {}) got h={}, x={}",
            params.hidden(),
            params.input(),
            h_prev.len(),
            x.len()
        )));
    }
    let hh = params.w_hh.matvec(h_prev);
    let xh = params.w_xh.matvec(x);
    let mut out = vec![0.0; params.hidden()];
    for k in 0..out.len() {
        let b = params.bias.as_ref().map_or(0.0, |b| b.data()[k]);
        out[k] = (hh[k] + xh[k] + b).tanh();
    }
    Ok(out)
}

/// Dense layer `activation(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    pub w: Tensor,
    pub b: Tensor,
    pub activation: Activation,
}

impl DenseParams {
    pub fn zeros(out: usize, input: usize, activation: Activation) -> Self {
        Self {
            w: Tensor::zeros(&[out, input]),
            b: Tensor::zeros(&[out]),
            activation,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        if x.len() != self.w.cols() {
            return Err(NnError::DimensionMismatch(format!(
                "dense ({}, {}) got x={}",
                self.w.rows(),
                self.w.cols(),
                x.len()
            )));
        }
        Ok(self
            .w
            .matvec(x)
            .iter()
            .zip(self.b.data())
            .map(|(v, b)| self.activation.apply(v + b))
            .collect())
    }
}

/// Numerically stable softmax: the maximum is subtracted before
/// exponentiation, so the result is invariant under additive shifts.
pub fn softmax(scores: &[f64]) -> Result<Vec<f64>, NnError> {
    if scores.is_empty() {
        return Err(NnError::EmptyInput);
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.iter().map(|e| e / sum).collect())
}
