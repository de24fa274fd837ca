use crate::data::Matrix;
use crate::nn::{lstm_step, rnn_step, softmax, Activation, LstmNodeIds, NodeId, Tape, Tensor};

use super::{ArnnError, ArnnWeights};

impl ArnnWeights {
    fn check_window(&self, x: &Matrix, z: &Matrix) -> Result<(), ArnnError> {
        let t = self.arch.window;
        if x.rows() != t || x.cols() != self.arch.n_features {
            return Err(ArnnError::ShapeMismatch(format!(
                "encoder window must be ({t}, {}), got ({}, {})",
                self.arch.n_features,
                x.rows(),
                x.cols()
            )));
        }
        if z.rows() != t || z.cols() != self.arch.n_exo {
            return Err(ArnnError::ShapeMismatch(format!(
                "decoder window must be ({t}, {}), got ({}, {})",
                self.arch.n_exo,
                z.rows(),
                z.cols()
            )));
        }
        Ok(())
    }

    /// Runs the stacked simple-RNN encoder over a `(T, n_features)` window
    /// and projects each step to `(T, step_feature_dim)`.
    pub fn encode(&self, x_window: &Matrix) -> Result<Matrix, ArnnError> {
        if x_window.rows() != self.arch.window || x_window.cols() != self.arch.n_features {
            return Err(ArnnError::ShapeMismatch(format!(
                "encoder window must be ({}, {}), got ({}, {})",
                self.arch.window,
                self.arch.n_features,
                x_window.rows(),
                x_window.cols()
            )));
        }
        let t_len = self.arch.window;
        let mut states: Vec<Vec<f64>> = self.encoder.iter().map(|l| vec![0.0; l.hidden()]).collect();
        let mut out = Matrix::zeros(t_len, self.arch.step_feature_dim);
        for t in 0..t_len {
            let mut input = x_window.row(t).to_vec();
            for (layer, state) in self.encoder.iter().zip(states.iter_mut()) {
                *state = rnn_step(layer, state, &input)?;
                input = state.clone();
            }
            let projected = self.encoder_proj.apply(&input)?;
            for (j, v) in projected.iter().enumerate() {
                out[(t, j)] = *v;
            }
        }
        Ok(out)
    }

    /// Runs the stacked LSTM decoder over a `(T, n_exo)` window and projects
    /// each step to `(T, step_feature_dim)`.
    pub fn decode(&self, z_window: &Matrix) -> Result<Matrix, ArnnError> {
        if z_window.rows() != self.arch.window || z_window.cols() != self.arch.n_exo {
            return Err(ArnnError::ShapeMismatch(format!(
                "decoder window must be ({}, {}), got ({}, {})",
                self.arch.window,
                self.arch.n_exo,
                z_window.rows(),
                z_window.cols()
            )));
        }
        let t_len = self.arch.window;
        let mut h: Vec<Vec<f64>> = self.decoder.iter().map(|l| vec![0.0; l.hidden()]).collect();
        let mut s: Vec<Vec<f64>> = h.clone();
        let mut out = Matrix::zeros(t_len, self.arch.step_feature_dim);
        for t in 0..t_len {
            let mut input = z_window.row(t).to_vec();
            for (k, layer) in self.decoder.iter().enumerate() {
                let (h_new, s_new) = lstm_step(layer, &h[k], &s[k], &input)?;
                input = h_new.clone();
                h[k] = h_new;
                s[k] = s_new;
            }
            let projected = self.decoder_proj.apply(&input)?;
            for (j, v) in projected.iter().enumerate() {
                out[(t, j)] = *v;
            }
        }
        Ok(out)
    }

    /// Full forward pass to the scalar prediction (normalized units).
    pub fn predict(&self, x_window: &Matrix, z_window: &Matrix) -> Result<f64, ArnnError> {
        self.check_window(x_window, z_window)?;
        let enc = self.encode(x_window)?;
        let dec = self.decode(z_window)?;
        let (fused, _alpha) = attend(&enc, &dec)?;
        let t_len = self.arch.window;
        let mut h = vec![0.0; self.head_lstm.hidden()];
        let mut s = h.clone();
        for t in 0..t_len {
            let (h2, s2) = lstm_step(&self.head_lstm, &h, &s, fused.row(t))?;
            h = h2;
            s = s2;
        }
        let mut v = h;
        for layer in &self.head_dense {
            v = layer.apply(&v)?;
        }
        debug_assert_eq!(v.len(), 1);
        Ok(v[0])
    }
}

/// Dot-product attention fusing decoder states with encoder states.
///
/// For each decoder step `i`: scores `e_ij = <dec_i, enc_j>`, weights
/// `alpha_i = softmax(e_i.)`, context `c_i = sum_j alpha_ij enc_j`, fused
/// output `s_i = dec_i * c_i` (elementwise). Returns `(fused, alpha)`
/// where `alpha` is the `(T, T)` attention matrix, one probability row per
/// decoder step.
pub fn attend(encoder_states: &Matrix, decoder_states: &Matrix) -> Result<(Matrix, Matrix), ArnnError> {
    if encoder_states.cols() != decoder_states.cols()
        || encoder_states.rows() != decoder_states.rows()
    {
        return Err(ArnnError::ShapeMismatch(format!(
            "attention needs equal (T, d) shapes, got ({}, {}) vs ({}, {})",
            encoder_states.rows(),
            encoder_states.cols(),
            decoder_states.rows(),
            decoder_states.cols()
        )));
    }
    let t_len = encoder_states.rows();
    let dim = encoder_states.cols();
    let mut fused = Matrix::zeros(t_len, dim);
    let mut alpha = Matrix::zeros(t_len, t_len);
    for i in 0..t_len {
        let dec_i = decoder_states.row(i);
        let scores: Vec<f64> = (0..t_len)
            .map(|j| {
                encoder_states
                    .row(j)
                    .iter()
                    .zip(dec_i)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        let weights = softmax(&scores)?;
        for (j, w) in weights.iter().enumerate() {
            alpha[(i, j)] = *w;
            for k in 0..dim {
                fused[(i, k)] += w * encoder_states[(j, k)];
            }
        }
        for k in 0..dim {
            fused[(i, k)] *= dec_i[k]; // elementwise fusion with the context
        }
    }
    Ok((fused, alpha))
}

/// Tape-node handles for every parameter, aligned with
/// [`ArnnWeights::named_tensors`] order.
pub(crate) struct ArnnNodeIds {
    enc: Vec<(NodeId, NodeId, Option<NodeId>)>, // (w_xh, w_hh, bias)
    enc_proj: (NodeId, NodeId),
    dec: Vec<LstmNodeIds>,
    dec_proj: (NodeId, NodeId),
    head_lstm: LstmNodeIds,
    head_dense: Vec<(NodeId, NodeId)>,
}

impl ArnnWeights {
    /// Splits the flat parameter-leaf list (in `named_tensors` order) into
    /// structured handles.
    pub(crate) fn node_ids(&self, flat: &[NodeId]) -> ArnnNodeIds {
        let mut it = flat.iter().copied();
        let mut next = || it.next().expect("parameter leaf list too short");
        let mut enc = Vec::new();
        for layer in &self.encoder {
            let w_xh = next();
            let w_hh = next();
            let bias = layer.bias.as_ref().map(|_| next());
            enc.push((w_xh, w_hh, bias));
        }
        let enc_proj = (next(), next());
        let mut dec = Vec::new();
        for _ in &self.decoder {
            dec.push(LstmNodeIds {
                w_f: next(),
                w_i: next(),
                w_o: next(),
                w_s: next(),
                b_f: next(),
                b_i: next(),
                b_o: next(),
                b_s: next(),
            });
        }
        let dec_proj = (next(), next());
        let head_lstm = LstmNodeIds {
            w_f: next(),
            w_i: next(),
            w_o: next(),
            w_s: next(),
            b_f: next(),
            b_i: next(),
            b_o: next(),
            b_s: next(),
        };
        let mut head_dense = Vec::new();
        for _ in &self.head_dense {
            head_dense.push((next(), next()));
        }
        assert!(it.next().is_none(), "parameter leaf list too long");
        ArnnNodeIds {
            enc,
            enc_proj,
            dec,
            dec_proj,
            head_lstm,
            head_dense,
        }
    }

    /// Builds the prediction subgraph for one `(x, z)` window on the tape.
    pub(crate) fn build_prediction(
        &self,
        tape: &mut Tape,
        ids: &ArnnNodeIds,
        x_window: &Matrix,
        z_window: &Matrix,
    ) -> NodeId {
        let t_len = self.arch.window;
        let d = self.arch.step_feature_dim;

        // Encoder.
        let mut enc_states: Vec<NodeId> = Vec::with_capacity(t_len);
        let mut hidden: Vec<NodeId> = self
            .encoder
            .iter()
            .map(|l| tape.leaf(Tensor::zeros(&[l.hidden()])))
            .collect();
        for t in 0..t_len {
            let mut input = tape.leaf(Tensor::vector(x_window.row(t).to_vec()));
            for (k, &(w_xh, w_hh, bias)) in ids.enc.iter().enumerate() {
                let h = tape.rnn_cell(w_hh, w_xh, bias, hidden[k], input);
                hidden[k] = h;
                input = h;
            }
            let proj = tape.dense(ids.enc_proj.0, ids.enc_proj.1, input, Activation::Relu);
            enc_states.push(proj);
        }

        // Decoder.
        let mut dec_states: Vec<NodeId> = Vec::with_capacity(t_len);
        let mut h: Vec<NodeId> = self
            .decoder
            .iter()
            .map(|l| tape.leaf(Tensor::zeros(&[l.hidden()])))
            .collect();
        let mut s: Vec<NodeId> = h.clone();
        for t in 0..t_len {
            let mut input = tape.leaf(Tensor::vector(z_window.row(t).to_vec()));
            for (k, lstm_ids) in ids.dec.iter().enumerate() {
                let (h2, s2) = tape.lstm_cell(lstm_ids, h[k], s[k], input);
                h[k] = h2;
                s[k] = s2;
                input = h2;
            }
            let proj = tape.dense(ids.dec_proj.0, ids.dec_proj.1, input, Activation::Relu);
            dec_states.push(proj);
        }

        // Attention: scores, softmax row, context, elementwise fusion.
        let mut fused: Vec<NodeId> = Vec::with_capacity(t_len);
        for i in 0..t_len {
            let scores: Vec<NodeId> = (0..t_len)
                .map(|j| tape.dot(dec_states[i], enc_states[j]))
                .collect();
            let stacked = tape.stack(scores);
            let weights = tape.softmax(stacked);
            let context = tape.weighted_sum(weights, enc_states.clone());
            fused.push(tape.mul(dec_states[i], context));
        }
        let _ = d;

        // Head LSTM over the fused sequence, final state only.
        let mut hh = tape.leaf(Tensor::zeros(&[self.head_lstm.hidden()]));
        let mut ss = tape.leaf(Tensor::zeros(&[self.head_lstm.hidden()]));
        for &step in &fused {
            let (h2, s2) = tape.lstm_cell(&ids.head_lstm, hh, ss, step);
            hh = h2;
            ss = s2;
        }
        let mut out = hh;
        for (k, &(w, b)) in ids.head_dense.iter().enumerate() {
            out = tape.dense(w, b, out, self.head_dense[k].activation);
        }
        out
    }
}
