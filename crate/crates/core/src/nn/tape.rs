use super::{softmax, Tensor};

pub type NodeId = usize;

/// Recorded operation. Values are tensors; activations are rank-1, weight
/// leaves rank-2, scalars length-1 vectors.
#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatVec { w: NodeId, x: NodeId },
    Add { a: NodeId, b: NodeId },
    Mul { a: NodeId, b: NodeId },
    Sigmoid { x: NodeId },
    Tanh { x: NodeId },
    Relu { x: NodeId },
    Concat { a: NodeId, b: NodeId },
    Dot { a: NodeId, b: NodeId },
    Softmax { x: NodeId },
    /// Scalars stacked into a vector.
    Stack { xs: Vec<NodeId> },
    /// `sum_j weights[j] * vectors[j]` with a vector of weights.
    WeightedSum { weights: NodeId, vectors: Vec<NodeId> },
    Scale { x: NodeId, c: f64 },
    SumScalars { xs: Vec<NodeId> },
    /// `(x - target)^2` of a scalar node against a constant target.
    SqDiff { x: NodeId, target: f64 },
}

struct Node {
    op: Op,
    value: Tensor,
}

/// Parameter node bundle for one LSTM cell on the tape.
#[derive(Debug, Clone, Copy)]
pub struct LstmNodeIds {
    pub w_f: NodeId,
    pub w_i: NodeId,
    pub w_o: NodeId,
    pub w_s: NodeId,
    pub b_f: NodeId,
    pub b_i: NodeId,
    pub b_o: NodeId,
    pub b_s: NodeId,
}

/// Reverse-mode gradient tape over tensor-valued nodes.
///
/// A batch loss is built as one graph (parameter leaves shared across
/// samples); `backward` then produces exact gradients for every node in a
/// single reverse sweep, accumulated in fixed node order so training is
/// bit-deterministic.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id].value
    }

    /// Scalar value of a length-1 node.
    pub fn scalar_value(&self, id: NodeId) -> f64 {
        debug_assert_eq!(self.nodes[id].value.len(), 1);
        self.nodes[id].value.data()[0]
    }

    fn push(&mut self, op: Op, value: Tensor) -> NodeId {
        self.nodes.push(Node { op, value });
        self.nodes.len() - 1
    }

    /// Registers an input or parameter tensor as a leaf.
    pub fn leaf(&mut self, value: Tensor) -> NodeId {
        self.push(Op::Leaf, value)
    }

    pub fn matvec(&mut self, w: NodeId, x: NodeId) -> NodeId {
        let value = Tensor::vector(self.nodes[w].value.matvec(self.nodes[x].value.data()));
        self.push(Op::MatVec { w, x }, value)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (&self.nodes[a].value, &self.nodes[b].value);
        assert_eq!(va.len(), vb.len(), "add: length mismatch");
        let out: Vec<f64> = va.data().iter().zip(vb.data()).map(|(x, y)| x + y).collect();
        self.push(Op::Add { a, b }, Tensor::vector(out))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (&self.nodes[a].value, &self.nodes[b].value);
        assert_eq!(va.len(), vb.len(), "mul: length mismatch");
        let out: Vec<f64> = va.data().iter().zip(vb.data()).map(|(x, y)| x * y).collect();
        self.push(Op::Mul { a, b }, Tensor::vector(out))
    }

    pub fn sigmoid(&mut self, x: NodeId) -> NodeId {
        let out: Vec<f64> = self.nodes[x].value.data().iter().map(|&v| super::sigmoid(v)).collect();
        self.push(Op::Sigmoid { x }, Tensor::vector(out))
    }

    pub fn tanh(&mut self, x: NodeId) -> NodeId {
        let out: Vec<f64> = self.nodes[x].value.data().iter().map(|v| v.tanh()).collect();
        self.push(Op::Tanh { x }, Tensor::vector(out))
    }

    pub fn relu(&mut self, x: NodeId) -> NodeId {
        let out: Vec<f64> = self.nodes[x].value.data().iter().map(|&v| super::relu(v)).collect();
        self.push(Op::Relu { x }, Tensor::vector(out))
    }

    pub fn concat(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let mut out = self.nodes[a].value.data().to_vec();
        out.extend_from_slice(self.nodes[b].value.data());
        self.push(Op::Concat { a, b }, Tensor::vector(out))
    }

    pub fn dot(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (&self.nodes[a].value, &self.nodes[b].value);
        assert_eq!(va.len(), vb.len(), "dot: length mismatch");
        let out: f64 = va.data().iter().zip(vb.data()).map(|(x, y)| x * y).sum();
        self.push(Op::Dot { a, b }, Tensor::scalar(out))
    }

    pub fn softmax(&mut self, x: NodeId) -> NodeId {
        let out = softmax(self.nodes[x].value.data()).expect("non-empty softmax input");
        self.push(Op::Softmax { x }, Tensor::vector(out))
    }

    pub fn stack(&mut self, xs: Vec<NodeId>) -> NodeId {
        let out: Vec<f64> = xs.iter().map(|&id| self.scalar_value(id)).collect();
        self.push(Op::Stack { xs }, Tensor::vector(out))
    }

    pub fn weighted_sum(&mut self, weights: NodeId, vectors: Vec<NodeId>) -> NodeId {
        let w = self.nodes[weights].value.data();
        assert_eq!(w.len(), vectors.len(), "weighted_sum: arity mismatch");
        let dim = self.nodes[vectors[0]].value.len();
        let mut out = vec![0.0; dim];
        for (j, &vid) in vectors.iter().enumerate() {
            let v = self.nodes[vid].value.data();
            assert_eq!(v.len(), dim, "weighted_sum: vector length mismatch");
            for k in 0..dim {
                out[k] += w[j] * v[k];
            }
        }
        self.push(Op::WeightedSum { weights, vectors }, Tensor::vector(out))
    }

    pub fn scale(&mut self, x: NodeId, c: f64) -> NodeId {
        let out: Vec<f64> = self.nodes[x].value.data().iter().map(|v| c * v).collect();
        self.push(Op::Scale { x, c }, Tensor::vector(out))
    }

    pub fn sum_scalars(&mut self, xs: Vec<NodeId>) -> NodeId {
        let out: f64 = xs.iter().map(|&id| self.scalar_value(id)).sum();
        self.push(Op::SumScalars { xs }, Tensor::scalar(out))
    }

    pub fn sq_diff(&mut self, x: NodeId, target: f64) -> NodeId {
        let v = self.scalar_value(x) - target;
        self.push(Op::SqDiff { x, target }, Tensor::scalar(v * v))
    }

    /// `activation(W x + b)` as tape ops.
    pub fn dense(
        &mut self,
        w: NodeId,
        b: NodeId,
        x: NodeId,
        activation: super::Activation,
    ) -> NodeId {
        let wx = self.matvec(w, x);
        let pre = self.add(wx, b);
        match activation {
            super::Activation::Relu => self.relu(pre),
            super::Activation::Tanh => self.tanh(pre),
            super::Activation::Identity => pre,
        }
    }

    /// Simple-RNN cell `tanh(W_hh h + W_xh x (+ bias))` as tape ops.
    pub fn rnn_cell(
        &mut self,
        w_hh: NodeId,
        w_xh: NodeId,
        bias: Option<NodeId>,
        h_prev: NodeId,
        x: NodeId,
    ) -> NodeId {
        let hh = self.matvec(w_hh, h_prev);
        let xh = self.matvec(w_xh, x);
        let mut pre = self.add(hh, xh);
        if let Some(b) = bias {
            pre = self.add(pre, b);
        }
        self.tanh(pre)
    }

    /// LSTM cell as tape ops; returns (h, s).
    pub fn lstm_cell(
        &mut self,
        p: &LstmNodeIds,
        h_prev: NodeId,
        s_prev: NodeId,
        x: NodeId,
    ) -> (NodeId, NodeId) {
        let hx = self.concat(h_prev, x);
        let gate = |tape: &mut Self, w: NodeId, b: NodeId| {
            let wv = tape.matvec(w, hx);
            let pre = tape.add(wv, b);
            tape.sigmoid(pre)
        };
        let f = gate(self, p.w_f, p.b_f);
        let i = gate(self, p.w_i, p.b_i);
        let o = gate(self, p.w_o, p.b_o);
        let gs = self.matvec(p.w_s, hx);
        let gs = self.add(gs, p.b_s);
        let g = self.tanh(gs);
        let carried = self.mul(f, s_prev);
        let injected = self.mul(i, g);
        let s = self.add(carried, injected);
        let s_t = self.tanh(s);
        let h = self.mul(o, s_t);
        (h, s)
    }

    /// Reverse sweep from a scalar root; returns per-node gradients.
    pub fn backward(&self, root: NodeId) -> Gradients {
        assert_eq!(self.nodes[root].value.len(), 1, "root must be scalar");
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        grads[root] = Some(vec![1.0]);

        for id in (0..=root).rev() {
            let Some(g) = grads[id].clone() else { continue };
            match &self.nodes[id].op {
                Op::Leaf => {}
                Op::MatVec { w, x } => {
                    let wt = &self.nodes[*w].value;
                    let xv = self.nodes[*x].value.data();
                    let (r, c) = (wt.rows(), wt.cols());
                    {
                        let gw = Self::slot(&mut grads, *w, r * c);
                        for i in 0..r {
                            for j in 0..c {
                                gw[i * c + j] += g[i] * xv[j];
                            }
                        }
                    }
                    let wd = wt.data();
                    let gx = Self::slot(&mut grads, *x, c);
                    for j in 0..c {
                        let mut acc = 0.0;
                        for i in 0..r {
                            acc += wd[i * c + j] * g[i];
                        }
                        gx[j] += acc;
                    }
                }
                Op::Add { a, b } => {
                    for &p in [a, b].iter() {
                        let gp = Self::slot(&mut grads, *p, g.len());
                        for (o, v) in gp.iter_mut().zip(&g) {
                            *o += v;
                        }
                    }
                }
                Op::Mul { a, b } => {
                    let av = self.nodes[*a].value.data().to_vec();
                    let bv = self.nodes[*b].value.data().to_vec();
                    {
                        let ga = Self::slot(&mut grads, *a, g.len());
                        for k in 0..g.len() {
                            ga[k] += g[k] * bv[k];
                        }
                    }
                    let gb = Self::slot(&mut grads, *b, g.len());
                    for k in 0..g.len() {
                        gb[k] += g[k] * av[k];
                    }
                }
                Op::Sigmoid { x } => {
                    let y = self.nodes[id].value.data();
                    let gx = Self::slot(&mut grads, *x, g.len());
                    for k in 0..g.len() {
                        gx[k] += g[k] * y[k] * (1.0 - y[k]);
                    }
                }
                Op::Tanh { x } => {
                    let y = self.nodes[id].value.data();
                    let gx = Self::slot(&mut grads, *x, g.len());
                    for k in 0..g.len() {
                        gx[k] += g[k] * (1.0 - y[k] * y[k]);
                    }
                }
                Op::Relu { x } => {
                    // Gradient at the kink (input exactly 0) is defined as 0.
                    let xv = self.nodes[*x].value.data();
                    let gx = Self::slot(&mut grads, *x, g.len());
                    for k in 0..g.len() {
                        if xv[k] > 0.0 {
                            gx[k] += g[k];
                        }
                    }
                }
                Op::Concat { a, b } => {
                    let na = self.nodes[*a].value.len();
                    {
                        let ga = Self::slot(&mut grads, *a, na);
                        for k in 0..na {
                            ga[k] += g[k];
                        }
                    }
                    let nb = self.nodes[*b].value.len();
                    let gb = Self::slot(&mut grads, *b, nb);
                    for k in 0..nb {
                        gb[k] += g[na + k];
                    }
                }
                Op::Dot { a, b } => {
                    let av = self.nodes[*a].value.data().to_vec();
                    let bv = self.nodes[*b].value.data().to_vec();
                    {
                        let ga = Self::slot(&mut grads, *a, av.len());
                        for k in 0..av.len() {
                            ga[k] += g[0] * bv[k];
                        }
                    }
                    let gb = Self::slot(&mut grads, *b, bv.len());
                    for k in 0..bv.len() {
                        gb[k] += g[0] * av[k];
                    }
                }
                Op::Softmax { x } => {
                    // dL/dx = s * (g - <g, s>)
                    let s = self.nodes[id].value.data();
                    let inner: f64 = g.iter().zip(s).map(|(gv, sv)| gv * sv).sum();
                    let gx = Self::slot(&mut grads, *x, g.len());
                    for k in 0..g.len() {
                        gx[k] += s[k] * (g[k] - inner);
                    }
                }
                Op::Stack { xs } => {
                    for (j, &xid) in xs.iter().enumerate() {
                        let gx = Self::slot(&mut grads, xid, 1);
                        gx[0] += g[j];
                    }
                }
                Op::WeightedSum { weights, vectors } => {
                    let w = self.nodes[*weights].value.data().to_vec();
                    {
                        let gw = Self::slot(&mut grads, *weights, w.len());
                        for (j, &vid) in vectors.iter().enumerate() {
                            let v = self.nodes[vid].value.data();
                            let mut acc = 0.0;
                            for k in 0..g.len() {
                                acc += g[k] * v[k];
                            }
                            gw[j] += acc;
                        }
                    }
                    for (j, &vid) in vectors.iter().enumerate() {
                        let gv = Self::slot(&mut grads, vid, g.len());
                        for k in 0..g.len() {
                            gv[k] += w[j] * g[k];
                        }
                    }
                }
                Op::Scale { x, c } => {
                    let gx = Self::slot(&mut grads, *x, g.len());
                    for k in 0..g.len() {
                        gx[k] += c * g[k];
                    }
                }
                Op::SumScalars { xs } => {
                    for &xid in xs {
                        let gx = Self::slot(&mut grads, xid, 1);
                        gx[0] += g[0];
                    }
                }
                Op::SqDiff { x, target } => {
                    let v = self.nodes[*x].value.data()[0];
                    let gx = Self::slot(&mut grads, *x, 1);
                    gx[0] += g[0] * 2.0 * (v - target);
                }
            }
        }
        Gradients { grads }
    }

    fn slot(grads: &mut [Option<Vec<f64>>], id: NodeId, len: usize) -> &mut Vec<f64> {
        let entry = &mut grads[id];
        if entry.is_none() {
            *entry = Some(vec![0.0; len]);
        }
        entry.as_mut().expect("just initialized")
    }
}

/// Per-node gradients from one reverse sweep.
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    /// Gradient of the root with respect to node `id`; zeros if the node
    /// does not influence the root.
    pub fn get(&self, id: NodeId, len: usize) -> Vec<f64> {
        self.grads
            .get(id)
            .and_then(|g| g.clone())
            .unwrap_or_else(|| vec![0.0; len])
    }
}
