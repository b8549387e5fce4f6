use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::CnnError;

/// Channel-major activation shape. Flat vectors are `(n, 1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub const fn new(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
        }
    }

    pub const fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    const fn is_flat(&self) -> bool {
        self.height == 1 && self.width == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv {
        kernel: usize,
        filters: usize,
        stride: usize,
        pad: usize,
    },
    Relu,
    MaxPool {
        size: usize,
    },
    Flatten,
    FullyConnected {
        outputs: usize,
    },
    Softmax,
}

/// Layer stack plus the input shape it expects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input: Shape,
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    /// Conv(3x3, 8) -> ReLU -> MaxPool(2) -> Conv(3x3, 16) -> ReLU -> MaxPool(2)
    /// -> Flatten -> FullyConnected(n_classes) -> Softmax.
    pub fn desk_default(input: Shape, n_classes: usize) -> Self {
        use LayerSpec::*;
        Self {
            input,
            layers: vec![
                Conv {
                    kernel: 3,
                    filters: 8,
                    stride: 1,
                    pad: 1,
                },
                Relu,
                MaxPool { size: 2 },
                Conv {
                    kernel: 3,
                    filters: 16,
                    stride: 1,
                    pad: 1,
                },
                Relu,
                MaxPool { size: 2 },
                Flatten,
                FullyConnected { outputs: n_classes },
                Softmax,
            ],
        }
    }

    /// Shape after every layer, starting with the input. Fails when the
    /// stack does not chain or does not end in a single trailing softmax.
    pub fn shapes(&self) -> Result<Vec<Shape>, CnnError> {
        if self.input.is_empty() {
            return Err(CnnError::InvalidSpec("input shape must be positive".into()));
        }
        let mut shapes = vec![self.input];
        let mut cur = self.input;
        for (i, layer) in self.layers.iter().enumerate() {
            let last = i + 1 == self.layers.len();
            cur = match *layer {
                LayerSpec::Conv {
                    kernel,
                    filters,
                    stride,
                    pad,
                } => {
                    if kernel == 0 || filters == 0 || stride == 0 {
                        return Err(CnnError::InvalidSpec(format!("layer {i}: zero conv parameter")));
                    }
                    if cur.is_flat() && cur.channels > 1 && kernel > 1 {
                        return Err(CnnError::InvalidSpec(format!("layer {i}: conv on flat input")));
                    }
                    let hp = cur.height + 2 * pad;
                    let wp = cur.width + 2 * pad;
                    if hp < kernel || wp < kernel {
                        return Err(CnnError::InvalidSpec(format!("layer {i}: kernel larger than input")));
                    }
                    Shape::new(filters, (hp - kernel) / stride + 1, (wp - kernel) / stride + 1)
                }
                LayerSpec::Relu => cur,
                LayerSpec::MaxPool { size } => {
                    if size == 0 || cur.height < size || cur.width < size {
                        return Err(CnnError::InvalidSpec(format!("layer {i}: pool window does not fit")));
                    }
                    Shape::new(cur.channels, cur.height / size, cur.width / size)
                }
                LayerSpec::Flatten => Shape::new(cur.len(), 1, 1),
                LayerSpec::FullyConnected { outputs } => {
                    if !cur.is_flat() {
                        return Err(CnnError::InvalidSpec(format!(
                            "layer {i}: fully connected layer needs flattened input"
                        )));
                    }
                    if outputs == 0 {
                        return Err(CnnError::InvalidSpec(format!("layer {i}: zero outputs")));
                    }
                    Shape::new(outputs, 1, 1)
                }
                LayerSpec::Softmax => {
                    if !last {
                        return Err(CnnError::InvalidSpec("softmax must be the last layer".into()));
                    }
                    if !cur.is_flat() {
                        return Err(CnnError::InvalidSpec("softmax needs flattened input".into()));
                    }
                    cur
                }
            };
            shapes.push(cur);
        }
        if self.layers.last() != Some(&LayerSpec::Softmax) {
            return Err(CnnError::InvalidSpec("network must end with softmax".into()));
        }
        Ok(shapes)
    }

    pub fn n_classes(&self) -> Result<usize, CnnError> {
        Ok(self.shapes()?.last().map(|s| s.channels).unwrap_or(0))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Conv2d {
    input: Shape,
    output: Shape,
    kernel: usize,
    stride: usize,
    pad: usize,
    /// `[filters][in_channels][kernel][kernel]`
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct Dense {
    inputs: usize,
    outputs: usize,
    /// `[outputs][inputs]`
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Layer {
    Conv(Conv2d),
    Relu,
    MaxPool { size: usize, input: Shape, output: Shape },
    Flatten,
    Dense(Dense),
    Softmax,
}

/// Per-parameter-tensor gradient buffers, aligned with [`Network::parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub tensors: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(network: &Network) -> Self {
        Self {
            tensors: network.parameters().iter().map(|p| vec![0.0; p.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.tensors.iter_mut().zip(&other.tensors) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in &mut self.tensors {
            for x in t.iter_mut() {
                *x *= factor;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Activations recorded during a forward pass for backpropagation.
struct Trace {
    /// `acts[0]` is the input, `acts[i + 1]` the output of layer `i`.
    acts: Vec<Vec<f64>>,
    pool_argmax: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    spec: NetworkSpec,
    layers: Vec<Layer>,
}

impl Network {
    /// Builds a network with He-style fan-in-scaled Gaussian weights and zero biases.
    pub fn init(spec: &NetworkSpec, seed: u64) -> Result<Self, CnnError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::build(spec, |fan_in, n| {
            let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("positive std");
            (0..n).map(|_| normal.sample(&mut rng)).collect()
        })
    }

    /// Builds a network whose parameters are all zero.
    pub fn zeros(spec: &NetworkSpec) -> Result<Self, CnnError> {
        Self::build(spec, |_, n| vec![0.0; n])
    }

    fn build(
        spec: &NetworkSpec,
        mut weights: impl FnMut(usize, usize) -> Vec<f64>,
    ) -> Result<Self, CnnError> {
        let shapes = spec.shapes()?;
        let layers = spec
            .layers
            .iter()
            .enumerate()
            .map(|(i, layer)| {
                let (input, output) = (shapes[i], shapes[i + 1]);
                match *layer {
                    LayerSpec::Conv {
                        kernel,
                        filters,
                        stride,
                        pad,
                    } => {
                        let fan_in = input.channels * kernel * kernel;
                        Layer::Conv(Conv2d {
                            input,
                            output,
                            kernel,
                            stride,
                            pad,
                            weights: weights(fan_in, filters * fan_in),
                            bias: vec![0.0; filters],
                        })
                    }
                    LayerSpec::Relu => Layer::Relu,
                    LayerSpec::MaxPool { size } => Layer::MaxPool {
                        size,
                        input,
                        output,
                    },
                    LayerSpec::Flatten => Layer::Flatten,
                    LayerSpec::FullyConnected { outputs } => Layer::Dense(Dense {
                        inputs: input.len(),
                        outputs,
                        weights: weights(input.len(), outputs * input.len()),
                        bias: vec![0.0; outputs],
                    }),
                    LayerSpec::Softmax => Layer::Softmax,
                }
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            layers,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn input_shape(&self) -> Shape {
        self.spec.input
    }

    pub fn n_classes(&self) -> usize {
        self.layers
            .iter()
            .rev()
            .find_map(|l| match l {
                Layer::Dense(d) => Some(d.outputs),
                _ => None,
            })
            .unwrap_or_else(|| self.spec.input.len())
    }

    /// Parameter tensors in layer order: weights then bias for every trainable layer.
    pub fn parameters(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for layer in &self.layers {
            match layer {
                Layer::Conv(c) => {
                    out.push(c.weights.as_slice());
                    out.push(c.bias.as_slice());
                }
                Layer::Dense(d) => {
                    out.push(d.weights.as_slice());
                    out.push(d.bias.as_slice());
                }
                _ => {}
            }
        }
        out
    }

    pub fn parameters_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            match layer {
                Layer::Conv(c) => {
                    out.push(&mut c.weights);
                    out.push(&mut c.bias);
                }
                Layer::Dense(d) => {
                    out.push(&mut d.weights);
                    out.push(&mut d.bias);
                }
                _ => {}
            }
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.parameters().iter().map(|p| p.len()).sum()
    }

    /// Plain SGD step: `theta -= learning_rate * grad`.
    pub fn apply_gradients(&mut self, grads: &Gradients, learning_rate: f64) {
        for (param, grad) in self.parameters_mut().into_iter().zip(&grads.tensors) {
            for (p, g) in param.iter_mut().zip(grad) {
                *p -= learning_rate * g;
            }
        }
    }

    fn check_input(&self, input: &[f64]) -> Result<(), CnnError> {
        if input.len() != self.spec.input.len() {
            return Err(CnnError::ShapeMismatch(format!(
                "network expects {} input values ({:?}), got {}",
                self.spec.input.len(),
                self.spec.input,
                input.len()
            )));
        }
        Ok(())
    }

    /// Logits (the input of the final softmax) for one sample.
    pub fn logits(&self, input: &[f64]) -> Result<Vec<f64>, CnnError> {
        self.check_input(input)?;
        let mut cur = input.to_vec();
        for layer in &self.layers {
            cur = match layer {
                Layer::Conv(c) => c.forward(&cur),
                Layer::Relu => cur.into_iter().map(|v| v.max(0.0)).collect(),
                Layer::MaxPool {
                    size,
                    input,
                    output,
                } => maxpool_forward(&cur, *size, *input, *output).0,
                Layer::Flatten => cur,
                Layer::Dense(d) => d.forward(&cur),
                Layer::Softmax => break,
            };
        }
        Ok(cur)
    }

    /// Class-probability row for one sample.
    pub fn forward_one(&self, input: &[f64]) -> Result<Vec<f64>, CnnError> {
        Ok(softmax(&self.logits(input)?))
    }

    fn forward_trace(&self, input: &[f64]) -> Trace {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        let mut pool_argmax = Vec::with_capacity(self.layers.len());
        acts.push(input.to_vec());
        for layer in &self.layers {
            let cur = acts.last().expect("input pushed");
            let (next, idx) = match layer {
                Layer::Conv(c) => (c.forward(cur), Vec::new()),
                Layer::Relu => (cur.iter().map(|v| v.max(0.0)).collect(), Vec::new()),
                Layer::MaxPool {
                    size,
                    input,
                    output,
                } => maxpool_forward(cur, *size, *input, *output),
                Layer::Flatten => (cur.clone(), Vec::new()),
                Layer::Dense(d) => (d.forward(cur), Vec::new()),
                Layer::Softmax => (softmax(cur), Vec::new()),
            };
            acts.push(next);
            pool_argmax.push(idx);
        }
        Trace { acts, pool_argmax }
    }

    /// Loss `-ln p(label)` for one sample and the accumulation of its
    /// (unscaled) parameter gradient into `grads`.
    pub(crate) fn sample_loss_and_grad(
        &self,
        input: &[f64],
        label: usize,
        grads: &mut Gradients,
    ) -> Result<f64, CnnError> {
        self.check_input(input)?;
        let n_classes = self.n_classes();
        if label >= n_classes {
            return Err(CnnError::LabelOutOfRange { label, n_classes });
        }
        let trace = self.forward_trace(input);
        let n = self.layers.len();
        // acts[n - 1] holds the logits feeding the trailing softmax
        let logits = &trace.acts[n - 1];
        let lse = log_sum_exp(logits);
        let loss = lse - logits[label];
        let mut delta: Vec<f64> = trace.acts[n].clone();
        delta[label] -= 1.0;

        let mut slot = grads.tensors.len();
        for i in (0..n - 1).rev() {
            let input_act = &trace.acts[i];
            let need_input_grad = i > 0;
            delta = match &self.layers[i] {
                Layer::Conv(c) => {
                    slot -= 2;
                    let (gw, rest) = grads.tensors.split_at_mut(slot + 1);
                    c.backward(input_act, &delta, &mut gw[slot], &mut rest[0], need_input_grad)
                }
                Layer::Dense(d) => {
                    slot -= 2;
                    let (gw, rest) = grads.tensors.split_at_mut(slot + 1);
                    d.backward(input_act, &delta, &mut gw[slot], &mut rest[0], need_input_grad)
                }
                Layer::Relu => {
                    let out = &trace.acts[i + 1];
                    delta
                        .iter()
                        .zip(out)
                        .map(|(d, o)| if *o > 0.0 { *d } else { 0.0 })
                        .collect()
                }
                Layer::MaxPool { input, .. } => {
                    let mut dx = vec![0.0; input.len()];
                    for (d, &src) in delta.iter().zip(&trace.pool_argmax[i]) {
                        dx[src as usize] += d;
                    }
                    dx
                }
                Layer::Flatten => delta,
                Layer::Softmax => unreachable!("softmax is validated to be last"),
            };
            if !need_input_grad {
                break;
            }
        }
        Ok(loss)
    }
}

impl Conv2d {
    fn padded(&self, input: &[f64]) -> (Vec<f64>, usize, usize) {
        let Shape {
            channels,
            height,
            width,
        } = self.input;
        let p = self.pad;
        let (hp, wp) = (height + 2 * p, width + 2 * p);
        if p == 0 {
            return (input.to_vec(), hp, wp);
        }
        let mut out = vec![0.0; channels * hp * wp];
        for c in 0..channels {
            for y in 0..height {
                let src = &input[(c * height + y) * width..][..width];
                out[(c * hp + y + p) * wp + p..][..width].copy_from_slice(src);
            }
        }
        (out, hp, wp)
    }

    fn forward(&self, input: &[f64]) -> Vec<f64> {
        let (padded, hp, wp) = self.padded(input);
        let (k, s) = (self.kernel, self.stride);
        let cin = self.input.channels;
        let Shape {
            channels: cout,
            height: ho,
            width: wo,
        } = self.output;
        let mut out = vec![0.0; cout * ho * wo];
        for oc in 0..cout {
            let plane = &mut out[oc * ho * wo..][..ho * wo];
            plane.fill(self.bias[oc]);
            if k == 3 && s == 1 {
                self.forward_plane_k3(&padded, hp, wp, oc, plane);
                continue;
            }
            for ic in 0..cin {
                let src_plane = &padded[ic * hp * wp..][..hp * wp];
                for ky in 0..k {
                    for kx in 0..k {
                        let w = self.weights[((oc * cin + ic) * k + ky) * k + kx];
                        for y in 0..ho {
                            let row = &src_plane[(y * s + ky) * wp + kx..];
                            let dst = &mut plane[y * wo..][..wo];
                            if s == 1 {
                                for (o, v) in dst.iter_mut().zip(&row[..wo]) {
                                    *o += w * v;
                                }
                            } else {
                                for (x, o) in dst.iter_mut().enumerate() {
                                    *o += w * row[x * s];
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// 3x3 stride-1 fast path: three taps per pass over each output row.
    fn forward_plane_k3(&self, padded: &[f64], hp: usize, wp: usize, oc: usize, plane: &mut [f64]) {
        let cin = self.input.channels;
        let (ho, wo) = (self.output.height, self.output.width);
        for ic in 0..cin {
            let src_plane = &padded[ic * hp * wp..][..hp * wp];
            let wbase = (oc * cin + ic) * 9;
            let w = &self.weights[wbase..wbase + 9];
            for y in 0..ho {
                let dst = &mut plane[y * wo..][..wo];
                for ky in 0..3 {
                    let row = &src_plane[(y + ky) * wp..][..wo + 2];
                    let (w0, w1, w2) = (w[ky * 3], w[ky * 3 + 1], w[ky * 3 + 2]);
                    for (x, o) in dst.iter_mut().enumerate() {
                        *o += w0 * row[x] + w1 * row[x + 1] + w2 * row[x + 2];
                    }
                }
            }
        }
    }

    fn backward(
        &self,
        input: &[f64],
        delta: &[f64],
        grad_w: &mut [f64],
        grad_b: &mut [f64],
        need_input_grad: bool,
    ) -> Vec<f64> {
        let (padded, hp, wp) = self.padded(input);
        let (k, s, p) = (self.kernel, self.stride, self.pad);
        let cin = self.input.channels;
        let Shape {
            channels: cout,
            height: ho,
            width: wo,
        } = self.output;
        let mut dpad = if need_input_grad {
            vec![0.0; cin * hp * wp]
        } else {
            Vec::new()
        };
        for oc in 0..cout {
            let dplane = &delta[oc * ho * wo..][..ho * wo];
            grad_b[oc] += dplane.iter().sum::<f64>();
            if k == 3 && s == 1 {
                for ic in 0..cin {
                    let src_plane = &padded[ic * hp * wp..][..hp * wp];
                    let wbase = (oc * cin + ic) * 9;
                    for y in 0..ho {
                        let drow = &dplane[y * wo..][..wo];
                        for ky in 0..3 {
                            let off = (y + ky) * wp;
                            let taps = dot3(drow, &src_plane[off..][..wo + 2]);
                            for (kx, t) in taps.iter().enumerate() {
                                grad_w[wbase + ky * 3 + kx] += t;
                            }
                            if need_input_grad {
                                let dst = &mut dpad[ic * hp * wp + off..][..wo + 2];
                                for kx in 0..3 {
                                    let w = self.weights[wbase + ky * 3 + kx];
                                    for (o, d) in dst[kx..kx + wo].iter_mut().zip(drow) {
                                        *o += w * d;
                                    }
                                }
                            }
                        }
                    }
                }
                continue;
            }
            for ic in 0..cin {
                let src_plane = &padded[ic * hp * wp..][..hp * wp];
                for ky in 0..k {
                    for kx in 0..k {
                        let wi = ((oc * cin + ic) * k + ky) * k + kx;
                        let w = self.weights[wi];
                        let mut acc = 0.0;
                        for y in 0..ho {
                            let drow = &dplane[y * wo..][..wo];
                            let off = (y * s + ky) * wp + kx;
                            if s == 1 {
                                let row = &src_plane[off..][..wo];
                                acc += drow.iter().zip(row).map(|(d, v)| d * v).sum::<f64>();
                                if need_input_grad {
                                    let dst = &mut dpad[ic * hp * wp + off..][..wo];
                                    for (o, d) in dst.iter_mut().zip(drow) {
                                        *o += w * d;
                                    }
                                }
                            } else {
                                for (x, d) in drow.iter().enumerate() {
                                    acc += d * src_plane[off + x * s];
                                    if need_input_grad {
                                        dpad[ic * hp * wp + off + x * s] += w * d;
                                    }
                                }
                            }
                        }
                        grad_w[wi] += acc;
                    }
                }
            }
        }
        if !need_input_grad {
            return Vec::new();
        }
        if p == 0 {
            return dpad;
        }
        let Shape { height, width, .. } = self.input;
        let mut dx = vec![0.0; self.input.len()];
        for c in 0..cin {
            for y in 0..height {
                dx[(c * height + y) * width..][..width]
                    .copy_from_slice(&dpad[(c * hp + y + p) * wp + p..][..width]);
            }
        }
        dx
    }
}

impl Dense {
    fn forward(&self, input: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|o| {
                let row = &self.weights[o * self.inputs..][..self.inputs];
                self.bias[o] + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>()
            })
            .collect()
    }

    fn backward(
        &self,
        input: &[f64],
        delta: &[f64],
        grad_w: &mut [f64],
        grad_b: &mut [f64],
        need_input_grad: bool,
    ) -> Vec<f64> {
        let mut dx = if need_input_grad {
            vec![0.0; self.inputs]
        } else {
            Vec::new()
        };
        for (o, &d) in delta.iter().enumerate() {
            grad_b[o] += d;
            let gw = &mut grad_w[o * self.inputs..][..self.inputs];
            for (g, x) in gw.iter_mut().zip(input) {
                *g += d * x;
            }
            if need_input_grad {
                let row = &self.weights[o * self.inputs..][..self.inputs];
                for (g, w) in dx.iter_mut().zip(row) {
                    *g += d * w;
                }
            }
        }
        dx
    }
}

/// `[sum d[x] * row[x + j] for j in 0..3]` with fixed-order 4-lane accumulation.
fn dot3(d: &[f64], row: &[f64]) -> [f64; 3] {
    let n = d.len();
    let mut acc = [[0.0f64; 4]; 3];
    let chunks = n / 4;
    for c in 0..chunks {
        let x = c * 4;
        for lane in 0..4 {
            let dv = d[x + lane];
            acc[0][lane] += dv * row[x + lane];
            acc[1][lane] += dv * row[x + lane + 1];
            acc[2][lane] += dv * row[x + lane + 2];
        }
    }
    let mut out = [0.0; 3];
    for j in 0..3 {
        out[j] = (acc[j][0] + acc[j][1]) + (acc[j][2] + acc[j][3]);
        for x in chunks * 4..n {
            out[j] += d[x] * row[x + j];
        }
    }
    out
}

fn maxpool_forward(input: &[f64], size: usize, ishape: Shape, oshape: Shape) -> (Vec<f64>, Vec<u32>) {
    let mut out = vec![0.0; oshape.len()];
    let mut idx = vec![0u32; oshape.len()];
    for c in 0..oshape.channels {
        for oy in 0..oshape.height {
            for ox in 0..oshape.width {
                let mut best = f64::NEG_INFINITY;
                let mut best_i = 0usize;
                for dy in 0..size {
                    for dx in 0..size {
                        let i = (c * ishape.height + oy * size + dy) * ishape.width + ox * size + dx;
                        // first maximum wins
                        if input[i] > best {
                            best = input[i];
                            best_i = i;
                        }
                    }
                }
                let o = (c * oshape.height + oy) * oshape.width + ox;
                out[o] = best;
                idx[o] = best_i as u32;
            }
        }
    }
    (out, idx)
}

pub fn log_sum_exp(logits: &[f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logits.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
