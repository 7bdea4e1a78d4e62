//! Feedforward network: dense → batch norm → activation → dropout per
//! hidden layer, trained with Adam.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{gemm, RealMatrix};
use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    /// `x` for `x > 0`, `e^x − 1` otherwise.
    Elu,
    Sigmoid,
    Linear,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp_m1()
                }
            }
            Activation::Sigmoid => {
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (1.0 + e)
                }
            }
            Activation::Linear => x,
        }
    }

    /// Derivative expressed through the output `y = f(x)`.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Elu => {
                if y > 0.0 {
                    1.0
                } else {
                    y + 1.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Linear => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: Activation,
    pub batch_norm: bool,
    /// Drop probability in training mode.
    pub dropout: f64,
}

/// Layer stack; the last layer is the output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub layers: Vec<LayerSpec>,
}

/// Parameter counts of one layer block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerCount {
    /// `width·(fan_in + 1)`.
    pub dense: usize,
    /// Scale and shift, `2·width`.
    pub bn_trainable: usize,
    /// Including running mean and variance, `4·width`.
    pub bn_total: usize,
}

impl MlpSpec {
    /// Five ELU hidden layers with batch norm; dropout 0.1 on the first
    /// four and 0.05 on the fifth; sigmoid output.
    pub fn five_layer_stack(input_dim: usize, hidden: [usize; 5], output_dim: usize) -> Self {
        let mut layers: Vec<LayerSpec> = hidden
            .iter()
            .enumerate()
            .map(|(i, &width)| LayerSpec {
                width,
                activation: Activation::Elu,
                batch_norm: true,
                dropout: if i == 4 { 0.05 } else { 0.1 },
            })
            .collect();
        layers.push(LayerSpec {
            width: output_dim,
            activation: Activation::Sigmoid,
            batch_norm: false,
            dropout: 0.0,
        });
        Self { input_dim, layers }
    }

    /// CSI features → normalized phases and energy split.
    pub fn dnn_csi(m: usize, n: usize, k: usize) -> Self {
        Self::five_layer_stack(csi_dim(m, n, k), [1024, 512, 256, 128, 128], k + n)
    }

    /// UE locations → CSI features.
    pub fn dnn_loc1(m: usize, n: usize, k: usize) -> Self {
        Self::five_layer_stack(2 * n, [512, 512, 256, 128, 256], csi_dim(m, n, k))
    }

    /// UE locations → normalized phases and energy split.
    pub fn dnn_loc2(n: usize, k: usize) -> Self {
        Self::five_layer_stack(2 * n, [512, 256, 128, 64, 32], k + n)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.layers.is_empty() {
            return Err(Error::InvalidArgument("network needs an input and at least one layer".into()));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.width == 0 {
                return Err(Error::InvalidArgument(format!("layer {i} has zero width")));
            }
            if !(0.0..1.0).contains(&l.dropout) {
                return Err(Error::InvalidArgument(format!("layer {i} dropout {} outside [0, 1)", l.dropout)));
            }
        }
        Ok(())
    }

    pub fn layer_counts(&self) -> Vec<LayerCount> {
        let mut fan_in = self.input_dim;
        self.layers
            .iter()
            .map(|l| {
                let c = LayerCount {
                    dense: l.width * (fan_in + 1),
                    bn_trainable: if l.batch_norm { 2 * l.width } else { 0 },
                    bn_total: if l.batch_norm { 4 * l.width } else { 0 },
                };
                fan_in = l.width;
                c
            })
            .collect()
    }

    pub fn trainable_parameters(&self) -> usize {
        self.layer_counts().iter().map(|c| c.dense + c.bn_trainable).sum()
    }

    /// Trainable plus batch-norm running statistics.
    pub fn total_parameters(&self) -> usize {
        self.layer_counts().iter().map(|c| c.dense + c.bn_total).sum()
    }

    fn fan_in(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            self.layers[layer - 1].width
        }
    }
}

/// `2(MN + KN + MK)`: real and imaginary parts of `h_d`, `h_r` and `H_AP`.
pub fn csi_dim(m: usize, n: usize, k: usize) -> usize {
    2 * (m * n + k * n + m * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Mae,
    Mse,
}

impl LossKind {
    pub fn value(self, pred: &[f64], target: &[f64]) -> f64 {
        let n = pred.len().max(1) as f64;
        let s: f64 = pred
            .iter()
            .zip(target)
            .map(|(p, t)| match self {
                LossKind::Mae => (p - t).abs(),
                LossKind::Mse => (p - t) * (p - t),
            })
            .sum();
        s / n
    }

    fn gradient(self, pred: &[f64], target: &[f64]) -> Vec<f64> {
        let n = pred.len().max(1) as f64;
        pred.iter()
            .zip(target)
            .map(|(p, t)| match self {
                LossKind::Mae => {
                    if p > t {
                        1.0 / n
                    } else if p < t {
                        -1.0 / n
                    } else {
                        0.0
                    }
                }
                LossKind::Mse => 2.0 * (p - t) / n,
            })
            .collect()
    }
}

/// Mean of the loss over every entry of a batch.
pub fn loss(pred: &RealMatrix, target: &RealMatrix, kind: LossKind) -> Result<f64> {
    if (pred.rows(), pred.cols()) != (target.rows(), target.cols()) {
        return Err(Error::Dimension(format!(
            "prediction {}x{} vs target {}x{}",
            pred.rows(),
            pred.cols(),
            target.rows(),
            target.cols()
        )));
    }
    Ok(kind.value(pred.as_slice(), target.as_slice()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Batch statistics and (when an RNG is supplied) dropout.
    Train,
    /// Running statistics, no dropout.
    Infer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam moment buffers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    /// One bias-corrected Adam update of `params` along `-grad`.
    /// Buffers of the wrong length (e.g. after loading a checkpoint, which
    /// does not store them) are reset first.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], cfg: &AdamConfig) {
        if self.m.len() != params.len() {
            *self = Self::new(params.len());
        }
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t as i32);
        let c2 = 1.0 - cfg.beta2.powi(self.t as i32);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let mhat = *m / c1;
            let vhat = *v / c2;
            *p -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
        }
    }
}

/// Offsets of one layer's blocks inside the flat parameter vector.
#[derive(Debug, Clone, Copy)]
struct Slots {
    w: usize,
    b: usize,
    gamma: usize,
    beta: usize,
    end: usize,
}

/// Network weights, batch-norm statistics and optimizer state.
///
/// Parameters are stored flat: for each layer the `fan_in×width` weight
/// matrix (row-major), the bias, then batch-norm scale and shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub spec: MlpSpec,
    pub params: Vec<f64>,
    pub running_mean: Vec<Vec<f64>>,
    pub running_var: Vec<Vec<f64>>,
    pub bn_momentum: f64,
    pub bn_eps: f64,
    /// Not persisted: checkpoints carry weights and statistics only.
    #[serde(skip)]
    pub adam: AdamState,
}

/// Per-layer values kept from the forward pass for backpropagation.
struct LayerTape {
    input: RealMatrix,
    xhat: Option<RealMatrix>,
    inv_std: Vec<f64>,
    /// Activation output before dropout.
    act: RealMatrix,
    /// Dropout multipliers (0 or `1/(1−p)`), empty when inactive.
    mask: Vec<f64>,
}

/// Batch mean and (biased) variance of each BN layer.
pub type BatchStats = Vec<Option<(Vec<f64>, Vec<f64>)>>;

fn slots(spec: &MlpSpec) -> Vec<Slots> {
    let mut off = 0;
    (0..spec.layers.len())
        .map(|i| {
            let l = &spec.layers[i];
            let w = off;
            let b = w + spec.fan_in(i) * l.width;
            let gamma = b + l.width;
            let beta = gamma + if l.batch_norm { l.width } else { 0 };
            let end = beta + if l.batch_norm { l.width } else { 0 };
            off = end;
            Slots { w, b, gamma, beta, end }
        })
        .collect()
}

impl Mlp {
    /// Uniform `±√(3/fan_in)` weights (unit-variance preserving), zero
    /// biases, unit BN scale, zero shift.
    pub fn new(spec: MlpSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let layout = slots(&spec);
        let n = layout.last().map_or(0, |s| s.end);
        let mut params = vec![0.0; n];
        let mut rng = rng_from_seed(seed);
        for (i, (l, s)) in spec.layers.iter().zip(&layout).enumerate() {
            let lim = (3.0 / spec.fan_in(i) as f64).sqrt();
            for p in &mut params[s.w..s.b] {
                *p = rng.gen_range(-lim..lim);
            }
            if l.batch_norm {
                for p in &mut params[s.gamma..s.beta] {
                    *p = 1.0;
                }
            }
        }
        let stats = |fill: f64| -> Vec<Vec<f64>> {
            spec.layers
                .iter()
                .map(|l| if l.batch_norm { vec![fill; l.width] } else { Vec::new() })
                .collect()
        };
        Ok(Self {
            running_mean: stats(0.0),
            running_var: stats(1.0),
            bn_momentum: 0.99,
            bn_eps: 1e-3,
            adam: AdamState::new(n),
            params,
            spec,
        })
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Zero every weight and bias (BN scale stays 1). Mostly for tests.
    pub fn zero_weights(&mut self) {
        for (l, s) in self.spec.layers.iter().zip(slots(&self.spec)) {
            for p in &mut self.params[s.w..s.gamma] {
                *p = 0.0;
            }
            if l.batch_norm {
                for p in &mut self.params[s.beta..s.end] {
                    *p = 0.0;
                }
            }
        }
    }

    fn check_input(&self, x: &RealMatrix) -> Result<()> {
        if x.cols() != self.spec.input_dim {
            return Err(Error::Dimension(format!(
                "input has {} features, network expects {}",
                x.cols(),
                self.spec.input_dim
            )));
        }
        Ok(())
    }

    fn run(&self, x: &RealMatrix, mode: Mode, mut rng: Option<&mut SimRng>, keep_tape: bool) -> Result<(RealMatrix, Vec<LayerTape>, BatchStats)> {
        self.check_input(x)?;
        let batch = x.rows();
        let layout = slots(&self.spec);
        let mut tape = Vec::with_capacity(if keep_tape { layout.len() } else { 0 });
        let mut stats = Vec::with_capacity(layout.len());
        let mut h = x.clone();
        for (li, (l, s)) in self.spec.layers.iter().zip(&layout).enumerate() {
            let fan_in = self.spec.fan_in(li);
            let w = RealMatrix::from_row_major(fan_in, l.width, self.params[s.w..s.b].to_vec())?;
            let mut z = RealMatrix::zeros(batch, l.width);
            gemm(1.0, &h, false, &w, false, 0.0, &mut z)?;
            let bias = &self.params[s.b..s.gamma];
            for r in 0..batch {
                for (v, b) in z.row_mut(r).iter_mut().zip(bias) {
                    *v += b;
                }
            }

            let mut xhat_keep = None;
            let mut inv_std = Vec::new();
            if l.batch_norm {
                let gamma = &self.params[s.gamma..s.beta];
                let beta = &self.params[s.beta..s.end];
                let (mean, var) = match mode {
                    Mode::Train => {
                        let (mean, var) = column_moments(&z);
                        stats.push(Some((mean.clone(), var.clone())));
                        (mean, var)
                    }
                    Mode::Infer => {
                        stats.push(None);
                        (self.running_mean[li].clone(), self.running_var[li].clone())
                    }
                };
                inv_std = var.iter().map(|v| 1.0 / (v + self.bn_eps).sqrt()).collect();
                let mut xhat = z.clone();
                for r in 0..batch {
                    for (j, v) in xhat.row_mut(r).iter_mut().enumerate() {
                        *v = (*v - mean[j]) * inv_std[j];
                    }
                }
                for r in 0..batch {
                    let xr = xhat.row(r);
                    for (j, v) in z.row_mut(r).iter_mut().enumerate() {
                        *v = gamma[j] * xr[j] + beta[j];
                    }
                }
                if keep_tape {
                    xhat_keep = Some(xhat);
                }
            } else {
                stats.push(None);
            }

            for v in z.as_mut_slice() {
                *v = l.activation.apply(*v);
            }
            let act = z;
            let mut out = act.clone();
            let mut mask = Vec::new();
            if mode == Mode::Train && l.dropout > 0.0 {
                if let Some(r) = rng.as_deref_mut() {
                    let keep = 1.0 / (1.0 - l.dropout);
                    mask = (0..out.as_slice().len())
                        .map(|_| if r.gen::<f64>() < l.dropout { 0.0 } else { keep })
                        .collect();
                    for (v, m) in out.as_mut_slice().iter_mut().zip(&mask) {
                        *v *= m;
                    }
                }
            }
            if keep_tape {
                tape.push(LayerTape {
                    input: h,
                    xhat: xhat_keep,
                    inv_std,
                    act,
                    mask,
                });
            }
            h = out;
        }
        Ok((h, tape, stats))
    }

    /// Forward pass. In [`Mode::Train`] batch norm uses the batch's own
    /// statistics and dropout is applied when `rng` is given; the model
    /// itself is not modified.
    pub fn forward(&self, x: &RealMatrix, mode: Mode, rng: Option<&mut SimRng>) -> Result<RealMatrix> {
        Ok(self.run(x, mode, rng, false)?.0)
    }

    /// Inference-mode forward pass.
    pub fn predict(&self, x: &RealMatrix) -> Result<RealMatrix> {
        self.forward(x, Mode::Infer, None)
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = RealMatrix::from_row_major(1, x.len(), x.to_vec())?;
        Ok(self.predict(&m)?.into_vec())
    }

    /// Training-mode loss and its gradient with respect to `params`.
    pub fn gradients(&self, x: &RealMatrix, target: &RealMatrix, kind: LossKind, rng: Option<&mut SimRng>) -> Result<(f64, Vec<f64>, BatchStats)> {
        let (pred, tape, stats) = self.run(x, Mode::Train, rng, true)?;
        let value = loss(&pred, target, kind)?;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("training loss {value}")));
        }
        let batch = x.rows();
        let layout = slots(&self.spec);
        let mut grad = vec![0.0; self.params.len()];
        let mut g = RealMatrix::from_row_major(batch, pred.cols(), kind.gradient(pred.as_slice(), target.as_slice()))?;

        for li in (0..layout.len()).rev() {
            let l = &self.spec.layers[li];
            let s = layout[li];
            let t = &tape[li];
            if !t.mask.is_empty() {
                for (v, m) in g.as_mut_slice().iter_mut().zip(&t.mask) {
                    *v *= m;
                }
            }
            for (v, y) in g.as_mut_slice().iter_mut().zip(t.act.as_slice()) {
                *v *= l.activation.derivative_from_output(*y);
            }
            if let Some(xhat) = &t.xhat {
                let width = l.width;
                let gamma = &self.params[s.gamma..s.beta];
                let mut sum_d = vec![0.0; width];
                let mut sum_dx = vec![0.0; width];
                for r in 0..batch {
                    let (gr, xr) = (g.row(r), xhat.row(r));
                    for j in 0..width {
                        grad[s.gamma + j] += gr[j] * xr[j];
                        grad[s.beta + j] += gr[j];
                        let dxh = gr[j] * gamma[j];
                        sum_d[j] += dxh;
                        sum_dx[j] += dxh * xr[j];
                    }
                }
                let bf = batch as f64;
                for r in 0..batch {
                    let xr = xhat.row(r).to_vec();
                    for (j, v) in g.row_mut(r).iter_mut().enumerate() {
                        let dxh = *v * gamma[j];
                        *v = t.inv_std[j] / bf * (bf * dxh - sum_d[j] - xr[j] * sum_dx[j]);
                    }
                }
            }
            let fan_in = self.spec.fan_in(li);
            let mut dw = RealMatrix::zeros(fan_in, l.width);
            gemm(1.0, &t.input, true, &g, false, 0.0, &mut dw)?;
            grad[s.w..s.b].copy_from_slice(dw.as_slice());
            for r in 0..batch {
                for (acc, v) in grad[s.b..s.gamma].iter_mut().zip(g.row(r)) {
                    *acc += v;
                }
            }
            if li > 0 {
                let w = RealMatrix::from_row_major(fan_in, l.width, self.params[s.w..s.b].to_vec())?;
                let mut dx = RealMatrix::zeros(batch, fan_in);
                gemm(1.0, &g, false, &w, true, 0.0, &mut dx)?;
                g = dx;
            }
        }
        Ok((value, grad, stats))
    }

    /// One Adam step on a batch; updates running BN statistics. Returns
    /// the batch loss before the update.
    pub fn train_step(&mut self, x: &RealMatrix, target: &RealMatrix, kind: LossKind, adam: &AdamConfig, rng: Option<&mut SimRng>) -> Result<f64> {
        let (value, grad, stats) = self.gradients(x, target, kind, rng)?;
        if let Some(bad) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("gradient entry {bad} at loss {value}")));
        }
        self.adam.step(&mut self.params, &grad, adam);
        let mom = self.bn_momentum;
        for (li, st) in stats.into_iter().enumerate() {
            if let Some((mean, var)) = st {
                for (r, m) in self.running_mean[li].iter_mut().zip(&mean) {
                    *r = mom * *r + (1.0 - mom) * m;
                }
                for (r, v) in self.running_var[li].iter_mut().zip(&var) {
                    *r = mom * *r + (1.0 - mom) * v;
                }
            }
        }
        Ok(value)
    }

    /// Human-readable one-line-per-layer summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (i, (l, c)) in self.spec.layers.iter().zip(self.spec.layer_counts()).enumerate() {
            out += &format!(
                "layer {i}: width {} {:?} bn={} dropout={} dense={} bn={}\n",
                l.width, l.activation, l.batch_norm, l.dropout, c.dense, c.bn_trainable
            );
        }
        out
    }
}

/// Per-column mean and biased variance.
pub fn column_moments(z: &RealMatrix) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (z.rows(), z.cols());
    let mut mean = vec![0.0; d];
    for r in 0..n {
        for (m, v) in mean.iter_mut().zip(z.row(r)) {
            *m += v;
        }
    }
    let nf = n.max(1) as f64;
    for m in &mut mean {
        *m /= nf;
    }
    let mut var = vec![0.0; d];
    for r in 0..n {
        for ((s, v), m) in var.iter_mut().zip(z.row(r)).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut var {
        *s /= nf;
    }
    (mean, var)
}
