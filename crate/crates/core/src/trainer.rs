//! Dense multilayer networks with hand-written reverse-mode gradients,
//! trained by AdamW under a warmup + cosine schedule with global-norm clipping.
//!
//! Hidden layers share one activation family. When the family has a learnable
//! slope (BerLU, PReLU) each hidden layer owns one scalar `alpha`, initialised
//! to [`DEFAULT_ALPHA`](crate::activations::DEFAULT_ALPHA). The output layer is
//! linear and feeds a softmax cross-entropy loss averaged over the batch.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::activations::{ActivationSpec, DEFAULT_ALPHA};
use crate::data::Dataset;
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

/// Standard deviation of the truncated-normal weight initialisation.
pub const INIT_STD: f64 = 0.02;
/// Truncation bound, in standard deviations.
pub const INIT_TRUNCATION: f64 = 2.0;

const SHUFFLE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `out x in`, row-major.
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros_like(&self) -> Self {
        Self {
            weights: Matrix::zeros(self.weights.rows(), self.weights.cols()),
            biases: alloc::vec![0.0; self.biases.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    pub layers: Vec<Layer>,
    pub activation: ActivationSpec,
    /// One learnable slope per hidden layer, empty for non-parametric activations.
    pub alphas: Vec<f64>,
}

/// Role of a scalar parameter, which decides how the optimiser treats it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Weight,
    Bias,
    Alpha,
}

impl DenseNet {
    pub fn hidden_layers(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.weights.rows())
    }

    /// The activation applied after hidden layer `i`, with that layer's slope.
    pub fn layer_activation(&self, i: usize) -> Result<ActivationSpec> {
        match self.alphas.get(i) {
            Some(&a) => self.activation.with_alpha(a),
            None => Ok(self.activation),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Shape("network has no layers".into()));
        }
        for (i, pair) in self.layers.windows(2).enumerate() {
            if pair[1].weights.cols() != pair[0].weights.rows() {
                return Err(Error::Shape(alloc::format!(
                    "layer {} outputs {} but layer {} expects {}",
                    i,
                    pair[0].weights.rows(),
                    i + 1,
                    pair[1].weights.cols()
                )));
            }
        }
        if self
            .layers
            .iter()
            .any(|l| l.biases.len() != l.weights.rows())
        {
            return Err(Error::Shape("bias length differs from layer width".into()));
        }
        let want = if self.activation.is_learnable() {
            self.hidden_layers()
        } else {
            0
        };
        if self.alphas.len() != want {
            return Err(Error::Shape(alloc::format!(
                "expected {want} alphas, found {}",
                self.alphas.len()
            )));
        }
        Ok(())
    }

    /// All scalar parameters in canonical order: per layer weights then biases, then alphas.
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().chain(&l.biases))
            .chain(&self.alphas)
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                l.weights
                    .as_mut_slice()
                    .iter_mut()
                    .chain(l.biases.iter_mut())
            })
            .chain(self.alphas.iter_mut())
    }

    pub fn param_kinds(&self) -> Vec<ParamKind> {
        let mut kinds = Vec::new();
        for l in &self.layers {
            kinds.extend(core::iter::repeat_n(
                ParamKind::Weight,
                l.weights.as_slice().len(),
            ));
            kinds.extend(core::iter::repeat_n(ParamKind::Bias, l.biases.len()));
        }
        kinds.extend(core::iter::repeat_n(ParamKind::Alpha, self.alphas.len()));
        kinds
    }

    pub fn param_count(&self) -> usize {
        self.params().count()
    }
}

/// Gradients with the same shape as a [`DenseNet`]'s parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradients {
    pub layers: Vec<Layer>,
    pub alphas: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            layers: net.layers.iter().map(Layer::zeros_like).collect(),
            alphas: alloc::vec![0.0; net.alphas.len()],
        }
    }

    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().chain(&l.biases))
            .chain(&self.alphas)
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                l.weights
                    .as_mut_slice()
                    .iter_mut()
                    .chain(l.biases.iter_mut())
            })
            .chain(self.alphas.iter_mut())
    }

    /// Global L2 norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.values().map(|g| g * g).sum())
    }
}

fn truncated_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= INIT_TRUNCATION {
            return INIT_STD * z;
        }
    }
}

/// Builds a network with layer sizes `dims` (input first, classes last).
pub fn init_net(dims: &[usize], activation: ActivationSpec, seed: u64) -> Result<DenseNet> {
    activation.validate()?;
    if dims.len() < 2 {
        return Err(Error::Shape(alloc::format!(
            "need at least 2 dimensions, got {}",
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::Shape("layer dimensions must be nonzero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers: Vec<Layer> = dims
        .windows(2)
        .map(|w| {
            let (inp, out) = (w[0], w[1]);
            let data = (0..inp * out).map(|_| truncated_normal(&mut rng)).collect();
            Layer {
                weights: Matrix::from_vec(out, inp, data).unwrap(),
                biases: alloc::vec![0.0; out],
            }
        })
        .collect();
    let hidden = layers.len() - 1;
    let alphas = if activation.is_learnable() {
        alloc::vec![DEFAULT_ALPHA; hidden]
    } else {
        Vec::new()
    };
    Ok(DenseNet {
        layers,
        activation,
        alphas,
    })
}

struct Trace {
    // inputs to each layer; inputs[0] is the batch itself
    inputs: Vec<Matrix>,
    // pre-activations of each hidden layer
    pre: Vec<Matrix>,
    logits: Matrix,
}

fn affine(layer: &Layer, x: &Matrix) -> Matrix {
    let out = layer.weights.rows();
    let mut z = Matrix::zeros(x.rows(), out);
    for b in 0..x.rows() {
        let xr = x.row(b);
        let zr = z.row_mut(b);
        for (o, zo) in zr.iter_mut().enumerate() {
            let mut acc = layer.biases[o];
            for (w, xk) in layer.weights.row(o).iter().zip(xr) {
                acc += w * xk;
            }
            *zo = acc;
        }
    }
    z
}

fn run_forward(net: &DenseNet, x: &Matrix, acts: &[ActivationSpec]) -> Result<Trace> {
    let mut inputs = Vec::with_capacity(net.layers.len());
    let mut pre = Vec::with_capacity(net.hidden_layers());
    let mut current = x.clone();
    for (i, layer) in net.layers.iter().enumerate() {
        let z = affine(layer, &current);
        if z.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalOverflow { layer: i });
        }
        inputs.push(current);
        if i + 1 == net.layers.len() {
            return Ok(Trace {
                inputs,
                pre,
                logits: z,
            });
        }
        let mut a = z.clone();
        acts[i].forward_into(z.as_slice(), a.as_mut_slice());
        pre.push(z);
        current = a;
    }
    unreachable!("network has at least one layer")
}

fn check_batch(net: &DenseNet, x: &Matrix, labels: &[usize]) -> Result<()> {
    net.check()?;
    if x.rows() == 0 {
        return Err(invalid("empty batch"));
    }
    if x.cols() != net.input_dim() {
        return Err(Error::Shape(alloc::format!(
            "batch has {} features, net expects {}",
            x.cols(),
            net.input_dim()
        )));
    }
    if labels.len() != x.rows() {
        return Err(Error::Shape(alloc::format!(
            "{} labels for {} samples",
            labels.len(),
            x.rows()
        )));
    }
    if let Some(&y) = labels.iter().find(|&&y| y >= net.output_dim()) {
        return Err(invalid(alloc::format!(
            "label {y} outside [0, {})",
            net.output_dim()
        )));
    }
    Ok(())
}

fn hidden_activations(net: &DenseNet) -> Result<Vec<ActivationSpec>> {
    (0..net.hidden_layers())
        .map(|i| net.layer_activation(i))
        .collect()
}

/// Softmax probabilities of one logit row, and `-log p[label]`.
fn softmax_xent(logits: &[f64], label: usize, probs: &mut [f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (p, &z) in probs.iter_mut().zip(logits) {
        *p = libm::exp(z - max);
        sum += *p;
    }
    for p in probs.iter_mut() {
        *p /= sum;
    }
    libm::log(sum) + max - logits[label]
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Mean cross-entropy and its exact gradient with respect to every parameter.
pub fn forward_backward(
    net: &DenseNet,
    batch_x: &Matrix,
    batch_y: &[usize],
) -> Result<(f64, Gradients)> {
    check_batch(net, batch_x, batch_y)?;
    let acts = hidden_activations(net)?;
    let trace = run_forward(net, batch_x, &acts)?;
    let n = batch_x.rows();
    let classes = net.output_dim();

    let mut loss = 0.0;
    let mut delta = Matrix::zeros(n, classes);
    for b in 0..n {
        let row = delta.row_mut(b);
        loss += softmax_xent(trace.logits.row(b), batch_y[b], row);
        row[batch_y[b]] -= 1.0;
        row.iter_mut().for_each(|d| *d /= n as f64);
    }
    loss /= n as f64;
    if !loss.is_finite() {
        return Err(Error::NumericalOverflow {
            layer: net.layers.len() - 1,
        });
    }

    let mut grads = Gradients::zeros_like(net);
    for l in (0..net.layers.len()).rev() {
        let layer = &net.layers[l];
        let input = &trace.inputs[l];
        let inp = layer.weights.cols();
        let g = &mut grads.layers[l];
        for b in 0..n {
            let d = delta.row(b);
            let x = input.row(b);
            for (o, &d_o) in d.iter().enumerate() {
                g.biases[o] += d_o;
                for (gw, xk) in g.weights.row_mut(o).iter_mut().zip(x) {
                    *gw += d_o * xk;
                }
            }
        }
        if l == 0 {
            break;
        }
        // back through the activation of hidden layer l - 1
        let act = &acts[l - 1];
        let z = &trace.pre[l - 1];
        let mut next = Matrix::zeros(n, inp);
        let mut dalpha = 0.0;
        for b in 0..n {
            let d = delta.row(b);
            let zr = z.row(b);
            let nr = next.row_mut(b);
            for (k, (nk, &zk)) in nr.iter_mut().zip(zr).enumerate() {
                let mut upstream = 0.0;
                for (o, d_o) in d.iter().enumerate() {
                    upstream += d_o * layer.weights.get(o, k);
                }
                if let Some(da) = act.dalpha(zk) {
                    dalpha += upstream * da;
                }
                *nk = upstream * act.dx(zk);
            }
        }
        if let Some(ga) = grads.alphas.get_mut(l - 1) {
            *ga = dalpha;
        }
        delta = next;
    }
    Ok((loss, grads))
}

/// Mean loss and accuracy over the rows `idx` of `x`.
pub fn evaluate(net: &DenseNet, x: &Matrix, labels: &[usize], idx: &[usize]) -> Result<(f64, f64)> {
    if idx.is_empty() {
        return Ok((0.0, 0.0));
    }
    let batch = x.select_rows(idx);
    let ys: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
    check_batch(net, &batch, &ys)?;
    let trace = run_forward(net, &batch, &hidden_activations(net)?)?;
    let mut probs = alloc::vec![0.0; net.output_dim()];
    let mut loss = 0.0;
    let mut correct = 0usize;
    for (b, &y) in ys.iter().enumerate() {
        let row = trace.logits.row(b);
        loss += softmax_xent(row, y, &mut probs);
        if argmax(row) == y {
            correct += 1;
        }
    }
    Ok((loss / ys.len() as f64, correct as f64 / ys.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub base_lr: f64,
    pub weight_decay: f64,
    pub warmup_epochs: usize,
    pub grad_clip: f64,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 64,
            base_lr: 1e-2,
            weight_decay: 0.05,
            warmup_epochs: 5,
            grad_clip: 1.0,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs <= self.warmup_epochs {
            return Err(invalid(alloc::format!(
                "epochs ({}) must exceed warmup_epochs ({})",
                self.epochs,
                self.warmup_epochs
            )));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size must be positive"));
        }
        let positive = [
            ("base_lr", self.base_lr),
            ("grad_clip", self.grad_clip),
            ("adam_eps", self.adam_eps),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(alloc::format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(invalid(alloc::format!(
                "weight_decay must be >= 0, got {}",
                self.weight_decay
            )));
        }
        for (name, v) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(invalid(alloc::format!(
                    "{name} must lie in [0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// First and second moment estimates, flat in [`DenseNet::params`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AdamState {
    pub fn new(net: &DenseNet) -> Self {
        let n = net.param_count();
        Self {
            step: 0,
            m: alloc::vec![0.0; n],
            v: alloc::vec![0.0; n],
        }
    }
}

/// One AdamW update. Decoupled weight decay touches weights only; biases and
/// slopes get the plain Adam step.
pub fn adamw_step(
    net: &mut DenseNet,
    grads: &Gradients,
    state: &mut AdamState,
    lr: f64,
    cfg: &TrainConfig,
) -> Result<()> {
    let n = net.param_count();
    if state.m.len() != n || state.v.len() != n || grads.values().count() != n {
        return Err(Error::Shape(alloc::format!(
            "optimizer state for {} / {} parameters, gradients for {}, network has {n}",
            state.m.len(),
            state.v.len(),
            grads.values().count()
        )));
    }
    state.step += 1;
    let t = state.step as f64;
    let bc1 = 1.0 - libm::pow(cfg.adam_beta1, t);
    let bc2 = 1.0 - libm::pow(cfg.adam_beta2, t);
    let kinds = net.param_kinds();
    let moments = state.m.iter_mut().zip(state.v.iter_mut());
    for (((p, &g), (m, v)), kind) in net.params_mut().zip(grads.values()).zip(moments).zip(kinds) {
        *m = cfg.adam_beta1 * *m + (1.0 - cfg.adam_beta1) * g;
        *v = cfg.adam_beta2 * *v + (1.0 - cfg.adam_beta2) * g * g;
        if kind == ParamKind::Weight {
            *p -= lr * cfg.weight_decay * *p;
        }
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= lr * m_hat / (libm::sqrt(v_hat) + cfg.adam_eps);
    }
    Ok(())
}

/// Linear warmup from 0 to `base_lr`, then cosine annealing to 0 at the last step.
pub fn lr_at(step: usize, total_steps: usize, warmup_steps: usize, base_lr: f64) -> Result<f64> {
    if step >= total_steps {
        return Err(invalid(alloc::format!(
            "step {step} outside [0, {total_steps})"
        )));
    }
    if warmup_steps >= total_steps {
        return Err(invalid(alloc::format!(
            "warmup {warmup_steps} must be below total {total_steps}"
        )));
    }
    if step < warmup_steps {
        return Ok(base_lr * step as f64 / warmup_steps as f64);
    }
    let span = total_steps - 1 - warmup_steps;
    let progress = if span == 0 {
        0.0
    } else {
        (step - warmup_steps) as f64 / span as f64
    };
    Ok(base_lr * 0.5 * (1.0 + libm::cos(PI * progress)))
}

/// Global-norm clipping.
pub fn clip_gradients(mut grads: Gradients, threshold: f64) -> Result<Gradients> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(invalid(alloc::format!(
            "clip threshold must be positive, got {threshold}"
        )));
    }
    let norm = grads.norm();
    if norm > threshold {
        let scale = threshold / norm;
        grads.values_mut().for_each(|g| *g *= scale);
    }
    Ok(grads)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
    pub lr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub per_epoch: Vec<EpochMetrics>,
    pub final_alphas: Vec<f64>,
    /// Filled in by callers that own a clock; never serialised, so reports of
    /// identical runs compare byte for byte.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn final_metrics(&self) -> Option<&EpochMetrics> {
        self.per_epoch.last()
    }
}

/// Trains `net` on the training split of `ds`. Deterministic for a given
/// `cfg.seed`: epoch `e` shuffles with its own counter-based stream.
pub fn train(mut net: DenseNet, ds: &Dataset, cfg: &TrainConfig) -> Result<(DenseNet, RunReport)> {
    cfg.validate()?;
    net.check()?;
    if ds.split.train_idx.is_empty() {
        return Err(invalid("training split is empty"));
    }
    if ds.dim() != net.input_dim() || ds.classes > net.output_dim() {
        return Err(Error::Shape(alloc::format!(
            "dataset is {}-d with {} classes, net maps {} -> {}",
            ds.dim(),
            ds.classes,
            net.input_dim(),
            net.output_dim()
        )));
    }

    let steps_per_epoch = ds.split.train_idx.len().div_ceil(cfg.batch_size);
    let total_steps = steps_per_epoch * cfg.epochs;
    let warmup_steps = steps_per_epoch * cfg.warmup_epochs;
    let mut state = AdamState::new(&net);
    let mut order = ds.split.train_idx.clone();
    let mut per_epoch = Vec::with_capacity(cfg.epochs);
    let mut step = 0;

    for epoch in 0..cfg.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ SHUFFLE_SALT);
        rng.set_stream(epoch as u64);
        order.copy_from_slice(&ds.split.train_idx);
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        let mut lr = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let x = ds.features.select_rows(chunk);
            let y: Vec<usize> = chunk.iter().map(|&i| ds.labels[i]).collect();
            let (loss, grads) = forward_backward(&net, &x, &y).map_err(|e| match e {
                Error::NumericalOverflow { .. } => Error::Diverged { epoch },
                other => other,
            })?;
            loss_sum += loss * chunk.len() as f64;
            let grads = clip_gradients(grads, cfg.grad_clip)?;
            lr = lr_at(step, total_steps, warmup_steps, cfg.base_lr)?;
            adamw_step(&mut net, &grads, &mut state, lr, cfg)?;
            step += 1;
        }
        if net.params().any(|p| !p.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
        let diverged = |e: Error| match e {
            Error::NumericalOverflow { .. } => Error::Diverged { epoch },
            other => other,
        };
        let (_, train_acc) =
            evaluate(&net, &ds.features, &ds.labels, &ds.split.train_idx).map_err(diverged)?;
        let (_, val_acc) =
            evaluate(&net, &ds.features, &ds.labels, &ds.split.val_idx).map_err(diverged)?;
        per_epoch.push(EpochMetrics {
            train_loss: loss_sum / order.len() as f64,
            train_acc,
            val_acc,
            lr,
        });
    }

    let report = RunReport {
        per_epoch,
        final_alphas: net.alphas.clone(),
        wall_time_s: 0.0,
    };
    Ok((net, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TrainConfig {
        TrainConfig::default()
    }

    #[test]
    fn init_examples() {
        let net = init_net(&[2, 8, 2], ActivationSpec::berlu(0.01, 0.01).unwrap(), 1).unwrap();
        assert_eq!(net.layers.len(), 2);
        assert_eq!(net.alphas, alloc::vec![0.01]);
        assert!(net
            .layers
            .iter()
            .all(|l| l.biases.iter().all(|&b| b == 0.0)));
        assert!(net
            .params()
            .all(|w| w.abs() <= INIT_STD * INIT_TRUNCATION + 1e-15));

        let lin = init_net(&[4, 4], ActivationSpec::Identity, 1).unwrap();
        assert_eq!(lin.layers.len(), 1);
        assert!(lin.alphas.is_empty());

        assert_eq!(
            init_net(&[3, 5, 2], ActivationSpec::GELU, 9).unwrap(),
            init_net(&[3, 5, 2], ActivationSpec::GELU, 9).unwrap()
        );
        assert!(init_net(&[3], ActivationSpec::GELU, 9).is_err());
        assert!(init_net(&[3, 0, 2], ActivationSpec::GELU, 9).is_err());
    }

    #[test]
    fn uniform_logits_give_ln2() {
        let mut net = init_net(&[3, 2], ActivationSpec::Identity, 0).unwrap();
        net.params_mut().for_each(|p| *p = 0.0);
        let x = Matrix::from_vec(1, 3, alloc::vec![0.3, -1.0, 2.0]).unwrap();
        let (loss, _) = forward_backward(&net, &x, &[1]).unwrap();
        assert!((loss - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_berlu_alpha_gradient() {
        // 1 hidden unit, all weights zero except the output weight
        let mut net = init_net(&[1, 1, 2], ActivationSpec::berlu(0.01, 0.01).unwrap(), 0).unwrap();
        net.params_mut().for_each(|p| *p = 0.0);
        net.alphas[0] = 0.01;
        net.layers[1].weights = Matrix::from_vec(2, 1, alloc::vec![1.0, -1.0]).unwrap();
        let x = Matrix::from_vec(1, 1, alloc::vec![0.7]).unwrap();
        let (_, g) = forward_backward(&net, &x, &[0]).unwrap();
        // h = f(0) = 0.002475; logits (h, -h); dL/dh = (p0 - 1) - p1 = -2 p1
        let h = 0.002475;
        let p1 = 1.0 / (1.0 + libm::exp(2.0 * h));
        let dl_dh = -2.0 * p1;
        assert!((g.alphas[0] - dl_dh * -0.0025).abs() < 1e-15);
    }

    #[test]
    fn forward_backward_shape_errors() {
        let net = init_net(&[2, 3, 2], ActivationSpec::ReLU, 0).unwrap();
        let x = Matrix::zeros(2, 2);
        assert!(forward_backward(&net, &Matrix::zeros(0, 2), &[]).is_err());
        assert!(forward_backward(&net, &x, &[0]).is_err());
        assert!(forward_backward(&net, &x, &[0, 2]).is_err());
        assert!(forward_backward(&net, &Matrix::zeros(2, 3), &[0, 1]).is_err());
    }

    #[test]
    fn decay_only_step() {
        let mut net = init_net(&[1, 1], ActivationSpec::Identity, 0).unwrap();
        net.layers[0].weights.as_mut_slice()[0] = 0.8;
        net.layers[0].biases[0] = 0.3;
        let grads = Gradients::zeros_like(&net);
        let mut state = AdamState::new(&net);
        adamw_step(&mut net, &grads, &mut state, 0.1, &cfg()).unwrap();
        assert!((net.layers[0].weights.get(0, 0) - 0.8 * (1.0 - 0.1 * 0.05)).abs() < 1e-15);
        assert_eq!(net.layers[0].biases[0], 0.3);

        let mut zero = init_net(&[1, 1], ActivationSpec::Identity, 0).unwrap();
        zero.params_mut().for_each(|p| *p = 0.0);
        let mut state = AdamState::new(&zero);
        adamw_step(&mut zero, &grads, &mut state, 0.1, &cfg()).unwrap();
        assert!(zero.params().all(|&p| p == 0.0));
    }

    #[test]
    fn decay_skips_biases_and_alphas() {
        let mut net = init_net(&[2, 3, 2], ActivationSpec::PReLU { alpha: 0.01 }, 4).unwrap();
        net.layers
            .iter_mut()
            .for_each(|l| l.biases.iter_mut().for_each(|b| *b = 0.5));
        let before = net.clone();
        let grads = Gradients::zeros_like(&net);
        let mut state = AdamState::new(&net);
        adamw_step(&mut net, &grads, &mut state, 0.05, &cfg()).unwrap();
        assert_eq!(net.alphas, before.alphas);
        for (a, b) in net.layers.iter().zip(&before.layers) {
            assert_eq!(a.biases, b.biases);
            for (w, w0) in a.weights.as_slice().iter().zip(b.weights.as_slice()) {
                assert!(w.abs() < w0.abs() || *w0 == 0.0);
            }
        }
    }

    #[test]
    fn adamw_matches_scalar_reference() {
        // independent scalar AdamW
        let c = cfg();
        let (g, lr) = (0.3, 0.01);
        let (mut w, mut m, mut v) = (0.5f64, 0.0f64, 0.0f64);
        let mut want = Vec::new();
        for t in 1..=10 {
            m = c.adam_beta1 * m + (1.0 - c.adam_beta1) * g;
            v = c.adam_beta2 * v + (1.0 - c.adam_beta2) * g * g;
            w *= 1.0 - lr * c.weight_decay;
            let mh = m / (1.0 - c.adam_beta1.powi(t));
            let vh = v / (1.0 - c.adam_beta2.powi(t));
            w -= lr * mh / (vh.sqrt() + c.adam_eps);
            want.push(w);
        }

        let mut net = init_net(&[1, 1], ActivationSpec::Identity, 0).unwrap();
        net.layers[0].weights.as_mut_slice()[0] = 0.5;
        let mut grads = Gradients::zeros_like(&net);
        grads.layers[0].weights.as_mut_slice()[0] = g;
        let mut state = AdamState::new(&net);
        for expected in want {
            adamw_step(&mut net, &grads, &mut state, lr, &c).unwrap();
            assert!((net.layers[0].weights.get(0, 0) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn adamw_shape_check() {
        let mut net = init_net(&[2, 2], ActivationSpec::Identity, 0).unwrap();
        let other = init_net(&[2, 3], ActivationSpec::Identity, 0).unwrap();
        let mut state = AdamState::new(&other);
        let grads = Gradients::zeros_like(&net);
        assert!(adamw_step(&mut net, &grads, &mut state, 0.1, &cfg()).is_err());
    }

    #[test]
    fn schedule_examples() {
        let base = 0.1;
        assert_eq!(lr_at(10, 110, 10, base).unwrap(), base);
        assert_eq!(lr_at(0, 110, 10, base).unwrap(), 0.0);
        assert!((lr_at(5, 110, 10, base).unwrap() - 0.05).abs() < 1e-15);
        assert!(lr_at(99, 100, 0, base).unwrap().abs() < 1e-17);
        // remainder of 100 steps after warmup 10 spans steps 10..=109
        assert!((lr_at(10 + 50, 111, 10, base).unwrap() - base / 2.0).abs() < 1e-15);
        assert!(lr_at(110, 110, 10, base).is_err());
        assert!(lr_at(0, 10, 10, base).is_err());
    }

    #[test]
    fn clip_examples() {
        let mut net = init_net(&[2, 1], ActivationSpec::Identity, 0).unwrap();
        net.params_mut().for_each(|p| *p = 0.0);
        let mut g = Gradients::zeros_like(&net);
        g.layers[0]
            .weights
            .as_mut_slice()
            .copy_from_slice(&[3.0, 4.0]);
        let c = clip_gradients(g.clone(), 1.0).unwrap();
        assert!((c.layers[0].weights.get(0, 0) - 0.6).abs() < 1e-15);
        assert!((c.layers[0].weights.get(0, 1) - 0.8).abs() < 1e-15);
        g.layers[0]
            .weights
            .as_mut_slice()
            .copy_from_slice(&[0.3, 0.4]);
        assert_eq!(clip_gradients(g.clone(), 1.0).unwrap(), g);
        assert!(clip_gradients(g, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(TrainConfig {
            warmup_epochs: 200,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(TrainConfig {
            base_lr: 0.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(TrainConfig {
            batch_size: 0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(TrainConfig {
            adam_beta2: 1.0,
            ..cfg()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn diverging_run_reports_epoch() {
        let ds = crate::data::gen_two_moons(64, 0.1, 0).unwrap();
        let mut net = init_net(&[2, 4, 2], ActivationSpec::Identity, 0).unwrap();
        net.layers[0]
            .weights
            .as_mut_slice()
            .iter_mut()
            .for_each(|w| *w = f64::MAX);
        let c = TrainConfig {
            epochs: 3,
            warmup_epochs: 0,
            ..cfg()
        };
        assert!(matches!(
            train(net, &ds, &c),
            Err(Error::Diverged { epoch: 0 })
        ));
    }
}
