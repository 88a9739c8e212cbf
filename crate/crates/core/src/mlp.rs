//! Fully connected feedforward network with one sigmoid output unit,
//! trained by mini-batch gradient descent on binary cross-entropy.
//!
//! Weights for layer `l` are stored row-major as a `fan_out x fan_in`
//! matrix. Inputs are dense vectors; zero inputs are skipped in every
//! matrix-vector product, which leaves results bit-identical to the dense
//! sum because adding `0.0 * w` never changes a finite partial sum.
//!
//! Randomness comes from one [`SplitMix64`] stream seeded with
//! `MlpConfig::seed`: it first draws every weight (layer by layer,
//! row-major, uniform in `[-s, s)` with `s = sqrt(6 / (fan_in + fan_out))`),
//! then drives the Fisher-Yates shuffle at the start of every epoch.

use thiserror::Error;

use crate::features::{FeatureVector, LabeledVector};
use crate::label::Label;
use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum MlpError {
    #[error("bad network configuration: {0}")]
    BadDimensions(String),
    #[error("input has length {found}, network expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training data is empty")]
    EmptyData,
    #[error("finite-difference step must be > 0, got {0}")]
    BadEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Activation {
    #[default]
    Sigmoid,
    Relu,
}

impl Activation {
    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(z),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative given pre-activation `z` and activation `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" => Ok(Activation::Sigmoid),
            "relu" => Ok(Activation::Relu),
            other => Err(format!("unknown activation {other:?} (sigmoid|relu)")),
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub input_dim: usize,
    /// Hidden layer widths. May be empty (logistic regression).
    pub hidden_dims: Vec<usize>,
    pub hidden_activation: Activation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl MlpConfig {
    pub fn new(input_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_dims: vec![64],
            hidden_activation: Activation::Sigmoid,
            learning_rate: 0.05,
            epochs: 30,
            batch_size: 32,
            seed: 42,
        }
    }

    /// Layer widths from input to the single output unit.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(self.input_dim);
        dims.extend(&self.hidden_dims);
        dims.push(1);
        dims
    }

    fn validate(&self) -> Result<(), MlpError> {
        if self.input_dim == 0 {
            return Err(MlpError::BadDimensions("input_dim must be >= 1".into()));
        }
        if self.hidden_dims.contains(&0) {
            return Err(MlpError::BadDimensions("hidden layer widths must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(MlpError::BadDimensions(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(MlpError::BadDimensions("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub(crate) weights: Vec<Vec<f64>>,
    pub(crate) biases: Vec<Vec<f64>>,
    pub(crate) config: MlpConfig,
}

/// Parameter gradients, shaped like the model's weights and biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean per-example loss seen during each epoch (before each batch's
    /// update).
    pub epoch_losses: Vec<f64>,
    pub epochs: usize,
}

/// Binary cross-entropy with `p` clamped to `[1e-12, 1 - 1e-12]`.
pub fn loss(p: f64, y: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// 1.0 for spam, 0.0 for ham.
pub fn target(label: Label) -> f64 {
    match label {
        Label::Spam => 1.0,
        Label::Ham => 0.0,
    }
}

/// Activations of every layer for one input; `acts[0]` is unused (the
/// input is kept sparse).
struct Trace {
    pre: Vec<Vec<f64>>,
    acts: Vec<Vec<f64>>,
}

impl MlpModel {
    pub fn init(config: MlpConfig) -> Result<Self, MlpError> {
        let mut rng = SplitMix64::new(config.seed);
        Self::init_with(config, &mut rng)
    }

    fn init_with(config: MlpConfig, rng: &mut SplitMix64) -> Result<Self, MlpError> {
        config.validate()?;
        let dims = config.layer_dims();
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push((0..fan_in * fan_out).map(|_| rng.symmetric(s)).collect());
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Self {
            weights,
            biases,
            config,
        })
    }

    /// Build from explicit parameters. Shapes must chain from `input_dim`
    /// through `hidden_dims` to 1.
    pub fn from_parameters(
        config: MlpConfig,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self, MlpError> {
        config.validate()?;
        let dims = config.layer_dims();
        let ok = weights.len() == dims.len() - 1
            && biases.len() == dims.len() - 1
            && dims
                .windows(2)
                .zip(weights.iter().zip(&biases))
                .all(|(d, (w, b))| w.len() == d[0] * d[1] && b.len() == d[1]);
        if !ok {
            return Err(MlpError::BadDimensions("parameter shapes do not match layer sizes".into()));
        }
        if weights.iter().chain(&biases).flatten().any(|v| !v.is_finite()) {
            return Err(MlpError::BadDimensions("non-finite parameter".into()));
        }
        Ok(Self {
            weights,
            biases,
            config,
        })
    }

    pub fn config(&self) -> &MlpConfig {
        &self.config
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    /// `(fan_out, fan_in)` of each weight matrix.
    pub fn weight_shapes(&self) -> Vec<(usize, usize)> {
        self.config.layer_dims().windows(2).map(|d| (d[1], d[0])).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    fn check_dense(&self, x: &[f64]) -> Result<Vec<(usize, f64)>, MlpError> {
        if x.len() != self.config.input_dim {
            return Err(MlpError::DimensionMismatch {
                expected: self.config.input_dim,
                found: x.len(),
            });
        }
        Ok(x.iter().copied().enumerate().filter(|&(_, v)| v != 0.0).collect())
    }

    fn check_sparse(&self, x: &FeatureVector) -> Result<Vec<(usize, f64)>, MlpError> {
        if let Some(i) = x.max_index().filter(|&i| i as usize >= self.config.input_dim) {
            return Err(MlpError::DimensionMismatch {
                expected: self.config.input_dim,
                found: i as usize + 1,
            });
        }
        Ok(x.entries().iter().map(|&(i, v)| (i as usize, v)).collect())
    }

    fn trace(&self, x: &[(usize, f64)]) -> Trace {
        let n_layers = self.weights.len();
        let mut pre = Vec::with_capacity(n_layers);
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        acts.push(Vec::new());
        for l in 0..n_layers {
            let fan_out = self.biases[l].len();
            let fan_in = self.weights[l].len() / fan_out;
            let w = &self.weights[l];
            let z: Vec<f64> = (0..fan_out)
                .map(|j| {
                    let row = &w[j * fan_in..(j + 1) * fan_in];
                    let mut s = self.biases[l][j];
                    if l == 0 {
                        for &(i, v) in x {
                            s += row[i] * v;
                        }
                    } else {
                        for (wi, &a) in row.iter().zip(&acts[l]) {
                            if a != 0.0 {
                                s += wi * a;
                            }
                        }
                    }
                    s
                })
                .collect();
            let a = if l + 1 == n_layers {
                z.iter().map(|&v| clamp_open(sigmoid(v))).collect()
            } else {
                z.iter().map(|&v| self.config.hidden_activation.apply(v)).collect()
            };
            pre.push(z);
            acts.push(a);
        }
        Trace { pre, acts }
    }

    fn output(&self, x: &[(usize, f64)]) -> f64 {
        self.trace(x).acts.last().expect("at least one layer")[0]
    }

    /// Spam probability, strictly inside (0, 1).
    pub fn forward(&self, x: &[f64]) -> Result<f64, MlpError> {
        Ok(self.output(&self.check_dense(x)?))
    }

    /// [`forward`](Self::forward) on a sparse vector (absent entries are 0).
    pub fn forward_sparse(&self, x: &FeatureVector) -> Result<f64, MlpError> {
        Ok(self.output(&self.check_sparse(x)?))
    }

    /// Spam when the output is at least 0.5.
    pub fn predict(&self, x: &[f64]) -> Result<Label, MlpError> {
        Ok(label_for(self.forward(x)?))
    }

    pub fn predict_sparse(&self, x: &FeatureVector) -> Result<Label, MlpError> {
        Ok(label_for(self.forward_sparse(x)?))
    }

    /// Loss at `x` for target `y` (1 = spam).
    pub fn loss_at(&self, x: &[f64], y: f64) -> Result<f64, MlpError> {
        Ok(loss(self.forward(x)?, y))
    }

    /// Exact gradients of `loss(forward(x), y)` by reverse-mode chain rule.
    pub fn backward(&self, x: &[f64], y: f64) -> Result<Gradients, MlpError> {
        let x = self.check_dense(x)?;
        let mut g = self.zero_gradients();
        self.accumulate(&x, y, &mut g);
        Ok(g)
    }

    fn zero_gradients(&self) -> Gradients {
        Gradients {
            weights: self.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Adds this example's gradients into `g`; returns its loss. Only the
    /// columns of the first layer that `x` touches are written.
    fn accumulate(&self, x: &[(usize, f64)], y: f64, g: &mut Gradients) -> f64 {
        let t = self.trace(x);
        let n_layers = self.weights.len();
        let p = t.acts[n_layers][0];
        // Sigmoid output with cross-entropy: dL/dz = p - y.
        let mut delta = vec![p - y];
        for l in (0..n_layers).rev() {
            let fan_out = self.biases[l].len();
            let fan_in = self.weights[l].len() / fan_out;
            for (j, &d) in delta.iter().enumerate() {
                g.biases[l][j] += d;
                if d == 0.0 {
                    continue;
                }
                let row = &mut g.weights[l][j * fan_in..(j + 1) * fan_in];
                if l == 0 {
                    for &(i, v) in x {
                        row[i] += d * v;
                    }
                } else {
                    for (gw, &a) in row.iter_mut().zip(&t.acts[l]) {
                        *gw += d * a;
                    }
                }
            }
            if l > 0 {
                let w = &self.weights[l];
                delta = (0..fan_in)
                    .map(|i| {
                        let back: f64 = delta
                            .iter()
                            .enumerate()
                            .map(|(j, &d)| w[j * fan_in + i] * d)
                            .sum();
                        back * self
                            .config
                            .hidden_activation
                            .derivative(t.pre[l - 1][i], t.acts[l][i])
                    })
                    .collect();
            }
        }
        loss(p, y)
    }

    /// Initialize from `config` and run mini-batch gradient descent.
    pub fn train(data: &[LabeledVector], config: MlpConfig) -> Result<(Self, TrainReport), MlpError> {
        if data.is_empty() {
            return Err(MlpError::EmptyData);
        }
        let mut rng = SplitMix64::new(config.seed);
        let mut model = Self::init_with(config, &mut rng)?;
        let inputs: Vec<(Vec<(usize, f64)>, f64)> = data
            .iter()
            .map(|d| Ok((model.check_sparse(&d.vector)?, target(d.label))))
            .collect::<Result<_, MlpError>>()?;

        let mut order: Vec<usize> = (0..inputs.len()).collect();
        let mut grads = model.zero_gradients();
        let mut touched = vec![false; model.config.input_dim];
        let mut touched_cols: Vec<usize> = Vec::new();
        let mut epoch_losses = Vec::with_capacity(model.config.epochs);
        let lr = model.config.learning_rate;

        for _ in 0..model.config.epochs {
            rng.shuffle(&mut order);
            let mut total_loss = 0.0;
            for batch in order.chunks(model.config.batch_size) {
                for &k in batch {
                    let (x, y) = &inputs[k];
                    total_loss += model.accumulate(x, *y, &mut grads);
                    for &(i, _) in x {
                        if !touched[i] {
                            touched[i] = true;
                            touched_cols.push(i);
                        }
                    }
                }
                let scale = lr / batch.len() as f64;
                model.apply_step(&mut grads, &touched_cols, scale);
                for &i in &touched_cols {
                    touched[i] = false;
                }
                touched_cols.clear();
            }
            epoch_losses.push(total_loss / inputs.len() as f64);
        }
        let epochs = epoch_losses.len();
        Ok((
            model,
            TrainReport {
                epoch_losses,
                epochs,
            },
        ))
    }

    /// `param -= scale * grad`, then zero the gradient buffers. The first
    /// layer only visits `cols`; its other columns have zero gradient.
    fn apply_step(&mut self, g: &mut Gradients, cols: &[usize], scale: f64) {
        for l in 0..self.weights.len() {
            let fan_out = self.biases[l].len();
            let fan_in = self.weights[l].len() / fan_out;
            for j in 0..fan_out {
                self.biases[l][j] -= scale * g.biases[l][j];
                g.biases[l][j] = 0.0;
                if l == 0 {
                    for &i in cols {
                        let k = j * fan_in + i;
                        self.weights[0][k] -= scale * g.weights[0][k];
                        g.weights[0][k] = 0.0;
                    }
                } else {
                    for k in j * fan_in..(j + 1) * fan_in {
                        self.weights[l][k] -= scale * g.weights[l][k];
                        g.weights[l][k] = 0.0;
                    }
                }
            }
        }
    }

    /// Largest relative error between analytic gradients and central
    /// differences `(L(θ+eps) - L(θ-eps)) / (2 eps)` over every parameter.
    /// Relative error is `|a - n| / max(|a|, |n|, 1e-8)`.
    pub fn gradient_check(&self, x: &[f64], y: f64, eps: f64) -> Result<f64, MlpError> {
        if !(eps > 0.0) {
            return Err(MlpError::BadEpsilon(eps));
        }
        let analytic = self.backward(x, y)?;
        let mut probe = self.clone();
        let mut worst = 0.0f64;
        for l in 0..self.weights.len() {
            for k in 0..self.weights[l].len() {
                let orig = probe.weights[l][k];
                probe.weights[l][k] = orig + eps;
                let plus = probe.loss_at(x, y)?;
                probe.weights[l][k] = orig - eps;
                let minus = probe.loss_at(x, y)?;
                probe.weights[l][k] = orig;
                worst = worst.max(rel_error(analytic.weights[l][k], (plus - minus) / (2.0 * eps)));
            }
            for k in 0..self.biases[l].len() {
                let orig = probe.biases[l][k];
                probe.biases[l][k] = orig + eps;
                let plus = probe.loss_at(x, y)?;
                probe.biases[l][k] = orig - eps;
                let minus = probe.loss_at(x, y)?;
                probe.biases[l][k] = orig;
                worst = worst.max(rel_error(analytic.biases[l][k], (plus - minus) / (2.0 * eps)));
            }
        }
        Ok(worst)
    }
}

fn rel_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-8)
}

fn label_for(p: f64) -> Label {
    if p >= 0.5 {
        Label::Spam
    } else {
        Label::Ham
    }
}

/// Keeps a sigmoid output strictly inside (0, 1) where f64 rounding would
/// otherwise reach 0 or 1.
fn clamp_open(p: f64) -> f64 {
    p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}
