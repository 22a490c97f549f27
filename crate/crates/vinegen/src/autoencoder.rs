//! A dense autoencoder trained from scratch with Adam, plus a finite
//! difference gradient checker.
//!
//! Hidden layers use ReLU, the bottleneck is linear so latent codes live on
//! the whole real line, and the output layer is a sigmoid trained against
//! binary cross-entropy. Both activations and the loss can be switched to
//! identity/MSE, which turns the model into a plain linear autoencoder.
//! Training is single-threaded and bit-reproducible for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Identity,
}

/// Output-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputActivation {
    Sigmoid,
    Identity,
}

/// Reconstruction loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Loss {
    /// Mean per-pixel binary cross-entropy, outputs clamped to
    /// [1e-7, 1 - 1e-7] inside the loss.
    Bce,
    /// Mean per-pixel squared error.
    Mse,
}

/// Network shape: a symmetric stack of layer widths, e.g. `[64, 32, 10, 32, 64]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Architecture {
    pub layer_dims: Vec<usize>,
    pub hidden: Activation,
    pub output: OutputActivation,
}

impl Architecture {
    /// Symmetric dense stack `[input, hidden..., latent, hidden rev..., input]`
    /// with the default ReLU/sigmoid activations.
    pub fn dense(input_dim: usize, hidden: &[usize], latent_dim: usize) -> Self {
        let mut dims = Vec::with_capacity(2 * hidden.len() + 3);
        dims.push(input_dim);
        dims.extend_from_slice(hidden);
        dims.push(latent_dim);
        dims.extend(hidden.iter().rev());
        dims.push(input_dim);
        Architecture {
            layer_dims: dims,
            hidden: Activation::Relu,
            output: OutputActivation::Sigmoid,
        }
    }

    fn validate(&self) -> Result<()> {
        let dims = &self.layer_dims;
        if dims.len() < 3 || dims.len() % 2 == 0 {
            return Err(Error::Domain(
                "layer_dims must be an odd-length stack around the bottleneck".into(),
            ));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Domain("layer widths must be positive".into()));
        }
        for i in 0..dims.len() {
            if dims[i] != dims[dims.len() - 1 - i] {
                return Err(Error::Domain(
                    "layer_dims must be symmetric about the bottleneck".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Adam training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub loss: Loss,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            weight_decay: 0.001,
            epochs: 200,
            batch_size: 128,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            loss: Loss::Bce,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0
            || self.weight_decay < 0.0
            || self.epochs == 0
            || self.batch_size == 0
            || !(0.0..1.0).contains(&self.adam_beta1)
            || !(0.0..1.0).contains(&self.adam_beta2)
        {
            return Err(Error::Domain("invalid training configuration".into()));
        }
        Ok(())
    }
}

/// Encoder/decoder weight stacks with fixed activations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseAutoencoder {
    layer_dims: Vec<usize>,
    hidden: Activation,
    output: OutputActivation,
    /// Row-major `[out x in]` weight matrix per layer.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

// Per-layer activation kinds, resolved once.
#[derive(Clone, Copy, PartialEq)]
enum Act {
    Relu,
    Identity,
    Sigmoid,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl DenseAutoencoder {
    /// Glorot-uniform initialization with a fixed seed.
    pub fn init(arch: &Architecture, seed: u64) -> Result<Self> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ae = DenseAutoencoder {
            layer_dims: arch.layer_dims.clone(),
            hidden: arch.hidden,
            output: arch.output,
            weights: Vec::new(),
            biases: Vec::new(),
        };
        for l in 0..ae.num_layers() {
            let (fan_out, fan_in) = (arch.layer_dims[l + 1], arch.layer_dims[l]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            ae.weights.push(
                (0..fan_out * fan_in)
                    .map(|_| rng.gen_range(-bound..bound))
                    .collect(),
            );
            ae.biases.push(vec![0.0; fan_out]);
        }
        Ok(ae)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn latent_dim(&self) -> usize {
        self.layer_dims[self.layer_dims.len() / 2]
    }

    fn num_layers(&self) -> usize {
        self.layer_dims.len() - 1
    }

    // Index of the layer producing the bottleneck.
    fn bottleneck_layer(&self) -> usize {
        self.layer_dims.len() / 2 - 1
    }

    fn activation_of(&self, layer: usize) -> Act {
        if layer == self.num_layers() - 1 {
            match self.output {
                OutputActivation::Sigmoid => Act::Sigmoid,
                OutputActivation::Identity => Act::Identity,
            }
        } else if layer == self.bottleneck_layer() {
            Act::Identity
        } else {
            match self.hidden {
                Activation::Relu => Act::Relu,
                Activation::Identity => Act::Identity,
            }
        }
    }

    // Affine step z = W a + b for one row.
    fn affine(&self, layer: usize, a: &[f64]) -> Vec<f64> {
        let (out_dim, in_dim) = (self.layer_dims[layer + 1], self.layer_dims[layer]);
        let w = &self.weights[layer];
        let mut z = self.biases[layer].clone();
        for o in 0..out_dim {
            let row = &w[o * in_dim..(o + 1) * in_dim];
            let mut acc = 0.0;
            for i in 0..in_dim {
                acc += row[i] * a[i];
            }
            z[o] += acc;
        }
        z
    }

    fn apply_act(act: Act, z: &mut [f64]) {
        match act {
            Act::Relu => z.iter_mut().for_each(|v| *v = v.max(0.0)),
            Act::Sigmoid => z.iter_mut().for_each(|v| *v = sigmoid(*v)),
            Act::Identity => {}
        }
    }

    fn forward_range(&self, row: &[f64], layers: std::ops::Range<usize>) -> Vec<f64> {
        let mut a = row.to_vec();
        for l in layers {
            let mut z = self.affine(l, &a);
            Self::apply_act(self.activation_of(l), &mut z);
            a = z;
        }
        a
    }

    /// Deterministic encoder forward pass.
    pub fn encode(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(rows, self.input_dim())?;
        Ok(rows
            .iter()
            .map(|r| self.forward_range(r, 0..self.bottleneck_layer() + 1))
            .collect())
    }

    /// Decoder forward pass; with a sigmoid output the pixels lie in (0,1).
    pub fn decode(&self, latents: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(latents, self.latent_dim())?;
        Ok(latents
            .iter()
            .map(|r| self.forward_range(r, self.bottleneck_layer() + 1..self.num_layers()))
            .collect())
    }

    /// decode(encode(x)).
    pub fn reconstruct(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(rows, self.input_dim())?;
        Ok(rows
            .iter()
            .map(|r| self.forward_range(r, 0..self.num_layers()))
            .collect())
    }

    fn check_dim(&self, rows: &[Vec<f64>], expect: usize) -> Result<()> {
        if rows.iter().any(|r| r.len() != expect) {
            return Err(Error::DimensionMismatch(format!(
                "expected rows of dimension {expect}"
            )));
        }
        Ok(())
    }

    /// Mean per-pixel reconstruction loss over a dataset.
    pub fn evaluate_loss(&self, rows: &[Vec<f64>], loss: Loss) -> Result<f64> {
        self.check_dim(rows, self.input_dim())?;
        let p = self.input_dim();
        let mut total = 0.0;
        for r in rows {
            let y = self.forward_range(r, 0..self.num_layers());
            total += loss_of_row(loss, &y, r);
        }
        Ok(total / (rows.len() as f64 * p as f64))
    }

    // Full forward pass keeping every activation (index 0 is the input).
    fn forward_trace(&self, row: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.num_layers() + 1);
        acts.push(row.to_vec());
        for l in 0..self.num_layers() {
            let mut z = self.affine(l, acts.last().unwrap());
            Self::apply_act(self.activation_of(l), &mut z);
            acts.push(z);
        }
        acts
    }

    // Pre-activations of every layer (for the gradient checker's kink
    // margin).
    fn preactivations(&self, row: &[f64]) -> Vec<Vec<f64>> {
        let mut pre = Vec::with_capacity(self.num_layers());
        let mut a = row.to_vec();
        for l in 0..self.num_layers() {
            let z = self.affine(l, &a);
            pre.push(z.clone());
            let mut act = z;
            Self::apply_act(self.activation_of(l), &mut act);
            a = act;
        }
        pre
    }

    // Gradients of the mean per-pixel loss over the batch, laid out like
    // `weights`/`biases`. Relies on activations being stored
    // post-nonlinearity: relu'(z) = 1 iff the stored activation is positive,
    // and the sigmoid/BCE (or identity/MSE) output delta collapses to a
    // residual.
    fn gradients(&self, batch: &[Vec<f64>], loss: Loss) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let num_layers = self.num_layers();
        let p = self.input_dim();
        let scale = 1.0 / (batch.len() as f64 * p as f64);
        let mut gw: Vec<Vec<f64>> = self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut gb: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();

        for row in batch {
            let acts = self.forward_trace(row);
            let y = acts.last().unwrap();
            // Output delta, d(loss)/d(pre-activation).
            let mut delta: Vec<f64> = match (loss, self.activation_of(num_layers - 1)) {
                (Loss::Bce, Act::Sigmoid) => {
                    y.iter().zip(row).map(|(&yi, &ti)| (yi - ti) * scale).collect()
                }
                (Loss::Mse, Act::Identity) => y
                    .iter()
                    .zip(row)
                    .map(|(&yi, &ti)| 2.0 * (yi - ti) * scale)
                    .collect(),
                (Loss::Mse, Act::Sigmoid) => y
                    .iter()
                    .zip(row)
                    .map(|(&yi, &ti)| 2.0 * (yi - ti) * yi * (1.0 - yi) * scale)
                    .collect(),
                (Loss::Bce, Act::Identity) => y
                    .iter()
                    .zip(row)
                    .map(|(&yi, &ti)| {
                        let yc = yi.clamp(1e-7, 1.0 - 1e-7);
                        (-ti / yc + (1.0 - ti) / (1.0 - yc)) * scale
                    })
                    .collect(),
                _ => unreachable!("activation/loss pairing handled above"),
            };

            for l in (0..num_layers).rev() {
                let a_prev = &acts[l];
                let in_dim = self.layer_dims[l];
                for (o, &d) in delta.iter().enumerate() {
                    gb[l][o] += d;
                    let grow = &mut gw[l][o * in_dim..(o + 1) * in_dim];
                    for (i, &ai) in a_prev.iter().enumerate() {
                        grow[i] += d * ai;
                    }
                }
                if l == 0 {
                    break;
                }
                let w = &self.weights[l];
                let mut prev = vec![0.0; in_dim];
                for (o, &d) in delta.iter().enumerate() {
                    let row_w = &w[o * in_dim..(o + 1) * in_dim];
                    for i in 0..in_dim {
                        prev[i] += row_w[i] * d;
                    }
                }
                match self.activation_of(l - 1) {
                    Act::Relu => {
                        for (i, v) in prev.iter_mut().enumerate() {
                            if acts[l][i] <= 0.0 {
                                *v = 0.0;
                            }
                        }
                    }
                    Act::Sigmoid => {
                        for (i, v) in prev.iter_mut().enumerate() {
                            *v *= acts[l][i] * (1.0 - acts[l][i]);
                        }
                    }
                    Act::Identity => {}
                }
                delta = prev;
            }
        }
        (gw, gb)
    }
}

fn loss_of_row(loss: Loss, y: &[f64], t: &[f64]) -> f64 {
    match loss {
        Loss::Bce => y
            .iter()
            .zip(t)
            .map(|(&yi, &ti)| {
                let yc = yi.clamp(1e-7, 1.0 - 1e-7);
                -ti * yc.ln() - (1.0 - ti) * (1.0 - yc).ln()
            })
            .sum(),
        Loss::Mse => y.iter().zip(t).map(|(&yi, &ti)| (yi - ti) * (yi - ti)).sum(),
    }
}

/// Train a dense autoencoder with Adam; returns the model and the full-data
/// loss evaluated after every epoch.
pub fn train(
    data: &[Vec<f64>],
    arch: &Architecture,
    cfg: &TrainConfig,
) -> Result<(DenseAutoencoder, Vec<f64>)> {
    arch.validate()?;
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::DegenerateInput("empty training set".into()));
    }
    if data.iter().any(|r| r.len() != arch.layer_dims[0]) {
        return Err(Error::DimensionMismatch(format!(
            "training rows must have dimension {}",
            arch.layer_dims[0]
        )));
    }
    if data
        .iter()
        .any(|r| r.iter().any(|&v| !(0.0..=1.0).contains(&v)))
    {
        return Err(Error::Domain("training data must lie in [0,1]".into()));
    }

    let mut ae = DenseAutoencoder::init(arch, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let n = data.len();
    let batch = cfg.batch_size.min(n);

    // Adam state.
    let mut mw: Vec<Vec<f64>> = ae.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut vw = mw.clone();
    let mut mb: Vec<Vec<f64>> = ae.biases.iter().map(|b| vec![0.0; b.len()]).collect();
    let mut vb = mb.clone();
    let mut step = 0i32;

    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        // Fisher-Yates shuffle from the seeded stream.
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        for chunk in order.chunks(batch) {
            let rows: Vec<Vec<f64>> = chunk.iter().map(|&i| data[i].clone()).collect();
            let (gw, gb) = ae.gradients(&rows, cfg.loss);
            step += 1;
            let bc1 = 1.0 - cfg.adam_beta1.powi(step);
            let bc2 = 1.0 - cfg.adam_beta2.powi(step);
            for l in 0..ae.weights.len() {
                adam_update(&mut ae.weights[l], &gw[l], &mut mw[l], &mut vw[l], cfg, bc1, bc2);
                adam_update(&mut ae.biases[l], &gb[l], &mut mb[l], &mut vb[l], cfg, bc1, bc2);
            }
        }
        let loss = ae.evaluate_loss(data, cfg.loss)?;
        if !loss.is_finite() {
            return Err(Error::Numeric(format!(
                "loss became non-finite at epoch {epoch}; try a smaller learning rate"
            )));
        }
        history.push(loss);
    }
    Ok((ae, history))
}

fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    cfg: &TrainConfig,
    bias_corr1: f64,
    bias_corr2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i] + cfg.weight_decay * params[i];
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g;
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g * g;
        let mh = m[i] / bias_corr1;
        let vh = v[i] / bias_corr2;
        params[i] -= cfg.learning_rate * mh / (vh.sqrt() + 1e-8);
    }
}

/// Compare analytic gradients against central finite differences on
/// `checks` randomly chosen weights; returns the maximum relative error.
///
/// Weights feeding ReLU units whose batch pre-activations come within 1e-3
/// of the kink are skipped, since the two-sided difference straddles the
/// nondifferentiable point there.
pub fn gradient_check(
    ae: &DenseAutoencoder,
    batch: &[Vec<f64>],
    loss: Loss,
    seed: u64,
    checks: usize,
) -> Result<f64> {
    if batch.is_empty() || batch.len() > 8 {
        return Err(Error::Domain(
            "gradient check expects a batch of 1..=8 rows".into(),
        ));
    }
    ae.check_dim(batch, ae.input_dim())?;
    let (gw, _gb) = ae.gradients(batch, loss);

    // Kink margins per layer/unit over the batch.
    let num_layers = ae.num_layers();
    let mut margin: Vec<Vec<f64>> = (0..num_layers)
        .map(|l| vec![f64::INFINITY; ae.layer_dims[l + 1]])
        .collect();
    for row in batch {
        let pre = ae.preactivations(row);
        for l in 0..num_layers {
            if ae.activation_of(l) == Act::Relu {
                for (o, &z) in pre[l].iter().enumerate() {
                    margin[l][o] = margin[l][o].min(z.abs());
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1e-5;
    let mut max_rel = 0.0f64;
    let mut done = 0;
    let mut attempts = 0;
    let mut probe = ae.clone();
    while done < checks && attempts < checks * 50 {
        attempts += 1;
        let l = rng.gen_range(0..num_layers);
        let idx = rng.gen_range(0..ae.weights[l].len());
        let in_dim = ae.layer_dims[l];
        let unit = idx / in_dim;
        if ae.activation_of(l) == Act::Relu && margin[l][unit] < 1e-3 {
            continue;
        }
        let orig = ae.weights[l][idx];
        probe.weights[l][idx] = orig + step;
        let up = probe.evaluate_loss(batch, loss)?;
        probe.weights[l][idx] = orig - step;
        let down = probe.evaluate_loss(batch, loss)?;
        probe.weights[l][idx] = orig;
        let numeric = (up - down) / (2.0 * step);
        let analytic = gw[l][idx];
        let rel = (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-8);
        max_rel = max_rel.max(rel);
        done += 1;
    }
    if done < checks {
        return Err(Error::Numeric(
            "could not find enough weights away from ReLU kinks".into(),
        ));
    }
    Ok(max_rel)
}
