//! Dense multilayer perceptrons with manual backpropagation and Adam.
//!
//! Parameters of a network live in one flat vector. Layer `l` owns a weight
//! block of shape `out x in` (row-major) followed by its `out` biases, so
//! gradients and optimizer moments share the same layout.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::error::{Error, Result};

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Relu,
    LeakyRelu { slope: f64 },
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn leaky() -> Self {
        Activation::LeakyRelu {
            slope: DEFAULT_LEAKY_SLOPE,
        }
    }

    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::LeakyRelu { slope } => {
                if z > 0.0 {
                    z
                } else {
                    slope * z
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => {
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output `a`.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu { slope } => {
                if a > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layer_dims: Vec<usize>,
    activations: Vec<Activation>,
    params: Vec<f64>,
}

/// Activations recorded by [`Mlp::forward`]; entry 0 is the input batch and
/// the last entry is the network output.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    layers: Vec<Matrix>,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.layers.last().expect("cache holds at least the input")
    }

    pub fn input(&self) -> &Matrix {
        &self.layers[0]
    }
}

#[derive(Debug, Clone)]
pub struct Gradients {
    /// Same layout as [`Mlp::params`].
    pub params: Vec<f64>,
    /// Gradient of the loss with respect to the network input.
    pub input: Matrix,
}

impl Mlp {
    /// Network with all parameters zero.
    pub fn zeros(layer_dims: Vec<usize>, activations: Vec<Activation>) -> Result<Self> {
        if layer_dims.is_empty() || layer_dims.contains(&0) {
            return Err(Error::invalid(
                "layer dimensions must be a non-empty list of positive integers",
            ));
        }
        if activations.len() + 1 != layer_dims.len() {
            return Err(Error::Dimension {
                context: "activations per layer",
                expected: layer_dims.len() - 1,
                actual: activations.len(),
            });
        }
        let count = layer_dims.windows(2).map(|w| w[1] * w[0] + w[1]).sum();
        Ok(Self {
            layer_dims,
            activations,
            params: vec![0.0; count],
        })
    }

    /// Glorot-uniform weights, zero biases.
    pub fn glorot<R: Rng + ?Sized>(
        layer_dims: Vec<usize>,
        activations: Vec<Activation>,
        rng: &mut R,
    ) -> Result<Self> {
        let mut net = Self::zeros(layer_dims, activations)?;
        for l in 0..net.num_layers() {
            let (fan_in, fan_out) = (net.layer_dims[l], net.layer_dims[l + 1]);
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in net.weights_mut(l) {
                *w = rng.random_range(-s..=s);
            }
        }
        Ok(net)
    }

    pub fn from_parts(
        layer_dims: Vec<usize>,
        activations: Vec<Activation>,
        weights: &[Matrix],
        biases: &[Vec<f64>],
    ) -> Result<Self> {
        let mut net = Self::zeros(layer_dims, activations)?;
        if weights.len() != net.num_layers() || biases.len() != net.num_layers() {
            return Err(Error::Dimension {
                context: "layer parameter blocks",
                expected: net.num_layers(),
                actual: weights.len().min(biases.len()),
            });
        }
        for l in 0..net.num_layers() {
            let (inp, out) = (net.layer_dims[l], net.layer_dims[l + 1]);
            if weights[l].rows() != out || weights[l].cols() != inp {
                return Err(Error::Dimension {
                    context: "weight matrix shape",
                    expected: out * inp,
                    actual: weights[l].rows() * weights[l].cols(),
                });
            }
            if biases[l].len() != out {
                return Err(Error::Dimension {
                    context: "bias length",
                    expected: out,
                    actual: biases[l].len(),
                });
            }
            net.weights_mut(l).copy_from_slice(weights[l].as_slice());
            net.biases_mut(l).copy_from_slice(&biases[l]);
        }
        if !net.params.iter().all(|p| p.is_finite()) {
            return Err(Error::numeric("network parameters"));
        }
        Ok(net)
    }

    /// Rebuilds a network from a flat parameter vector.
    pub fn from_flat(
        layer_dims: Vec<usize>,
        activations: Vec<Activation>,
        params: Vec<f64>,
    ) -> Result<Self> {
        let mut net = Self::zeros(layer_dims, activations)?;
        if params.len() != net.params.len() {
            return Err(Error::Dimension {
                context: "flat parameter vector",
                expected: net.params.len(),
                actual: params.len(),
            });
        }
        if !params.iter().all(|p| p.is_finite()) {
            return Err(Error::numeric("network parameters"));
        }
        net.params = params;
        Ok(net)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn num_layers(&self) -> usize {
        self.layer_dims.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn offset(&self, layer: usize) -> usize {
        self.layer_dims[..=layer]
            .windows(2)
            .map(|w| w[1] * w[0] + w[1])
            .sum()
    }

    fn block(&self, layer: usize) -> (usize, usize, usize) {
        let (inp, out) = (self.layer_dims[layer], self.layer_dims[layer + 1]);
        (self.offset(layer), inp, out)
    }

    pub fn weights(&self, layer: usize) -> &[f64] {
        let (off, inp, out) = self.block(layer);
        &self.params[off..off + inp * out]
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut [f64] {
        let (off, inp, out) = self.block(layer);
        &mut self.params[off..off + inp * out]
    }

    pub fn biases(&self, layer: usize) -> &[f64] {
        let (off, inp, out) = self.block(layer);
        &self.params[off + inp * out..off + inp * out + out]
    }

    pub fn biases_mut(&mut self, layer: usize) -> &mut [f64] {
        let (off, inp, out) = self.block(layer);
        &mut self.params[off + inp * out..off + inp * out + out]
    }

    pub fn forward(&self, batch: &Matrix) -> Result<ForwardCache> {
        if batch.cols() != self.input_dim() {
            return Err(Error::Dimension {
                context: "network input",
                expected: self.input_dim(),
                actual: batch.cols(),
            });
        }
        let mut layers = Vec::with_capacity(self.layer_dims.len());
        layers.push(batch.clone());
        for l in 0..self.num_layers() {
            let (off, inp, out) = self.block(l);
            let w = &self.params[off..off + inp * out];
            let b = &self.params[off + inp * out..off + inp * out + out];
            let act = self.activations[l];
            let prev = &layers[l];
            let mut next = Matrix::zeros(prev.rows(), out);
            for r in 0..prev.rows() {
                let x = prev.row(r);
                let y = next.row_mut(r);
                for (o, yo) in y.iter_mut().enumerate() {
                    let wo = &w[o * inp..(o + 1) * inp];
                    let z = b[o] + wo.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                    *yo = act.apply(z);
                }
            }
            if !next.all_finite() {
                return Err(Error::numeric(format!("activation of layer {l}")));
            }
            layers.push(next);
        }
        Ok(ForwardCache { layers })
    }

    /// Forward pass returning only the output.
    pub fn predict(&self, batch: &Matrix) -> Result<Matrix> {
        let mut cache = self.forward(batch)?;
        Ok(cache.layers.pop().unwrap())
    }

    /// Backpropagates `grad_output` (dLoss/dOutput, one row per sample)
    /// through the activations recorded in `cache`.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &Matrix) -> Result<Gradients> {
        if cache.layers.len() != self.layer_dims.len()
            || cache
                .layers
                .iter()
                .zip(&self.layer_dims)
                .any(|(m, &d)| m.cols() != d)
        {
            return Err(Error::invalid(
                "forward cache does not match the network shape",
            ));
        }
        let batch = cache.layers[0].rows();
        if grad_output.rows() != batch || grad_output.cols() != self.output_dim() {
            return Err(Error::Dimension {
                context: "output gradient",
                expected: batch * self.output_dim(),
                actual: grad_output.rows() * grad_output.cols(),
            });
        }
        let mut grads = vec![0.0; self.params.len()];
        let mut upstream = grad_output.clone();
        for l in (0..self.num_layers()).rev() {
            let (off, inp, out) = self.block(l);
            let w = &self.params[off..off + inp * out];
            let act = self.activations[l];
            let a_out = &cache.layers[l + 1];
            let a_in = &cache.layers[l];
            let mut delta = upstream;
            for r in 0..batch {
                let d = delta.row_mut(r);
                for (dv, av) in d.iter_mut().zip(a_out.row(r)) {
                    *dv *= act.derivative_from_output(*av);
                }
            }
            let (gw, gb) = grads[off..off + inp * out + out].split_at_mut(inp * out);
            let mut prev = Matrix::zeros(batch, inp);
            for r in 0..batch {
                let d = delta.row(r);
                let x = a_in.row(r);
                let p = prev.row_mut(r);
                for (o, &dv) in d.iter().enumerate() {
                    if dv == 0.0 {
                        continue;
                    }
                    gb[o] += dv;
                    let row_w = &w[o * inp..(o + 1) * inp];
                    let row_g = &mut gw[o * inp..(o + 1) * inp];
                    for i in 0..inp {
                        row_g[i] += dv * x[i];
                        p[i] += dv * row_w[i];
                    }
                }
            }
            upstream = prev;
        }
        if !grads.iter().all(|g| g.is_finite()) {
            return Err(Error::numeric("parameter gradients"));
        }
        Ok(Gradients {
            params: grads,
            input: upstream,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
}

impl AdamState {
    pub fn new(param_count: usize, learning_rate: f64) -> Self {
        Self::with_betas(param_count, learning_rate, 0.9, 0.999)
    }

    pub fn with_betas(param_count: usize, learning_rate: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            first_moment: vec![0.0; param_count],
            second_moment: vec![0.0; param_count],
            step_count: 0,
            beta1,
            beta2,
            epsilon: 1e-8,
            learning_rate,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() || state.first_moment.len() != params.len() {
        return Err(Error::Dimension {
            context: "adam parameter/gradient lengths",
            expected: params.len(),
            actual: grads.len(),
        });
    }
    if !grads.iter().all(|g| g.is_finite()) {
        return Err(Error::numeric("adam gradient"));
    }
    state.step_count += 1;
    let t = state.step_count as i32;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    for (((p, &g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.first_moment.iter_mut())
        .zip(state.second_moment.iter_mut())
    {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
    }
    Ok(())
}

/// Scalar losses used by [`grad_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Sum of all outputs.
    Sum,
    /// Half the sum of squared outputs.
    HalfSquared,
}

impl LossKind {
    fn value(self, out: &Matrix) -> f64 {
        match self {
            LossKind::Sum => out.as_slice().iter().sum(),
            LossKind::HalfSquared => 0.5 * out.as_slice().iter().map(|v| v * v).sum::<f64>(),
        }
    }

    fn gradient(self, out: &Matrix) -> Matrix {
        let mut g = out.clone();
        match self {
            LossKind::Sum => g.as_mut_slice().iter_mut().for_each(|v| *v = 1.0),
            LossKind::HalfSquared => {}
        }
        g
    }
}

pub const MAX_GRAD_CHECK_PARAMS: usize = 2_000;

/// Largest relative discrepancy between backpropagated gradients and
/// central finite differences (step 1e-5) over every parameter.
///
/// The relative error of one parameter is `|a - n| / max(|a| + |n|, 1e-6)`.
pub fn grad_check(net: &Mlp, loss: LossKind, batch: &Matrix) -> Result<f64> {
    if net.param_count() > MAX_GRAD_CHECK_PARAMS {
        return Err(Error::invalid(format!(
            "grad_check supports at most {MAX_GRAD_CHECK_PARAMS} parameters, network has {}",
            net.param_count()
        )));
    }
    let cache = net.forward(batch)?;
    let analytic = net.backward(&cache, &loss.gradient(cache.output()))?.params;
    let h = 1e-5;
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let base = probe.params[i];
        probe.params[i] = base + h;
        let up = loss.value(&probe.predict(batch)?);
        probe.params[i] = base - h;
        let down = loss.value(&probe.predict(batch)?);
        probe.params[i] = base;
        let numeric = (up - down) / (2.0 * h);
        let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    Ok(worst)
}
