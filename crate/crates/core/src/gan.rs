//! Generative adversarial network trained on historical samples, used as the
//! scenario generator for the sample average approximation.
//!
//! Two generator/discriminator pairs are trained side by side from different
//! seeds. Training stops once the centroids of their generated samples are
//! within a fixed fraction of the centroid distance of the two untrained
//! generators.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{default_names, Dataset, Matrix};
use crate::error::{Error, Result};
use crate::nn::{adam_step, Activation, AdamState, Mlp};
use crate::seed::{derive_seed, rng_from_seed, SeededRng};

/// Clamp applied to probabilities inside logarithms.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorLoss {
    /// Minimize `-log D(G(z))`.
    #[default]
    NonSaturating,
    /// Minimize `log(1 - D(G(z)))` as in the original minimax game.
    Minimax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GanConfig {
    pub noise_dim: usize,
    /// Hidden widths of the generator; input is `noise_dim`, output the data dimension.
    pub generator_hidden: Vec<usize>,
    /// Hidden widths of the discriminator; the head is one sigmoid unit.
    pub discriminator_hidden: Vec<usize>,
    pub generator_lr: f64,
    pub discriminator_lr: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub d_steps_per_g_step: usize,
    /// One-sided smoothing weight on the real-sample term, in [0, 1).
    pub label_smoothing: f64,
    /// Twin centroid distance, relative to its untrained value, that stops training.
    pub stop_threshold_ratio: f64,
    pub eval_every: usize,
    pub n_eval: usize,
    pub seed_a: u64,
    pub seed_b: u64,
    /// Output-bias offset, in standardized units, that separates the twins'
    /// untrained generators: twin a starts at `+offset`, twin b at `-offset`
    /// along the diagonal.
    pub initial_offset: f64,
    pub generator_loss: GeneratorLoss,
    /// Clamp generated values at zero (demand-like data).
    pub nonnegative: bool,
}

impl Default for GanConfig {
    fn default() -> Self {
        Self {
            noise_dim: 4,
            generator_hidden: vec![32, 32],
            discriminator_hidden: vec![32, 32],
            generator_lr: 2e-4,
            discriminator_lr: 2e-4,
            adam_beta1: 0.5,
            adam_beta2: 0.999,
            batch_size: 32,
            max_epochs: 2000,
            d_steps_per_g_step: 1,
            label_smoothing: 0.0,
            stop_threshold_ratio: 0.05,
            eval_every: 10,
            n_eval: 1000,
            seed_a: 1,
            seed_b: 2,
            initial_offset: 1.0,
            generator_loss: GeneratorLoss::NonSaturating,
            nonnegative: false,
        }
    }
}

impl GanConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(format!("GAN config: {m}")));
        if self.noise_dim == 0 {
            return bad("noise_dim must be positive");
        }
        if self.batch_size == 0 || self.d_steps_per_g_step == 0 || self.eval_every == 0 {
            return bad("batch_size, d_steps_per_g_step and eval_every must be positive");
        }
        if !(0.0..1.0).contains(&self.label_smoothing) {
            return bad("label_smoothing must lie in [0, 1)");
        }
        if !(self.stop_threshold_ratio > 0.0 && self.stop_threshold_ratio <= 1.0) {
            return bad("stop_threshold_ratio must lie in (0, 1]");
        }
        if !(self.initial_offset.is_finite() && self.initial_offset >= 0.0) {
            return bad("initial_offset must be finite and non-negative");
        }
        if self.n_eval == 0 {
            return bad("n_eval must be positive");
        }
        if self.generator_hidden.contains(&0) || self.discriminator_hidden.contains(&0) {
            return bad("hidden widths must be positive");
        }
        Ok(())
    }

    fn generator_dims(&self, data_dim: usize) -> (Vec<usize>, Vec<Activation>) {
        let mut dims = vec![self.noise_dim];
        dims.extend(&self.generator_hidden);
        dims.push(data_dim);
        let mut acts = vec![Activation::leaky(); self.generator_hidden.len()];
        acts.push(Activation::Identity);
        (dims, acts)
    }

    fn discriminator_dims(&self, data_dim: usize) -> (Vec<usize>, Vec<Activation>) {
        let mut dims = vec![data_dim];
        dims.extend(&self.discriminator_hidden);
        dims.push(1);
        let mut acts = vec![Activation::leaky(); self.discriminator_hidden.len()];
        acts.push(Activation::Sigmoid);
        (dims, acts)
    }
}

/// Per-column affine map between data units and the standardized space the
/// networks operate in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(data: &Dataset) -> Result<Self> {
        let std = data.column_std();
        if let Some(j) = std.iter().position(|s| !(*s > 1e-12)) {
            return Err(Error::invalid(format!(
                "column {j} ({}) has zero variance",
                data.names()[j]
            )));
        }
        Ok(Self {
            mean: data.column_means(),
            std,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    fn forward(&self, data: &Matrix) -> Matrix {
        let mut out = data.clone();
        for r in 0..out.rows() {
            for (j, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.std[j];
            }
        }
        out
    }

    fn inverse_in_place(&self, data: &mut Matrix) {
        for r in 0..data.rows() {
            for (j, v) in data.row_mut(r).iter_mut().enumerate() {
                *v = *v * self.std[j] + self.mean[j];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub d_loss: f64,
    pub g_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinCheck {
    pub epoch: usize,
    pub distance: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrainingTrace {
    pub epochs: Vec<EpochStats>,
    pub twin: Vec<TwinCheck>,
    pub initial_distance: f64,
    pub stopped_epoch: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanModel {
    pub generator: Mlp,
    pub discriminator: Mlp,
    pub noise_dim: usize,
    pub standardizer: Standardizer,
    pub names: Vec<String>,
    pub nonnegative: bool,
    pub trace: TrainingTrace,
}

impl GanModel {
    /// Assembles a model from trained (or hand-built) networks.
    pub fn from_parts(
        generator: Mlp,
        discriminator: Mlp,
        standardizer: Standardizer,
        names: Vec<String>,
    ) -> Result<Self> {
        let data_dim = generator.output_dim();
        if discriminator.input_dim() != data_dim || discriminator.output_dim() != 1 {
            return Err(Error::Dimension {
                context: "discriminator input",
                expected: data_dim,
                actual: discriminator.input_dim(),
            });
        }
        if standardizer.mean.len() != data_dim || names.len() != data_dim {
            return Err(Error::Dimension {
                context: "standardizer/names",
                expected: data_dim,
                actual: standardizer.mean.len(),
            });
        }
        Ok(Self {
            noise_dim: generator.input_dim(),
            generator,
            discriminator,
            standardizer,
            names,
            nonnegative: false,
            trace: TrainingTrace::default(),
        })
    }

    pub fn data_dim(&self) -> usize {
        self.generator.output_dim()
    }
}

fn mean_log(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let (mut s, mut n) = (0.0, 0);
    for v in values {
        s += v.clamp(PROB_EPS, 1.0).ln();
        n += 1;
    }
    (s / n.max(1) as f64, n)
}

/// Discriminator and (non-saturating) generator losses from discriminator
/// outputs on real and generated samples.
///
/// `d_loss = -mean[(1 - s) log D(x)] - mean[log(1 - D(G(z)))]`,
/// `g_loss = -mean[log D(G(z))]`, probabilities clamped to `[ε, 1 - ε]`.
pub fn gan_losses(d_real: &[f64], d_fake: &[f64], label_smoothing: f64) -> Result<(f64, f64)> {
    if d_real.is_empty() || d_fake.is_empty() {
        return Err(Error::invalid("GAN losses need non-empty batches"));
    }
    let clamp = |p: f64| p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    let (real_term, _) = mean_log(d_real.iter().map(|&p| clamp(p)));
    let (fake_term, _) = mean_log(d_fake.iter().map(|&p| 1.0 - clamp(p)));
    let (g_term, _) = mean_log(d_fake.iter().map(|&p| clamp(p)));
    let d_loss = -(1.0 - label_smoothing) * real_term - fake_term;
    let g_loss = -g_term;
    if !d_loss.is_finite() || !g_loss.is_finite() {
        return Err(Error::numeric("GAN losses"));
    }
    Ok((d_loss, g_loss))
}

/// Optimal discriminator for a fixed generator, `p_data / (p_data + p_g)`.
pub fn optimal_discriminator(p_data: f64, p_g: f64) -> Result<f64> {
    if !(p_data >= 0.0 && p_g >= 0.0) {
        return Err(Error::invalid("densities must be non-negative"));
    }
    if p_data + p_g == 0.0 {
        return Err(Error::invalid("both densities are zero"));
    }
    Ok(p_data / (p_data + p_g))
}

fn noise_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("sized buffer")
}

const SAMPLE_CHUNK: usize = 1024;

/// Maps `noise` through the generator and back to data units.
fn generate(model: &GanModel, noise: &Matrix) -> Result<Matrix> {
    let mut out = model.generator.predict(noise)?;
    model.standardizer.inverse_in_place(&mut out);
    if model.nonnegative {
        out.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0));
    }
    Ok(out)
}

/// Draws `n` i.i.d. standard-normal noise vectors and returns the generated
/// samples in data units. Deterministic in `seed`.
pub fn sample(model: &GanModel, n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng_from_seed(seed);
    let d = model.data_dim();
    let mut data = Vec::with_capacity(n * d);
    let mut left = n;
    while left > 0 {
        let take = left.min(SAMPLE_CHUNK);
        let noise = noise_matrix(&mut rng, take, model.noise_dim);
        data.extend_from_slice(generate(model, &noise)?.as_slice());
        left -= take;
    }
    Dataset::new(model.names.clone(), Matrix::from_vec(n, d, data)?)
}

fn centroid_of(model: &GanModel, n_eval: usize, seed: u64) -> Result<Vec<f64>> {
    let samples = sample(model, n_eval, seed)?;
    Ok(samples.column_means())
}

/// Euclidean distance between the centroids of `n_eval` samples generated
/// by each model. Both models consume the same noise draws, so identical
/// models are at distance exactly zero.
pub fn twin_distance(a: &GanModel, b: &GanModel, n_eval: usize, seed: u64) -> Result<f64> {
    if n_eval == 0 {
        return Err(Error::invalid("twin distance needs n_eval >= 1"));
    }
    if a.data_dim() != b.data_dim() || a.noise_dim != b.noise_dim {
        return Err(Error::Dimension {
            context: "twin models",
            expected: a.data_dim(),
            actual: b.data_dim(),
        });
    }
    let ca = centroid_of(a, n_eval, seed)?;
    let cb = centroid_of(b, n_eval, seed)?;
    Ok(ca
        .iter()
        .zip(&cb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

struct Trainee {
    model: GanModel,
    adam_g: AdamState,
    adam_d: AdamState,
    rng: SeededRng,
}

impl Trainee {
    fn new(
        config: &GanConfig,
        seed: u64,
        offset: f64,
        standardizer: Standardizer,
        names: Vec<String>,
    ) -> Result<Self> {
        let data_dim = names.len();
        let mut init = rng_from_seed(derive_seed(seed, &[0]));
        let (gd, ga) = config.generator_dims(data_dim);
        let (dd, da) = config.discriminator_dims(data_dim);
        let mut generator = Mlp::glorot(gd, ga, &mut init)?;
        let last = generator.num_layers() - 1;
        let shift = offset / (data_dim as f64).sqrt();
        generator.biases_mut(last).fill(shift);
        let discriminator = Mlp::glorot(dd, da, &mut init)?;
        let mut model = GanModel::from_parts(generator, discriminator, standardizer, names)?;
        model.nonnegative = config.nonnegative;
        let adam_g = AdamState::with_betas(
            model.generator.param_count(),
            config.generator_lr,
            config.adam_beta1,
            config.adam_beta2,
        );
        let adam_d = AdamState::with_betas(
            model.discriminator.param_count(),
            config.discriminator_lr,
            config.adam_beta1,
            config.adam_beta2,
        );
        Ok(Self {
            model,
            adam_g,
            adam_d,
            rng: rng_from_seed(derive_seed(seed, &[1])),
        })
    }

    fn discriminator_step(&mut self, real: &Matrix, config: &GanConfig) -> Result<f64> {
        let b = real.rows();
        let noise = noise_matrix(&mut self.rng, b, config.noise_dim);
        let fake = self.model.generator.predict(&noise)?;
        let d = &self.model.discriminator;
        let cache_r = d.forward(real)?;
        let cache_f = d.forward(&fake)?;
        let pr = cache_r.output().as_slice();
        let pf = cache_f.output().as_slice();
        let (d_loss, _) = gan_losses(pr, pf, config.label_smoothing)?;
        let scale = 1.0 / b as f64;
        let grad_r: Vec<f64> = pr
            .iter()
            .map(|&p| -(1.0 - config.label_smoothing) * scale / p.max(PROB_EPS))
            .collect();
        let grad_f: Vec<f64> = pf
            .iter()
            .map(|&p| scale / (1.0 - p).max(PROB_EPS))
            .collect();
        let mut grads = d
            .backward(&cache_r, &Matrix::from_vec(b, 1, grad_r)?)?
            .params;
        let gf = d
            .backward(&cache_f, &Matrix::from_vec(b, 1, grad_f)?)?
            .params;
        grads.iter_mut().zip(&gf).for_each(|(a, b)| *a += b);
        adam_step(
            self.model.discriminator.params_mut(),
            &grads,
            &mut self.adam_d,
        )?;
        Ok(d_loss)
    }

    fn generator_step(&mut self, b: usize, config: &GanConfig) -> Result<f64> {
        let noise = noise_matrix(&mut self.rng, b, config.noise_dim);
        let g = &self.model.generator;
        let d = &self.model.discriminator;
        let cache_g = g.forward(&noise)?;
        let cache_d = d.forward(cache_g.output())?;
        let pf = cache_d.output().as_slice();
        let scale = 1.0 / b as f64;
        let (loss, grad): (f64, Vec<f64>) = match config.generator_loss {
            GeneratorLoss::NonSaturating => (
                -mean_log(pf.iter().cloned()).0,
                pf.iter().map(|&p| -scale / p.max(PROB_EPS)).collect(),
            ),
            GeneratorLoss::Minimax => (
                mean_log(pf.iter().map(|&p| 1.0 - p)).0,
                pf.iter()
                    .map(|&p| -scale / (1.0 - p).max(PROB_EPS))
                    .collect(),
            ),
        };
        let through_d = d.backward(&cache_d, &Matrix::from_vec(b, 1, grad)?)?;
        let grads = g.backward(&cache_g, &through_d.input)?.params;
        adam_step(self.model.generator.params_mut(), &grads, &mut self.adam_g)?;
        Ok(loss)
    }

    fn epoch(&mut self, data: &Matrix, config: &GanConfig) -> Result<(f64, f64)> {
        let mut order: Vec<usize> = (0..data.rows()).collect();
        order.shuffle(&mut self.rng);
        let batches = data.rows() / config.batch_size;
        let (mut d_sum, mut g_sum) = (0.0, 0.0);
        for chunk in order.chunks_exact(config.batch_size).take(batches) {
            let mut real = Matrix::zeros(chunk.len(), data.cols());
            for (r, &i) in chunk.iter().enumerate() {
                real.row_mut(r).copy_from_slice(data.row(i));
            }
            let mut d_loss = 0.0;
            for _ in 0..config.d_steps_per_g_step {
                d_loss = self.discriminator_step(&real, config)?;
            }
            d_sum += d_loss;
            g_sum += self.generator_step(chunk.len(), config)?;
        }
        Ok((d_sum / batches as f64, g_sum / batches as f64))
    }
}

/// Trains twin GANs on `data` and returns the `seed_a` model.
pub fn train_gan(data: &Dataset, config: &GanConfig) -> Result<GanModel> {
    config.validate()?;
    if data.len() < config.batch_size {
        return Err(Error::invalid(format!(
            "need at least batch_size = {} rows, got {}",
            config.batch_size,
            data.len()
        )));
    }
    let standardizer = Standardizer::fit(data)?;
    let scaled = standardizer.forward(data.values());
    let names = if data.names().is_empty() {
        default_names(data.dim())
    } else {
        data.names().to_vec()
    };
    let mut a = Trainee::new(
        config,
        config.seed_a,
        config.initial_offset,
        standardizer.clone(),
        names.clone(),
    )?;
    let mut b = Trainee::new(
        config,
        config.seed_b,
        -config.initial_offset,
        standardizer,
        names,
    )?;

    let eval_seed =
        |epoch: usize| derive_seed(config.seed_a, &[u64::MAX, config.seed_b, epoch as u64]);
    let mut trace = TrainingTrace::default();
    let initial = twin_distance(&a.model, &b.model, config.n_eval, eval_seed(0))?;
    trace.initial_distance = initial;
    trace.twin.push(TwinCheck {
        epoch: 0,
        distance: initial,
        ratio: if initial > 0.0 { 1.0 } else { 0.0 },
    });
    let threshold = config.stop_threshold_ratio * initial;
    if initial <= threshold {
        trace.converged = true;
    } else {
        for epoch in 1..=config.max_epochs {
            let (d_loss, g_loss) = a.epoch(&scaled, config).map_err(|e| at_epoch(e, epoch))?;
            b.epoch(&scaled, config).map_err(|e| at_epoch(e, epoch))?;
            if !d_loss.is_finite() || !g_loss.is_finite() {
                return Err(Error::numeric(format!("GAN loss at epoch {epoch}")));
            }
            trace.epochs.push(EpochStats {
                epoch,
                d_loss,
                g_loss,
            });
            trace.stopped_epoch = epoch;
            if epoch % config.eval_every == 0 || epoch == config.max_epochs {
                let dist = twin_distance(&a.model, &b.model, config.n_eval, eval_seed(epoch))?;
                trace.twin.push(TwinCheck {
                    epoch,
                    distance: dist,
                    ratio: dist / initial,
                });
                if dist <= threshold {
                    trace.converged = true;
                    break;
                }
            }
        }
    }
    let mut model = a.model;
    model.trace = trace;
    Ok(model)
}

fn at_epoch(err: Error, epoch: usize) -> Error {
    match err {
        Error::Numeric { context } => Error::numeric(format!("{context} at epoch {epoch}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn losses_at_equilibrium() {
        let (d, g) = gan_losses(&[0.5; 4], &[0.5; 3], 0.0).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((d - 2.0 * ln2).abs() < 1e-15);
        assert!((g - ln2).abs() < 1e-15);
    }

    #[test]
    fn losses_direct_arithmetic() {
        let (d, g) = gan_losses(&[0.8], &[0.3], 0.0).unwrap();
        assert!((d + (0.8f64.ln() + 0.7f64.ln())).abs() < 1e-15);
        assert!((g + 0.3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn perfect_discriminator_limit() {
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let (d, _) = gan_losses(&[1.0 - eps], &[eps], 0.0).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-5);
        assert!(gan_losses(&[], &[0.5], 0.0).is_err());
    }

    #[test]
    fn label_smoothing_scales_real_term() {
        let (d, _) = gan_losses(&[0.8], &[0.3], 0.1).unwrap();
        assert!((d + (0.9 * 0.8f64.ln() + 0.7f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn optimal_discriminator_cases() {
        assert_eq!(optimal_discriminator(0.4, 0.4).unwrap(), 0.5);
        assert_eq!(optimal_discriminator(2.0, 0.0).unwrap(), 1.0);
        assert_eq!(optimal_discriminator(1.0, 3.0).unwrap(), 0.25);
        assert!(optimal_discriminator(0.0, 0.0).is_err());
        for lambda in [1e-3, 0.5, 7.0, 1e6] {
            let scaled = optimal_discriminator(0.3 * lambda, 0.9 * lambda).unwrap();
            assert!((scaled - 0.25).abs() < 1e-15);
        }
    }

    fn constant_model(c: &[f64]) -> GanModel {
        let d = c.len();
        let g = Mlp::from_parts(
            vec![2, d],
            vec![Activation::Identity],
            &[Matrix::zeros(d, 2)],
            &[c.to_vec()],
        )
        .unwrap();
        let disc = Mlp::zeros(vec![d, 1], vec![Activation::Sigmoid]).unwrap();
        GanModel::from_parts(g, disc, Standardizer::identity(d), default_names(d)).unwrap()
    }

    #[test]
    fn twin_distance_of_constant_generators() {
        let a = constant_model(&[1.0, 2.0]);
        let b = constant_model(&[4.0, 6.0]);
        assert!((twin_distance(&a, &b, 10, 3).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(twin_distance(&a, &a, 10, 3).unwrap(), 0.0);
        assert!(twin_distance(&a, &b, 0, 3).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_seed_sensitive() {
        let mut rng = rng_from_seed(9);
        let g = Mlp::glorot(
            vec![2, 8, 2],
            vec![Activation::leaky(), Activation::Identity],
            &mut rng,
        )
        .unwrap();
        let disc = Mlp::zeros(vec![2, 1], vec![Activation::Sigmoid]).unwrap();
        let m = GanModel::from_parts(g, disc, Standardizer::identity(2), default_names(2)).unwrap();
        let s0 = sample(&m, 0, 1).unwrap();
        assert!(s0.is_empty());
        assert_eq!(s0.dim(), 2);
        assert_eq!(sample(&m, 50, 1).unwrap(), sample(&m, 50, 1).unwrap());
        assert_ne!(sample(&m, 50, 1).unwrap(), sample(&m, 50, 2).unwrap());
        // chunk boundaries do not change the stream
        assert_eq!(
            sample(&m, 3000, 5).unwrap().row(2500),
            sample(&m, 2600, 5).unwrap().row(2500)
        );
    }

    #[test]
    fn identical_seeds_stop_immediately() {
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|i| vec![i as f64, (i * i % 17) as f64])
            .collect();
        let data = Dataset::from_rows(&rows).unwrap();
        let cfg = GanConfig {
            seed_a: 5,
            seed_b: 5,
            initial_offset: 0.0,
            batch_size: 16,
            ..GanConfig::default()
        };
        let m = train_gan(&data, &cfg).unwrap();
        assert_eq!(m.trace.initial_distance, 0.0);
        assert!(m.trace.converged);
        assert!(m.trace.epochs.is_empty());
    }

    #[test]
    fn offset_separates_untrained_twins() {
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|i| vec![i as f64, (i * i % 17) as f64])
            .collect();
        let data = Dataset::from_rows(&rows).unwrap();
        let cfg = GanConfig {
            seed_a: 5,
            seed_b: 5,
            max_epochs: 0,
            ..GanConfig::default()
        };
        let m = train_gan(&data, &cfg).unwrap();
        // same weights, biases at +1 and -1 along the diagonal: distance 2 in
        // standardized units
        let std = data.column_std();
        let expect = 2.0 * ((std[0] * std[0] + std[1] * std[1]) / 2.0).sqrt();
        assert!((m.trace.initial_distance - expect).abs() < 1e-9 * expect);
        assert!(!m.trace.converged);
    }

    #[test]
    fn degenerate_column_rejected() {
        let rows: Vec<Vec<f64>> = (0..80).map(|i| vec![i as f64, 3.0]).collect();
        let data = Dataset::from_rows(&rows).unwrap();
        let cfg = GanConfig {
            batch_size: 16,
            ..GanConfig::default()
        };
        assert!(matches!(train_gan(&data, &cfg), Err(Error::Invalid(_))));
    }
}
