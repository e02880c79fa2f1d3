//! WGAN-GP adversarial training over a classical or quantum generator.
//!
//! The critic descends
//! `L_D = mean D(real) - mean D(fake) + lambda * mean (||grad_x D(x_hat)|| - 1)^2`
//! (so the expectation difference is maximized in the usual adversarial
//! orientation while the penalty is always driven toward zero), and the
//! generator descends `L_G = mean D(G(xi))`. Interpolates x_hat lie on
//! straight lines between real and fake rows with one uniform draw per row.
//! Both players use Adam with bias correction. Per batch the critic takes
//! `n_critic` steps, then the generator takes one.

use std::io::Write as IoWrite;
use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{self, GeneratorConfig, StyleParams};
use crate::latent_data::LatentDataset;
use crate::neural::{MlpDiscriminator, MlpGenerator, Mode};
use crate::qgrad;
use crate::rng::SeedStream;
use crate::scalar::Real;
use crate::{argument_error, config_error, Result};

/// Which generator plays against the critic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Classical,
    QuantumSimple,
    QuantumBel,
}

/// Hyperparameters of the adversarial loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub lambda_gp: f64,
    /// Critic updates per generator update.
    pub n_critic: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub generator_kind: GeneratorKind,
    pub adam_epsilon: f64,
    /// Uniform(-s, s) initialization range of the style tensors.
    pub style_init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 2e-4,
            beta1: 0.5,
            beta2: 0.9,
            lambda_gp: 10.0,
            n_critic: 1,
            epochs: 100,
            batch_size: 64,
            seed: 0,
            generator_kind: GeneratorKind::Classical,
            adam_epsilon: 1e-8,
            style_init_scale: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(config_error!("learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(config_error!("beta1 and beta2 must lie in (0, 1)"));
        }
        if self.lambda_gp < 0.0 {
            return Err(config_error!("lambda_gp must be non-negative"));
        }
        if self.n_critic == 0 {
            return Err(config_error!("n_critic must be positive"));
        }
        if self.batch_size == 0 {
            return Err(config_error!("batch_size must be positive"));
        }
        if self.adam_epsilon <= 0.0 {
            return Err(config_error!("adam_epsilon must be positive"));
        }
        Ok(())
    }
}

/// Adam accumulator over one flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    m: Vec<T>,
    v: Vec<T>,
    step: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(n_params: usize) -> Self {
        Self { m: vec![T::zero(); n_params], v: vec![T::zero(); n_params], step: 0 }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected update in place.
    pub fn update(&mut self, params: &mut [T], grads: &[T], config: &TrainConfig) {
        assert_eq!(params.len(), grads.len());
        assert_eq!(params.len(), self.m.len(), "Adam state sized for different parameters");
        self.step += 1;
        let lr = T::of(config.learning_rate);
        let b1 = T::of(config.beta1);
        let b2 = T::of(config.beta2);
        let eps = T::of(config.adam_epsilon);
        let bc1 = T::one() - b1.powi(self.step as i32);
        let bc2 = T::one() - b2.powi(self.step as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + (T::one() - b1) * g;
            self.v[i] = b2 * self.v[i] + (T::one() - b2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

/// Straight-line interpolates with one uniform draw per row.
pub fn interpolate<T: Real, R: Rng + ?Sized>(
    real: &Array2<T>,
    fake: &Array2<T>,
    rng: &mut R,
) -> Result<Array2<T>> {
    let us: Vec<T> = (0..real.nrows()).map(|_| T::uniform_01(rng)).collect();
    interpolate_with(real, fake, &us)
}

/// Interpolates with caller-supplied per-row coefficients.
pub fn interpolate_with<T: Real>(real: &Array2<T>, fake: &Array2<T>, us: &[T]) -> Result<Array2<T>> {
    if real.dim() != fake.dim() {
        return Err(argument_error!(
            "interpolation shapes differ: {:?} vs {:?}",
            real.dim(),
            fake.dim()
        ));
    }
    if us.len() != real.nrows() {
        return Err(argument_error!("need one coefficient per row"));
    }
    let mut out = Array2::zeros(real.dim());
    for (i, &u) in us.iter().enumerate() {
        let r = real.row(i);
        let f = fake.row(i);
        let mut o = out.row_mut(i);
        for j in 0..r.len() {
            o[j] = u * r[j] + (T::one() - u) * f[j];
        }
    }
    Ok(out)
}

/// Either player of the latent game.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator<T> {
    Classical(MlpGenerator<T>),
    Quantum { config: GeneratorConfig, params: StyleParams<T> },
}

impl<T: Real> Generator<T> {
    pub fn new_classical<R: Rng + ?Sized>(latent_dim: usize, rng: &mut R) -> Self {
        Generator::Classical(MlpGenerator::new(latent_dim, rng))
    }

    pub fn new_quantum<R: Rng + ?Sized>(
        config: GeneratorConfig,
        init_scale: T,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        let params =
            StyleParams::random(config.kind, config.n_qb, config.n_layers, init_scale, rng);
        Ok(Generator::Quantum { config, params })
    }

    pub fn latent_dim(&self) -> usize {
        match self {
            Generator::Classical(g) => g.latent_dim(),
            Generator::Quantum { config, .. } => config.latent_dim(),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Generator::Classical(g) => g.param_count(),
            Generator::Quantum { params, .. } => params.param_count(),
        }
    }

    /// Sample a batch during training (classical batch norm in Train mode).
    pub fn sample_train<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<Array2<T>> {
        match self {
            Generator::Classical(g) => {
                let noise = normal_noise(n, g.latent_dim(), rng);
                g.forward(&noise, Mode::Train)
            }
            Generator::Quantum { config, params } => ansatz::generate_batch(config, params, n, rng),
        }
    }

    /// Sample a batch for inference (classical batch norm in Eval mode,
    /// optional finite-shot readout for the quantum circuits).
    pub fn sample_eval<R: Rng + ?Sized>(
        &self,
        n: usize,
        shots: Option<u64>,
        rng: &mut R,
    ) -> Result<Array2<T>> {
        if n == 0 {
            return Err(argument_error!("sample count must be positive"));
        }
        match self {
            Generator::Classical(g) => {
                if shots.is_some() {
                    return Err(argument_error!("shot budgets only apply to quantum generators"));
                }
                let noise = normal_noise(n, g.latent_dim(), rng);
                let mut g = g.clone();
                g.forward(&noise, Mode::Eval)
            }
            Generator::Quantum { config, params } => {
                let mut out = Array2::zeros((n, config.latent_dim()));
                for mut row in out.rows_mut() {
                    let noise = ansatz::sample_noise::<T, R>(config, rng);
                    let latent = match shots {
                        None => ansatz::generate_latent(config, params, &noise)?,
                        Some(s) => ansatz::generate_latent_shots(config, params, &noise, s, rng)?,
                    };
                    row.assign(&Array1::from_vec(latent));
                }
                Ok(out)
            }
        }
    }
}

impl<T: Real> Generator<T> {
    /// Persist the generator; the file header records which kind it is.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        match self {
            Generator::Classical(g) => g.save(path),
            Generator::Quantum { params, .. } => params.save(path),
        }
    }
}

/// Load a generator checkpoint. Quantum checkpoints carry only the style
/// tensors, so the readout/scale configuration must be supplied alongside.
pub fn load_generator<T: Real>(
    path: &std::path::Path,
    quantum: Option<&GeneratorConfig>,
) -> Result<Generator<T>> {
    let mut first_line = String::new();
    {
        use std::io::BufRead;
        let mut reader = std::io::BufReader::new(std::fs::File::open(path)?);
        reader.read_line(&mut first_line)?;
    }
    if first_line.starts_with("style,") {
        let params = StyleParams::<T>::load(path)?;
        let config = quantum.ok_or_else(|| {
            config_error!("quantum checkpoint needs a generator config (readout and scale)")
        })?;
        if !params.matches(config) {
            return Err(config_error!(
                "checkpoint shape {}/{}/{} does not match generator config",
                params.kind().name(),
                params.n_qb(),
                params.n_layers()
            ));
        }
        Ok(Generator::Quantum { config: *config, params })
    } else if first_line.starts_with("mlp_generator,") {
        Ok(Generator::Classical(MlpGenerator::load(path)?))
    } else {
        Err(crate::Error::Parse { line: 1, msg: "unrecognized checkpoint header".into() })
    }
}

fn normal_noise<T: Real, R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Array2<T> {
    Array2::from_shape_fn((n, dim), |_| T::standard_normal(rng))
}

/// Critic loss on fixed tensors:
/// mean D(real) - mean D(fake) + lambda * mean (||grad D(x_hat)|| - 1)^2.
pub fn critic_loss<T: Real>(
    d: &MlpDiscriminator<T>,
    real: &Array2<T>,
    fake: &Array2<T>,
    x_hat: &Array2<T>,
    lambda: T,
) -> Result<T> {
    let scores_real = d.forward(real)?;
    let scores_fake = d.forward(fake)?;
    let grads = d.input_gradient_batch(x_hat)?;
    let mut gp = T::zero();
    for row in grads.rows() {
        let norm = row.iter().map(|v| *v * *v).sum::<T>().sqrt();
        gp += (norm - T::one()) * (norm - T::one());
    }
    gp = gp / T::of(x_hat.nrows() as f64) * lambda;
    Ok(mean(&scores_real) - mean(&scores_fake) + gp)
}

fn mean<T: Real>(v: &Array1<T>) -> T {
    v.sum() / T::of(v.len() as f64)
}

/// One critic update on fixed real/fake/interpolate tensors. Returns the
/// pre-update loss and penalty values.
pub fn critic_step_on<T: Real>(
    d: &mut MlpDiscriminator<T>,
    real: &Array2<T>,
    fake: &Array2<T>,
    x_hat: &Array2<T>,
    config: &TrainConfig,
    adam: &mut AdamState<T>,
) -> Result<(T, T)> {
    let batch = real.nrows();
    let inv_b = T::of(1.0 / batch as f64);
    let lambda = T::of(config.lambda_gp);

    let (scores_real, cache_real) = d.forward_cache(real)?;
    let (scores_fake, cache_fake) = d.forward_cache(fake)?;
    let (grads_real, _) = d.backward(&cache_real, &Array1::from_elem(batch, inv_b));
    let (grads_fake, _) = d.backward(&cache_fake, &Array1::from_elem(batch, -inv_b));
    let (grads_gp, gp_value) = d.penalty_param_gradient(x_hat, lambda)?;

    let mut flat = grads_real.flat();
    for (t, (a, b)) in flat.iter_mut().zip(grads_fake.flat().iter().zip(grads_gp.flat().iter())) {
        *t += *a + *b;
    }
    let mut params = d.params_flat();
    adam.update(&mut params, &flat, config);
    d.set_params_flat(&params);

    let loss = mean(&scores_real) - mean(&scores_fake) + gp_value;
    Ok((loss, gp_value))
}

/// One critic update with freshly sampled fakes and interpolates.
pub fn critic_step<T: Real, R: Rng + ?Sized>(
    d: &mut MlpDiscriminator<T>,
    g: &mut Generator<T>,
    real: &Array2<T>,
    config: &TrainConfig,
    adam: &mut AdamState<T>,
    rng: &mut R,
) -> Result<(T, T)> {
    let fake = g.sample_train(real.nrows(), rng)?;
    let x_hat = interpolate(real, &fake, rng)?;
    critic_step_on(d, real, &fake, &x_hat, config, adam)
}

/// One generator update on a fixed noise batch. Returns the pre-update
/// loss mean D(G(xi)).
pub fn generator_step_on<T: Real>(
    d: &MlpDiscriminator<T>,
    g: &mut Generator<T>,
    noise: &Array2<T>,
    config: &TrainConfig,
    adam: &mut AdamState<T>,
) -> Result<T> {
    let batch = noise.nrows();
    let inv_b = T::of(1.0 / batch as f64);
    match g {
        Generator::Classical(net) => {
            let (latent, cache) = net.forward_train_pure(noise)?;
            net.update_running(&cache);
            let (scores, d_cache) = d.forward_cache(&latent)?;
            let (_, d_latent) = d.backward(&d_cache, &Array1::from_elem(batch, inv_b));
            let grads = net.backward(&cache, &d_latent);
            let mut params = net.params_flat();
            adam.update(&mut params, &grads.flat(), config);
            net.set_params_flat(&params);
            Ok(mean(&scores))
        }
        Generator::Quantum { config: qcfg, params } => {
            let mut latent = Array2::zeros((batch, qcfg.latent_dim()));
            for (i, mut row) in latent.rows_mut().into_iter().enumerate() {
                let sample = ansatz::generate_latent(qcfg, params, &noise_row(noise, i))?;
                row.assign(&Array1::from_vec(sample));
            }
            let (scores, d_cache) = d.forward_cache(&latent)?;
            let (_, d_latent) = d.backward(&d_cache, &Array1::from_elem(batch, inv_b));

            let n = params.w().len();
            let mut flat_grads = vec![T::zero(); 2 * n];
            for i in 0..batch {
                let upstream: Vec<T> = d_latent.row(i).to_vec();
                let sg = qgrad::latent_gradients(qcfg, params, &noise_row(noise, i), &upstream)?;
                for (t, s) in flat_grads[..n].iter_mut().zip(sg.w.iter()) {
                    *t += *s;
                }
                for (t, s) in flat_grads[n..].iter_mut().zip(sg.b.iter()) {
                    *t += *s;
                }
            }
            let mut flat_params: Vec<T> =
                params.w().iter().chain(params.b().iter()).copied().collect();
            adam.update(&mut flat_params, &flat_grads, config);
            params.w_mut().copy_from_slice(&flat_params[..n]);
            params.b_mut().copy_from_slice(&flat_params[n..]);
            Ok(mean(&scores))
        }
    }
}

fn noise_row<T: Real>(noise: &Array2<T>, i: usize) -> Vec<T> {
    noise.row(i).to_vec()
}

/// One generator update with freshly drawn noise.
pub fn generator_step<T: Real, R: Rng + ?Sized>(
    d: &MlpDiscriminator<T>,
    g: &mut Generator<T>,
    config: &TrainConfig,
    adam: &mut AdamState<T>,
    batch: usize,
    rng: &mut R,
) -> Result<T> {
    let dim = match g {
        Generator::Classical(net) => net.latent_dim(),
        Generator::Quantum { config, .. } => config.n_qb,
    };
    let noise = normal_noise_for(g, batch, dim, rng);
    generator_step_on(d, g, &noise, config, adam)
}

fn normal_noise_for<T: Real, R: Rng + ?Sized>(
    g: &Generator<T>,
    n: usize,
    dim: usize,
    rng: &mut R,
) -> Array2<T> {
    match g {
        Generator::Classical(_) => normal_noise(n, dim, rng),
        Generator::Quantum { config, .. } => {
            let mut out = Array2::zeros((n, dim));
            for mut row in out.rows_mut() {
                row.assign(&Array1::from_vec(ansatz::sample_noise::<T, R>(config, rng)));
            }
            out
        }
    }
}

/// One epoch's summary in the training record.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord<T> {
    pub critic_loss: T,
    pub gen_loss: T,
    pub gp_mean: T,
    pub seconds: f64,
}

/// Per-epoch loss record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory<T> {
    pub epochs: Vec<EpochRecord<T>>,
}

impl<T> Default for TrainHistory<T> {
    fn default() -> Self {
        Self { epochs: Vec::new() }
    }
}

impl<T: Real> TrainHistory<T> {
    /// CSV export: epoch, critic_loss, gen_loss, gp_mean, seconds.
    pub fn write_csv<W: IoWrite>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "epoch,critic_loss,gen_loss,gp_mean,seconds")?;
        for (i, e) in self.epochs.iter().enumerate() {
            writeln!(out, "{},{},{},{},{}", i, e.critic_loss, e.gen_loss, e.gp_mean, e.seconds)?;
        }
        Ok(())
    }
}

/// Everything `train` returns.
#[derive(Debug, Clone)]
pub struct TrainOutput<T> {
    pub generator: Generator<T>,
    pub discriminator: MlpDiscriminator<T>,
    pub history: TrainHistory<T>,
    pub critic_updates: usize,
    pub generator_updates: usize,
}

/// Train a WGAN-GP on the dataset. For a quantum generator kind the ansatz
/// shape comes from `quantum`, whose latent dimension must match the data.
pub fn train<T: Real>(
    config: &TrainConfig,
    quantum: Option<&GeneratorConfig>,
    dataset: &LatentDataset<T>,
) -> Result<TrainOutput<T>> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(argument_error!("dataset is empty"));
    }
    let d_l = dataset.dim();
    let seeds = SeedStream::new(config.seed);
    let mut init_rng = seeds.stream("init");
    let mut generator = match config.generator_kind {
        GeneratorKind::Classical => Generator::new_classical(d_l, &mut init_rng),
        GeneratorKind::QuantumSimple | GeneratorKind::QuantumBel => {
            let qcfg = quantum.ok_or_else(|| {
                config_error!("quantum generator kind needs a generator config")
            })?;
            let expected = match config.generator_kind {
                GeneratorKind::QuantumSimple => ansatz::AnsatzKind::Simple,
                _ => ansatz::AnsatzKind::Bel,
            };
            if qcfg.kind != expected {
                return Err(config_error!(
                    "generator kind {:?} conflicts with ansatz {:?}",
                    config.generator_kind,
                    qcfg.kind
                ));
            }
            if qcfg.latent_dim() != d_l {
                return Err(config_error!(
                    "quantum latent dimension {} != dataset dimension {}",
                    qcfg.latent_dim(),
                    d_l
                ));
            }
            Generator::new_quantum(*qcfg, T::of(config.style_init_scale), &mut init_rng)?
        }
    };
    let mut discriminator = MlpDiscriminator::new(d_l, &mut init_rng);

    let mut adam_d = AdamState::new(discriminator.param_count());
    let mut adam_g = AdamState::new(generator.param_count());
    let mut noise_rng = seeds.stream("noise");
    let mut shuffle_seed_rng = seeds.stream("shuffle-seeds");

    let mut history = TrainHistory::default();
    let mut critic_updates = 0usize;
    let mut generator_updates = 0usize;

    for _ in 0..config.epochs {
        let started = Instant::now();
        let shuffle_seed: u64 = shuffle_seed_rng.gen();
        let batches = dataset.batches(config.batch_size, shuffle_seed, true, true)?;
        let mut critic_sum = T::zero();
        let mut gen_sum = T::zero();
        let mut gp_sum = T::zero();
        let mut n_critic_losses = 0usize;
        for batch_idx in &batches {
            let real = dataset.gather(batch_idx);
            for _ in 0..config.n_critic {
                let (loss, gp) = critic_step(
                    &mut discriminator,
                    &mut generator,
                    &real,
                    config,
                    &mut adam_d,
                    &mut noise_rng,
                )?;
                critic_sum += loss;
                gp_sum += gp;
                n_critic_losses += 1;
                critic_updates += 1;
            }
            let g_loss = generator_step(
                &discriminator,
                &mut generator,
                config,
                &mut adam_g,
                config.batch_size,
                &mut noise_rng,
            )?;
            gen_sum += g_loss;
            generator_updates += 1;
        }
        let n_batches = T::of(batches.len().max(1) as f64);
        let n_critic_t = T::of(n_critic_losses.max(1) as f64);
        history.epochs.push(EpochRecord {
            critic_loss: critic_sum / n_critic_t,
            gen_loss: gen_sum / n_batches,
            gp_mean: gp_sum / n_critic_t,
            seconds: started.elapsed().as_secs_f64(),
        });
    }

    Ok(TrainOutput { generator, discriminator, history, critic_updates, generator_updates })
}
