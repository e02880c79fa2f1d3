//! From-scratch dense networks for the WGAN critic and the classical
//! baseline generator.
//!
//! The critic is a [input -> 512 -> 256 -> 1] stack with LeakyReLU(0.2)
//! after all but the last layer. The classical generator is
//! [input -> 128 -> 256 -> 512 -> 1024 -> output] with batch normalization
//! between the dense part and the activation of its second, third, and
//! fourth layers.
//!
//! Besides plain forward/backward passes, the critic exposes the exact
//! gradient of its scalar score with respect to the input and the
//! second-order pass for the gradient penalty: because LeakyReLU is
//! piecewise linear, the input gradient with frozen activation masks is an
//! explicit function of the weights, so its parameter gradient is computed
//! in closed form (biases do not enter it).

use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;

use crate::scalar::Real;
use crate::{argument_error, Error, Result};

/// LeakyReLU negative-side slope used throughout.
pub const LEAKY_SLOPE: f64 = 0.2;
/// Batch-norm variance floor.
pub const BN_EPSILON: f64 = 1e-5;
/// Batch-norm running-statistics update rate.
pub const BN_MOMENTUM: f64 = 0.1;

/// Whether a forward pass uses batch statistics (Train) or the running
/// statistics accumulated so far (Eval).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

// Inputs exactly at the kink take the negative-side slope.
fn leaky<T: Real>(x: T, slope: T) -> T {
    if x > T::zero() {
        x
    } else {
        x * slope
    }
}

fn leaky_mask<T: Real>(x: T, slope: T) -> T {
    if x > T::zero() {
        T::one()
    } else {
        slope
    }
}

/// Fully connected layer, weights stored (out x in).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
}

impl<T: Real> DenseLayer<T> {
    /// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero bias.
    pub fn random<R: Rng + ?Sized>(out_dim: usize, in_dim: usize, rng: &mut R) -> Self {
        let bound = T::of(1.0 / (in_dim as f64).sqrt());
        let weights =
            Array2::from_shape_fn((out_dim, in_dim), |_| T::uniform_symmetric(rng, bound));
        Self { weights, bias: Array1::zeros(out_dim) }
    }

    pub fn forward(&self, x: &Array2<T>) -> Array2<T> {
        x.dot(&self.weights.t()) + &self.bias
    }

    fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Batch normalization with trainable gain/shift and running statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormLayer<T> {
    pub gamma: Array1<T>,
    pub beta: Array1<T>,
    pub running_mean: Array1<T>,
    pub running_var: Array1<T>,
    pub epsilon: T,
    pub momentum: T,
}

/// Per-feature quantities cached by a train-mode forward pass.
#[derive(Debug, Clone)]
pub struct BnCache<T> {
    x_hat: Array2<T>,
    inv_std: Array1<T>,
    batch_mean: Array1<T>,
    batch_var_unbiased: Array1<T>,
}

impl<T: Real> BatchNormLayer<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            gamma: Array1::ones(dim),
            beta: Array1::zeros(dim),
            running_mean: Array1::zeros(dim),
            running_var: Array1::ones(dim),
            epsilon: T::of(BN_EPSILON),
            momentum: T::of(BN_MOMENTUM),
        }
    }

    /// Train-mode forward with batch statistics; running stats untouched so
    /// the pass stays pure (the caller folds the cache in afterwards).
    pub fn forward_train_pure(&self, x: &Array2<T>) -> Result<(Array2<T>, BnCache<T>)> {
        let n = x.nrows();
        if n < 2 {
            return Err(argument_error!("batch normalization needs a batch of at least 2 rows"));
        }
        let n_t = T::of(n as f64);
        let mean = x.mean_axis(Axis(0)).expect("non-empty batch");
        let centered = x - &mean;
        let var_biased = centered.mapv(|v| v * v).sum_axis(Axis(0)) / n_t;
        let inv_std = var_biased.mapv(|v| T::one() / (v + self.epsilon).sqrt());
        let x_hat = &centered * &inv_std;
        let y = &x_hat * &self.gamma + &self.beta;
        let var_unbiased = &var_biased * (n_t / T::of((n - 1) as f64));
        Ok((
            y,
            BnCache { x_hat, inv_std, batch_mean: mean, batch_var_unbiased: var_unbiased },
        ))
    }

    /// Fold one train-mode batch into the running statistics.
    pub fn update_running(&mut self, cache: &BnCache<T>) {
        let m = self.momentum;
        let keep = T::one() - m;
        self.running_mean = &self.running_mean * keep + &cache.batch_mean * m;
        self.running_var = &self.running_var * keep + &cache.batch_var_unbiased * m;
    }

    pub fn forward_eval(&self, x: &Array2<T>) -> Array2<T> {
        let inv_std = self.running_var.mapv(|v| T::one() / (v + self.epsilon).sqrt());
        let x_hat = (x - &self.running_mean) * &inv_std;
        &x_hat * &self.gamma + &self.beta
    }

    /// Backward through a train-mode pass: returns (dx, dgamma, dbeta).
    pub fn backward(
        &self,
        cache: &BnCache<T>,
        dy: &Array2<T>,
    ) -> (Array2<T>, Array1<T>, Array1<T>) {
        let n = T::of(dy.nrows() as f64);
        let dgamma = (dy * &cache.x_hat).sum_axis(Axis(0));
        let dbeta = dy.sum_axis(Axis(0));
        let mean_dy = dy.mean_axis(Axis(0)).expect("non-empty batch");
        let mean_dy_xhat = (dy * &cache.x_hat).sum_axis(Axis(0)) / n;
        let dx = (&(dy - &mean_dy) - &(&cache.x_hat * &mean_dy_xhat))
            * &(&self.gamma * &cache.inv_std);
        (dx, dgamma, dbeta)
    }

    fn n_trainables(&self) -> usize {
        self.gamma.len() + self.beta.len()
    }
}

/// Per-tensor gradients in the same order as the flat parameter layout.
#[derive(Debug, Clone)]
pub struct MlpGradients<T> {
    pub dense: Vec<(Array2<T>, Array1<T>)>,
    pub norms: Vec<(Array1<T>, Array1<T>)>,
}

impl<T: Real> MlpGradients<T> {
    fn zeros_like_disc(d: &MlpDiscriminator<T>) -> Self {
        Self {
            dense: d
                .layers
                .iter()
                .map(|l| (Array2::zeros(l.weights.dim()), Array1::zeros(l.bias.len())))
                .collect(),
            norms: Vec::new(),
        }
    }

    /// Flatten in declaration order, matching `params_flat`.
    pub fn flat(&self) -> Vec<T> {
        let mut out = Vec::new();
        let n_norms = self.norms.len();
        for (i, (w, b)) in self.dense.iter().enumerate() {
            out.extend(w.iter().copied());
            out.extend(b.iter().copied());
            if i >= 1 && i - 1 < n_norms {
                let (g, be) = &self.norms[i - 1];
                out.extend(g.iter().copied());
                out.extend(be.iter().copied());
            }
        }
        out
    }
}

/// WGAN critic: dense stack with LeakyReLU(0.2) between layers and a single
/// linear score output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpDiscriminator<T> {
    layers: Vec<DenseLayer<T>>,
    slope: T,
}

/// Cached activations and masks from [`MlpDiscriminator::forward_cache`].
#[derive(Debug, Clone)]
pub struct DiscCache<T> {
    inputs: Vec<Array2<T>>,
    masks: Vec<Array2<T>>,
}

impl<T: Real> MlpDiscriminator<T> {
    /// The standard critic: hidden sequence [512, 256, 1].
    pub fn new<R: Rng + ?Sized>(input_dim: usize, rng: &mut R) -> Self {
        Self::with_dims(input_dim, &[512, 256, 1], rng)
    }

    /// Custom stack; the last dimension must be 1.
    pub fn with_dims<R: Rng + ?Sized>(input_dim: usize, dims: &[usize], rng: &mut R) -> Self {
        assert_eq!(*dims.last().expect("at least one layer"), 1, "critic output must be scalar");
        let mut layers = Vec::with_capacity(dims.len());
        let mut prev = input_dim;
        for &d in dims {
            layers.push(DenseLayer::random(d, prev, rng));
            prev = d;
        }
        Self { layers, slope: T::of(LEAKY_SLOPE) }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.ncols()
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.n_params()).sum()
    }

    /// Scores, one per input row.
    pub fn forward(&self, x: &Array2<T>) -> Result<Array1<T>> {
        Ok(self.forward_cache(x)?.0)
    }

    pub fn forward_cache(&self, x: &Array2<T>) -> Result<(Array1<T>, DiscCache<T>)> {
        if x.ncols() != self.input_dim() {
            return Err(argument_error!(
                "input width {} != critic input dim {}",
                x.ncols(),
                self.input_dim()
            ));
        }
        let slope = self.slope;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut masks = Vec::with_capacity(self.layers.len().saturating_sub(1));
        let mut a = x.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            inputs.push(a.clone());
            let z = layer.forward(&a);
            if i + 1 < self.layers.len() {
                masks.push(z.mapv(|v| leaky_mask(v, slope)));
                a = z.mapv(|v| leaky(v, slope));
            } else {
                a = z;
            }
        }
        let scores = a.column(0).to_owned();
        Ok((scores, DiscCache { inputs, masks }))
    }

    /// Backprop a per-row score gradient; returns parameter gradients and
    /// the gradient with respect to the input rows.
    pub fn backward(&self, cache: &DiscCache<T>, upstream: &Array1<T>) -> (MlpGradients<T>, Array2<T>) {
        let batch = upstream.len();
        let mut grads = MlpGradients::zeros_like_disc(self);
        let mut delta = upstream.clone().into_shape_with_order((batch, 1)).expect("column");
        for i in (0..self.layers.len()).rev() {
            let a = &cache.inputs[i];
            grads.dense[i].0 = delta.t().dot(a);
            grads.dense[i].1 = delta.sum_axis(Axis(0));
            delta = delta.dot(&self.layers[i].weights);
            if i > 0 {
                delta *= &cache.masks[i - 1];
            }
        }
        (grads, delta)
    }

    /// Exact gradient of the scalar score with respect to one input row.
    pub fn input_gradient(&self, x: &Array1<T>) -> Result<Array1<T>> {
        let row = x.clone().into_shape_with_order((1, x.len())).expect("row");
        let (_, cache) = self.forward_cache(&row)?;
        let (_, dx) = self.backward(&cache, &Array1::ones(1));
        Ok(dx.row(0).to_owned())
    }

    /// Input gradients for a whole batch, one row per sample.
    pub fn input_gradient_batch(&self, x: &Array2<T>) -> Result<Array2<T>> {
        let (_, cache) = self.forward_cache(x)?;
        let (_, dx) = self.backward(&cache, &Array1::ones(x.nrows()));
        Ok(dx)
    }

    /// Parameter gradients of lambda * mean_i (||grad_x D(x_i)|| - 1)^2 and
    /// the penalty value itself.
    ///
    /// With frozen LeakyReLU masks the input gradient is
    /// g = W1^T M1 W2^T M2 ... w_L, an explicit linear-in-each-weight
    /// function, so the second-order pass reduces to one backward sweep
    /// (the sigma vectors), one forward sweep of u = 2(||g||-1) g / ||g||
    /// (the h vectors), and per-layer outer products. Zero-norm gradients
    /// take subgradient 0. Bias gradients vanish identically.
    pub fn penalty_param_gradient(
        &self,
        x_hat: &Array2<T>,
        lambda: T,
    ) -> Result<(MlpGradients<T>, T)> {
        let (_, cache) = self.forward_cache(x_hat)?;
        let batch = x_hat.nrows();
        let n_layers = self.layers.len();
        let batch_t = T::of(batch as f64);

        // sigma_j for j = n_layers-1 .. 1: backward vectors after each mask
        let w_last = self.layers[n_layers - 1].weights.row(0);
        let mut sigmas: Vec<Array2<T>> = vec![Array2::zeros((0, 0)); n_layers];
        let mut v: Array2<T> = Array2::from_shape_fn((batch, w_last.len()), |(_, j)| w_last[j]);
        for j in (1..n_layers).rev() {
            v *= &cache.masks[j - 1];
            sigmas[j] = v.clone();
            v = v.dot(&self.layers[j - 1].weights);
        }
        let g = v; // (batch, input_dim), the per-sample input gradients

        let norms: Array1<T> = g
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|x| *x * *x).sum::<T>().sqrt())
            .collect();
        let penalty = norms.iter().map(|n| (*n - T::one()) * (*n - T::one())).sum::<T>()
            / batch_t
            * lambda;

        // u_i = 2 (||g_i|| - 1) g_i / ||g_i||, subgradient 0 at zero norm
        let mut u = g;
        for (mut row, &n) in u.rows_mut().into_iter().zip(norms.iter()) {
            if n > T::zero() {
                let f = T::of(2.0) * (n - T::one()) / n;
                row.mapv_inplace(|x| x * f);
            } else {
                row.fill(T::zero());
            }
        }

        let scale = lambda / batch_t;
        let mut grads = MlpGradients::zeros_like_disc(self);
        let mut h = u; // h_0
        for j in 0..n_layers - 1 {
            grads.dense[j].0 = sigmas[j + 1].t().dot(&h) * scale;
            h = h.dot(&self.layers[j].weights.t()) * &cache.masks[j];
        }
        grads.dense[n_layers - 1].0 = (h.sum_axis(Axis(0)) * scale)
            .into_shape_with_order((1, self.layers[n_layers - 1].weights.ncols()))
            .expect("row");
        Ok((grads, penalty))
    }

    /// Trainables, flattened in declaration order.
    pub fn params_flat(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend(l.weights.iter().copied());
            out.extend(l.bias.iter().copied());
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[T]) {
        let mut offset = 0;
        for l in &mut self.layers {
            for w in l.weights.iter_mut() {
                *w = flat[offset];
                offset += 1;
            }
            for b in l.bias.iter_mut() {
                *b = flat[offset];
                offset += 1;
            }
        }
        assert_eq!(offset, flat.len(), "flat parameter length mismatch");
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let dims: Vec<String> = self.layers.iter().map(|l| l.weights.nrows().to_string()).collect();
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "mlp_discriminator,{},{}", self.input_dim(), dims.join(","))?;
        for v in self.params_flat() {
            writeln!(out, "{}", v)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (header, values) = read_checkpoint::<T>(path)?;
        let fields: Vec<&str> = header.split(',').collect();
        if fields.len() < 3 || fields[0] != "mlp_discriminator" {
            return Err(Error::Parse { line: 1, msg: "expected mlp_discriminator header".into() });
        }
        let input_dim: usize =
            fields[1].parse().map_err(|_| Error::Parse { line: 1, msg: "bad input dim".into() })?;
        let dims: Vec<usize> = fields[2..]
            .iter()
            .map(|s| s.parse().map_err(|_| Error::Parse { line: 1, msg: "bad layer dim".into() }))
            .collect::<Result<_>>()?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let mut d = Self::with_dims(input_dim, &dims, &mut rng);
        if values.len() != d.param_count() {
            return Err(Error::Parse {
                line: values.len() + 1,
                msg: format!("expected {} values, found {}", d.param_count(), values.len()),
            });
        }
        d.set_params_flat(&values);
        Ok(d)
    }
}

/// Classical generator: [input -> 128 -> 256 -> 512 -> 1024 -> output] with
/// batch norm on the middle three layers. The noise dimension equals the
/// output (latent) dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGenerator<T> {
    layers: Vec<DenseLayer<T>>,
    norms: Vec<BatchNormLayer<T>>,
    slope: T,
}

/// Cache of one train-mode generator pass.
#[derive(Debug, Clone)]
pub struct GenCache<T> {
    inputs: Vec<Array2<T>>,
    masks: Vec<Array2<T>>,
    bn: Vec<BnCache<T>>,
}

impl<T: Real> MlpGenerator<T> {
    pub fn new<R: Rng + ?Sized>(latent_dim: usize, rng: &mut R) -> Self {
        Self::with_dims(latent_dim, &[128, 256, 512, 1024], rng)
    }

    /// Custom hidden stack; batch norm is attached to every hidden layer
    /// except the first, mirroring the standard shape.
    pub fn with_dims<R: Rng + ?Sized>(latent_dim: usize, hidden: &[usize], rng: &mut R) -> Self {
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut prev = latent_dim;
        for &d in hidden {
            layers.push(DenseLayer::random(d, prev, rng));
            prev = d;
        }
        layers.push(DenseLayer::random(latent_dim, prev, rng));
        let norms = hidden.iter().skip(1).map(|&d| BatchNormLayer::new(d)).collect();
        Self { layers, norms, slope: T::of(LEAKY_SLOPE) }
    }

    pub fn latent_dim(&self) -> usize {
        self.layers[0].weights.ncols()
    }

    /// Trainable scalars: dense weights and biases plus gamma/beta.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.n_params()).sum::<usize>()
            + self.norms.iter().map(|n| n.n_trainables()).sum::<usize>()
    }

    /// Forward pass. Train mode uses batch statistics and folds them into
    /// the running statistics; Eval mode uses the running statistics.
    pub fn forward(&mut self, noise: &Array2<T>, mode: Mode) -> Result<Array2<T>> {
        match mode {
            Mode::Train => {
                let (out, cache) = self.forward_train_pure(noise)?;
                for (norm, bn_cache) in self.norms.iter_mut().zip(&cache.bn) {
                    norm.update_running(bn_cache);
                }
                Ok(out)
            }
            Mode::Eval => self.forward_eval(noise),
        }
    }

    /// Train-mode forward without mutating running statistics; the cache
    /// feeds [`Self::backward`], and `update_running` applies the cache.
    pub fn forward_train_pure(&self, noise: &Array2<T>) -> Result<(Array2<T>, GenCache<T>)> {
        self.check_input(noise)?;
        let slope = self.slope;
        let mut cache = GenCache { inputs: Vec::new(), masks: Vec::new(), bn: Vec::new() };
        let mut a = noise.clone();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            cache.inputs.push(a.clone());
            let mut z = layer.forward(&a);
            if i == last {
                a = z;
                break;
            }
            if i >= 1 {
                let (zn, bn_cache) = self.norms[i - 1].forward_train_pure(&z)?;
                cache.bn.push(bn_cache);
                z = zn;
            }
            cache.masks.push(z.mapv(|v| leaky_mask(v, slope)));
            a = z.mapv(|v| leaky(v, slope));
        }
        Ok((a, cache))
    }

    /// Fold the batch statistics of a cached pass into the running stats.
    pub fn update_running(&mut self, cache: &GenCache<T>) {
        for (norm, bn_cache) in self.norms.iter_mut().zip(&cache.bn) {
            norm.update_running(bn_cache);
        }
    }

    fn forward_eval(&self, noise: &Array2<T>) -> Result<Array2<T>> {
        self.check_input(noise)?;
        let slope = self.slope;
        let mut a = noise.clone();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.forward(&a);
            if i == last {
                return Ok(z);
            }
            if i >= 1 {
                z = self.norms[i - 1].forward_eval(&z);
            }
            a = z.mapv(|v| leaky(v, slope));
        }
        unreachable!("loop returns on the last layer")
    }

    fn check_input(&self, noise: &Array2<T>) -> Result<()> {
        if noise.ncols() != self.latent_dim() {
            return Err(argument_error!(
                "noise width {} != generator dim {}",
                noise.ncols(),
                self.latent_dim()
            ));
        }
        Ok(())
    }

    /// Backprop dL/doutput through a cached train-mode pass.
    pub fn backward(&self, cache: &GenCache<T>, upstream: &Array2<T>) -> MlpGradients<T> {
        let mut grads = MlpGradients {
            dense: self
                .layers
                .iter()
                .map(|l| (Array2::zeros(l.weights.dim()), Array1::zeros(l.bias.len())))
                .collect(),
            norms: self
                .norms
                .iter()
                .map(|n| (Array1::zeros(n.gamma.len()), Array1::zeros(n.beta.len())))
                .collect(),
        };
        let mut delta = upstream.clone();
        for i in (0..self.layers.len()).rev() {
            if i < self.layers.len() - 1 {
                delta *= &cache.masks[i];
                if i >= 1 {
                    let (dz, dgamma, dbeta) = self.norms[i - 1].backward(&cache.bn[i - 1], &delta);
                    grads.norms[i - 1] = (dgamma, dbeta);
                    delta = dz;
                }
            }
            grads.dense[i].0 = delta.t().dot(&cache.inputs[i]);
            grads.dense[i].1 = delta.sum_axis(Axis(0));
            delta = delta.dot(&self.layers[i].weights);
        }
        grads
    }

    /// Trainables in declaration order: each dense layer's weights and
    /// bias, with gamma/beta of its batch norm right after the layer that
    /// owns it. Running statistics are excluded (they are state, not
    /// trainables) and serialized separately by `save`.
    pub fn params_flat(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        for (i, l) in self.layers.iter().enumerate() {
            out.extend(l.weights.iter().copied());
            out.extend(l.bias.iter().copied());
            if i >= 1 && i - 1 < self.norms.len() {
                out.extend(self.norms[i - 1].gamma.iter().copied());
                out.extend(self.norms[i - 1].beta.iter().copied());
            }
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[T]) {
        let mut offset = 0;
        let n_norms = self.norms.len();
        for i in 0..self.layers.len() {
            let l = &mut self.layers[i];
            for w in l.weights.iter_mut() {
                *w = flat[offset];
                offset += 1;
            }
            for b in l.bias.iter_mut() {
                *b = flat[offset];
                offset += 1;
            }
            if i >= 1 && i - 1 < n_norms {
                let n = &mut self.norms[i - 1];
                for g in n.gamma.iter_mut() {
                    *g = flat[offset];
                    offset += 1;
                }
                for be in n.beta.iter_mut() {
                    *be = flat[offset];
                    offset += 1;
                }
            }
        }
        assert_eq!(offset, flat.len(), "flat parameter length mismatch");
    }

    /// Checkpoint: header, trainables in declaration order, then running
    /// mean/variance pairs of each batch norm.
    pub fn save(&self, path: &Path) -> Result<()> {
        let hidden: Vec<String> = self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.weights.nrows().to_string())
            .collect();
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "mlp_generator,{},{}", self.latent_dim(), hidden.join(","))?;
        for v in self.params_flat() {
            writeln!(out, "{}", v)?;
        }
        for n in &self.norms {
            for v in n.running_mean.iter().chain(n.running_var.iter()) {
                writeln!(out, "{}", v)?;
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (header, values) = read_checkpoint::<T>(path)?;
        let fields: Vec<&str> = header.split(',').collect();
        if fields.len() < 3 || fields[0] != "mlp_generator" {
            return Err(Error::Parse { line: 1, msg: "expected mlp_generator header".into() });
        }
        let latent_dim: usize =
            fields[1].parse().map_err(|_| Error::Parse { line: 1, msg: "bad latent dim".into() })?;
        let hidden: Vec<usize> = fields[2..]
            .iter()
            .map(|s| s.parse().map_err(|_| Error::Parse { line: 1, msg: "bad layer dim".into() }))
            .collect::<Result<_>>()?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let mut g = Self::with_dims(latent_dim, &hidden, &mut rng);
        let n_running: usize = g.norms.iter().map(|n| 2 * n.gamma.len()).sum();
        if values.len() != g.param_count() + n_running {
            return Err(Error::Parse {
                line: values.len() + 1,
                msg: format!(
                    "expected {} values, found {}",
                    g.param_count() + n_running,
                    values.len()
                ),
            });
        }
        let (train, running) = values.split_at(g.param_count());
        g.set_params_flat(train);
        let mut offset = 0;
        for n in &mut g.norms {
            for m in n.running_mean.iter_mut() {
                *m = running[offset];
                offset += 1;
            }
            for v in n.running_var.iter_mut() {
                *v = running[offset];
                offset += 1;
            }
        }
        Ok(g)
    }
}

use rand_chacha::rand_core::SeedableRng;

fn read_checkpoint<T: Real>(path: &Path) -> Result<(String, Vec<T>)> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (_, header) =
        lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty checkpoint".into() })?;
    let header = header?;
    let mut values = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = T::parse_str(&line)
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad number {:?}", line) })?;
        values.push(v);
    }
    Ok((header.trim().to_string(), values))
}
