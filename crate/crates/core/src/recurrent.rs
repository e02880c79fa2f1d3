//! Standalone GRU forward machinery: single cell step, sequence fold,
//! bidirectional concatenation, and inter-layer dropout.
//!
//! The cell follows the gated update
//!
//! ```text
//! r = sigmoid(W_r x + U_r h + b_r)
//! z = sigmoid(W_z x + U_z h + b_z)
//! n = tanh(W_n x + b_n + r . (U_n h + b_nu))
//! h' = (1 - z) . n + z . h
//! ```
//!
//! Dropout multiplies each element by a Bernoulli keep mask without
//! inverse-probability rescaling, matching the delta*h formulation.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::scalar::Real;
use crate::{argument_error, Result};

/// Trainable weights of one GRU cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GruWeights<T> {
    pub w_r: Array2<T>,
    pub w_z: Array2<T>,
    pub w_n: Array2<T>,
    pub u_r: Array2<T>,
    pub u_z: Array2<T>,
    pub u_n: Array2<T>,
    pub b_r: Array1<T>,
    pub b_z: Array1<T>,
    pub b_n: Array1<T>,
    pub b_nu: Array1<T>,
}

impl<T: Real> GruWeights<T> {
    pub fn zeros(hidden_dim: usize, input_dim: usize) -> Self {
        Self {
            w_r: Array2::zeros((hidden_dim, input_dim)),
            w_z: Array2::zeros((hidden_dim, input_dim)),
            w_n: Array2::zeros((hidden_dim, input_dim)),
            u_r: Array2::zeros((hidden_dim, hidden_dim)),
            u_z: Array2::zeros((hidden_dim, hidden_dim)),
            u_n: Array2::zeros((hidden_dim, hidden_dim)),
            b_r: Array1::zeros(hidden_dim),
            b_z: Array1::zeros(hidden_dim),
            b_n: Array1::zeros(hidden_dim),
            b_nu: Array1::zeros(hidden_dim),
        }
    }

    /// Uniform(-1/sqrt(hidden), +1/sqrt(hidden)) entries everywhere.
    pub fn random<R: Rng + ?Sized>(hidden_dim: usize, input_dim: usize, rng: &mut R) -> Self {
        let bound = T::of(1.0 / (hidden_dim as f64).sqrt());
        let mut w = Self::zeros(hidden_dim, input_dim);
        for m in [&mut w.w_r, &mut w.w_z, &mut w.w_n, &mut w.u_r, &mut w.u_z, &mut w.u_n] {
            m.mapv_inplace(|_| T::uniform_symmetric(rng, bound));
        }
        for v in [&mut w.b_r, &mut w.b_z, &mut w.b_n, &mut w.b_nu] {
            v.mapv_inplace(|_| T::uniform_symmetric(rng, bound));
        }
        w
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_r.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_r.ncols()
    }

    fn check(&self, x: &Array1<T>, h: &Array1<T>) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(argument_error!("input length {} != {}", x.len(), self.input_dim()));
        }
        if h.len() != self.hidden_dim() {
            return Err(argument_error!("hidden length {} != {}", h.len(), self.hidden_dim()));
        }
        Ok(())
    }
}

fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// One gated update of the hidden state.
pub fn gru_step<T: Real>(x: &Array1<T>, h_prev: &Array1<T>, w: &GruWeights<T>) -> Result<Array1<T>> {
    w.check(x, h_prev)?;
    let r = (w.w_r.dot(x) + w.u_r.dot(h_prev) + &w.b_r).mapv(sigmoid);
    let z = (w.w_z.dot(x) + w.u_z.dot(h_prev) + &w.b_z).mapv(sigmoid);
    let inner = w.u_n.dot(h_prev) + &w.b_nu;
    let n = (w.w_n.dot(x) + &w.b_n + &(&r * &inner)).mapv(|v| v.tanh());
    let keep = z.mapv(|v| T::one() - v);
    Ok(&(&keep * &n) + &(&z * h_prev))
}

/// Left fold of [`gru_step`] over a sequence; returns the final state and
/// the per-step hidden states. An empty sequence returns h0 and no trace.
pub fn gru_sequence<T: Real>(
    inputs: &[Array1<T>],
    h0: &Array1<T>,
    w: &GruWeights<T>,
) -> Result<(Array1<T>, Vec<Array1<T>>)> {
    let mut h = h0.clone();
    let mut trace = Vec::with_capacity(inputs.len());
    for x in inputs {
        h = gru_step(x, &h, w)?;
        trace.push(h.clone());
    }
    Ok((h, trace))
}

/// Forward pass over the sequence and backward pass over the reversed
/// sequence; final states concatenated as [forward, backward].
pub fn bidirectional<T: Real>(
    inputs: &[Array1<T>],
    h0_fwd: &Array1<T>,
    h0_bwd: &Array1<T>,
    w_fwd: &GruWeights<T>,
    w_bwd: &GruWeights<T>,
) -> Result<Array1<T>> {
    let (fwd, _) = gru_sequence(inputs, h0_fwd, w_fwd)?;
    let reversed: Vec<Array1<T>> = inputs.iter().rev().cloned().collect();
    let (bwd, _) = gru_sequence(&reversed, h0_bwd, w_bwd)?;
    let mut out = Array1::zeros(fwd.len() + bwd.len());
    out.slice_mut(ndarray::s![..fwd.len()]).assign(&fwd);
    out.slice_mut(ndarray::s![fwd.len()..]).assign(&bwd);
    Ok(out)
}

/// Multiply each element by 0 with probability p, else leave it unchanged.
/// No inverse-p rescaling is applied.
pub fn dropout_between_layers<T: Real, R: Rng + ?Sized>(
    h: &Array1<T>,
    p: f64,
    rng: &mut R,
) -> Result<Array1<T>> {
    if !(0.0..1.0).contains(&p) {
        return Err(argument_error!("dropout probability must be in [0, 1), got {}", p));
    }
    Ok(h.mapv(|v| if f64::uniform_01(rng) < p { T::zero() } else { v }))
}
