//! Latent-space Wasserstein GAN with quantum statevector generators.
//!
//! The crate bundles an exact n-qubit statevector simulator, two style-based
//! re-uploading ansätze with exact (adjoint or parameter-shift) gradients, a
//! from-scratch dense network stack for the critic and the classical
//! baseline generator, the WGAN-GP training loop, latent dataset tooling
//! with synthetic target distributions, distribution metrics with Z0
//! significance aggregation, and a standalone GRU forward codec.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`]
//! (`f32`/`f64`); the aliases below pin the common `f64` instantiations.

pub mod ansatz;
pub mod error;
pub mod latent_data;
pub mod metrics;
pub mod neural;
pub mod qgrad;
pub mod recurrent;
pub mod rng;
pub mod scalar;
pub mod statevector;
pub mod wgan;

pub use error::{Error, Result};
pub use ndarray;
pub use rng::{SeedStream, RNG_ALGORITHM};
pub use scalar::Real;

/// `f64` statevector register.
pub type StateVector64 = statevector::StateVector<f64>;
/// `f64` gate operation.
pub type GateOp64 = statevector::GateOp<f64>;
/// `f64` style parameters.
pub type StyleParams64 = ansatz::StyleParams<f64>;
/// `f64` critic network.
pub type MlpDiscriminator64 = neural::MlpDiscriminator<f64>;
/// `f64` classical generator network.
pub type MlpGenerator64 = neural::MlpGenerator<f64>;
/// `f64` latent dataset.
pub type LatentDataset64 = latent_data::LatentDataset<f64>;
/// `f64` generator player.
pub type Generator64 = wgan::Generator<f64>;
