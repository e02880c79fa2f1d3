//! Exact differentiation of the quantum generator.
//!
//! Two engines compute the Jacobian of the pre-scale readout expectations
//! with respect to every circuit angle: reverse-sweep adjoint
//! differentiation (the default; one forward pass plus one backward sweep
//! shared by all observables) and the parameter-shift rule (kept as an
//! independent cross-check; controlled rotations use the four-term rule).
//! [`style_chain`] then maps an upstream latent gradient through the angle
//! Jacobian and the tanh style map onto the trainable (w, b) tensors.

use std::f64::consts::TAU;

use ndarray::Array2;

use crate::ansatz::{
    angle_slots, build_circuit_from_angles, expectations_from_angles, readout_paulis, style_angles,
    GeneratorConfig, StyleParams,
};
use crate::scalar::Real;
use crate::statevector::StateVector;
use crate::{argument_error, Result};

/// Gradients with the same flat layout as [`StyleParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct StyleGradients<T> {
    pub w: Vec<T>,
    pub b: Vec<T>,
}

/// Adjoint-mode Jacobian at the angles induced by the style map.
///
/// Rows are pre-scale outputs in readout order, columns are circuit angles
/// in emission order.
pub fn angle_jacobian<T: Real>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    noise: &[T],
) -> Result<Array2<T>> {
    let angles = style_angles(config, params, noise)?;
    angle_jacobian_at(config, &angles)
}

/// Adjoint-mode Jacobian at explicit angles.
pub fn angle_jacobian_at<T: Real>(config: &GeneratorConfig, angles: &[T]) -> Result<Array2<T>> {
    let gates = build_circuit_from_angles(config, angles)?;
    let paulis = readout_paulis(config);
    let n_obs = paulis.len();
    let n_angles = angles.len();
    let mut jac = Array2::zeros((n_obs, n_angles));

    let mut ket = StateVector::<T>::init_zero(config.n_qb)?;
    ket.apply_all(&gates)?;
    // bra_o = P_o |psi>, evolved backwards alongside the ket
    let mut bras: Vec<StateVector<T>> = paulis
        .iter()
        .map(|&(q, p)| {
            let mut b = ket.clone();
            b.apply_generator(q, p, None);
            b
        })
        .collect();

    let mut col = n_angles;
    let mut scratch = ket.clone();
    for gate in gates.iter().rev() {
        if let Some(axis) = gate.axis() {
            col -= 1;
            // d<P>/dtheta = Im <bra| Lambda |psi_j>, Lambda the gate generator
            scratch.clone_from(&ket);
            scratch.apply_generator(gate.target(), axis, gate.control());
            for (o, bra) in bras.iter().enumerate() {
                jac[(o, col)] = bra.dot(&scratch).im;
            }
        }
        let inv = gate.inverse();
        ket.apply(&inv)?;
        for bra in &mut bras {
            bra.apply(&inv)?;
        }
    }
    debug_assert_eq!(col, 0);
    Ok(jac)
}

/// Parameter-shift Jacobian at explicit angles.
///
/// Single-qubit rotations use the two-term rule with shift pi/2; controlled
/// rotations have generator eigenvalues {0, +-1/2} and need the four-term
/// rule with shifts pi/2 and 3pi/2.
pub fn angle_jacobian_parameter_shift<T: Real>(
    config: &GeneratorConfig,
    angles: &[T],
) -> Result<Array2<T>> {
    let gates = build_circuit_from_angles(config, angles)?;
    let param_gates: Vec<_> = gates.iter().filter(|g| g.angle().is_some()).collect();
    if param_gates.len() != angles.len() {
        return Err(argument_error!("angle count does not match parameterized gates"));
    }
    let n_obs = readout_paulis(config).len();
    let mut jac = Array2::zeros((n_obs, angles.len()));

    let half_pi = T::of(TAU / 4.0);
    let three_half_pi = T::of(3.0 * TAU / 4.0);
    // (sqrt2 +- 1) / (4 sqrt2)
    let d_plus = T::of((2f64.sqrt() + 1.0) / (4.0 * 2f64.sqrt()));
    let d_minus = T::of((2f64.sqrt() - 1.0) / (4.0 * 2f64.sqrt()));

    let mut work = angles.to_vec();
    for (a, gate) in param_gates.iter().enumerate() {
        let theta = angles[a];
        let mut shifted_eval = |delta: T| -> Result<Vec<T>> {
            work[a] = theta + delta;
            let e = expectations_from_angles(config, &work);
            work[a] = theta;
            e
        };
        if gate.control().is_none() {
            let plus = shifted_eval(half_pi)?;
            let minus = shifted_eval(-half_pi)?;
            for o in 0..n_obs {
                jac[(o, a)] = (plus[o] - minus[o]) * T::of(0.5);
            }
        } else {
            let p1 = shifted_eval(half_pi)?;
            let m1 = shifted_eval(-half_pi)?;
            let p2 = shifted_eval(three_half_pi)?;
            let m2 = shifted_eval(-three_half_pi)?;
            for o in 0..n_obs {
                jac[(o, a)] = d_plus * (p1[o] - m1[o]) - d_minus * (p2[o] - m2[o]);
            }
        }
    }
    Ok(jac)
}

/// Chain an upstream latent gradient through the output scale, the angle
/// Jacobian, and the style map, producing (dL/dw, dL/db).
///
/// For u = xi*w + b the map contributes dtheta/dw = 2*pi*(1 - tanh^2 u)*xi
/// and dtheta/db = 2*pi*(1 - tanh^2 u).
pub fn style_chain<T: Real>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    noise: &[T],
    jacobian: &Array2<T>,
    upstream: &[T],
) -> Result<StyleGradients<T>> {
    let slots = angle_slots(config);
    let latent_dim = config.latent_dim();
    if upstream.len() != latent_dim {
        return Err(argument_error!(
            "upstream length {} != latent dim {}",
            upstream.len(),
            latent_dim
        ));
    }
    if jacobian.dim() != (latent_dim, slots.len()) {
        return Err(argument_error!(
            "jacobian shape {:?} != ({}, {})",
            jacobian.dim(),
            latent_dim,
            slots.len()
        ));
    }
    if noise.len() != config.n_qb {
        return Err(argument_error!("noise length {} != n_qb {}", noise.len(), config.n_qb));
    }

    let gain = T::of(config.output_scale.gain);
    let tau = T::of(TAU);
    let mut grads = StyleGradients {
        w: vec![T::zero(); params.w().len()],
        b: vec![T::zero(); params.b().len()],
    };
    for (a, slot) in slots.iter().enumerate() {
        let mut dl_dtheta = T::zero();
        for (o, &up) in upstream.iter().enumerate() {
            dl_dtheta += up * gain * jacobian[(o, a)];
        }
        let xi = noise[slot.qubit];
        let u = xi * params.w()[slot.flat] + params.b()[slot.flat];
        let th = u.tanh();
        let sech2 = T::one() - th * th;
        let dtheta_db = tau * sech2;
        grads.w[slot.flat] += dl_dtheta * dtheta_db * xi;
        grads.b[slot.flat] += dl_dtheta * dtheta_db;
    }
    Ok(grads)
}

/// Adjoint Jacobian followed by the style chain in one call.
pub fn latent_gradients<T: Real>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    noise: &[T],
    upstream: &[T],
) -> Result<StyleGradients<T>> {
    let jac = angle_jacobian(config, params, noise)?;
    style_chain(config, params, noise, &jac, upstream)
}
