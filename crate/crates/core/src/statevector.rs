//! Exact statevector simulation of n-qubit circuits.
//!
//! The state is a dense vector of 2^n complex amplitudes in little-endian
//! convention: qubit 0 is the least significant bit of the amplitude index.
//! Gates are applied in place by stride iteration over amplitude pairs, so no
//! 2^n x 2^n matrices are ever materialized.

use num_complex::Complex;

use crate::scalar::Real;
use crate::{argument_error, config_error, Result};

/// Default upper bound on the register size (16 GiB of f64 amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Pauli operator label for expectations and rotation generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// One gate of the supported set: single-qubit rotations, CNOT, and
/// controlled rotations. Rotation conventions:
///
/// ```text
/// RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
/// RX(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]
/// RZ(t) = diag(e^{-it/2}, e^{+it/2})
/// ```
///
/// Controlled rotations apply the rotation to `target` when `control` is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp<T> {
    Rx { target: usize, angle: T },
    Ry { target: usize, angle: T },
    Rz { target: usize, angle: T },
    Cnot { control: usize, target: usize },
    Crx { control: usize, target: usize, angle: T },
    Cry { control: usize, target: usize, angle: T },
    Crz { control: usize, target: usize, angle: T },
}

impl<T: Real> GateOp<T> {
    pub fn target(&self) -> usize {
        match *self {
            GateOp::Rx { target, .. }
            | GateOp::Ry { target, .. }
            | GateOp::Rz { target, .. }
            | GateOp::Cnot { target, .. }
            | GateOp::Crx { target, .. }
            | GateOp::Cry { target, .. }
            | GateOp::Crz { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            GateOp::Cnot { control, .. }
            | GateOp::Crx { control, .. }
            | GateOp::Cry { control, .. }
            | GateOp::Crz { control, .. } => Some(control),
            _ => None,
        }
    }

    pub fn angle(&self) -> Option<T> {
        match *self {
            GateOp::Rx { angle, .. }
            | GateOp::Ry { angle, .. }
            | GateOp::Rz { angle, .. }
            | GateOp::Crx { angle, .. }
            | GateOp::Cry { angle, .. }
            | GateOp::Crz { angle, .. } => Some(angle),
            GateOp::Cnot { .. } => None,
        }
    }

    /// Same gate with a different rotation angle. No-op for CNOT.
    pub fn with_angle(&self, new: T) -> Self {
        let mut g = *self;
        match &mut g {
            GateOp::Rx { angle, .. }
            | GateOp::Ry { angle, .. }
            | GateOp::Rz { angle, .. }
            | GateOp::Crx { angle, .. }
            | GateOp::Cry { angle, .. }
            | GateOp::Crz { angle, .. } => *angle = new,
            GateOp::Cnot { .. } => {}
        }
        g
    }

    /// Inverse gate: negated angle for rotations, CNOT is self-inverse.
    pub fn inverse(&self) -> Self {
        match self.angle() {
            Some(a) => self.with_angle(-a),
            None => *self,
        }
    }

    /// Rotation axis of the target qubit, if the gate is parameterized.
    pub fn axis(&self) -> Option<Pauli> {
        match *self {
            GateOp::Rx { .. } | GateOp::Crx { .. } => Some(Pauli::X),
            GateOp::Ry { .. } | GateOp::Cry { .. } => Some(Pauli::Y),
            GateOp::Rz { .. } | GateOp::Crz { .. } => Some(Pauli::Z),
            GateOp::Cnot { .. } => None,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let t = self.target();
        if t >= n_qubits {
            return Err(argument_error!("gate target {} out of range for {} qubits", t, n_qubits));
        }
        if let Some(c) = self.control() {
            if c >= n_qubits {
                return Err(argument_error!("gate control {} out of range for {} qubits", c, n_qubits));
            }
            if c == t {
                return Err(argument_error!("gate control and target collide on qubit {}", c));
            }
        }
        Ok(())
    }
}

/// Dense complex state of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// |0...0> on `n_qubits` qubits, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn init_zero(n_qubits: usize) -> Result<Self> {
        Self::init_zero_capped(n_qubits, DEFAULT_MAX_QUBITS)
    }

    /// |0...0> with a caller-chosen qubit cap.
    pub fn init_zero_capped(n_qubits: usize, max_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > max_qubits {
            return Err(config_error!(
                "n_qubits must be in 1..={}, got {}",
                max_qubits,
                n_qubits
            ));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1usize << n_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// <self|other>.
    pub fn dot(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &GateOp<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let half = T::of(0.5);
        match *gate {
            GateOp::Rx { target, angle } => {
                let (c, s) = ((angle * half).cos(), (angle * half).sin());
                let m = rot_x(c, s);
                self.single_qubit(target, m, None);
            }
            GateOp::Ry { target, angle } => {
                let (c, s) = ((angle * half).cos(), (angle * half).sin());
                let m = rot_y(c, s);
                self.single_qubit(target, m, None);
            }
            GateOp::Rz { target, angle } => {
                let (c, s) = ((angle * half).cos(), (angle * half).sin());
                let m = rot_z(c, s);
                self.single_qubit(target, m, None);
            }
            GateOp::Cnot { control, target } => {
                let mask_c = 1usize << control;
                let mask_t = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & mask_c != 0 && i & mask_t == 0 {
                        self.amps.swap(i, i | mask_t);
                    }
                }
            }
            GateOp::Crx { control, target, angle } => {
                let (c, s) = ((angle * half).cos(), (angle * half).sin());
                self.single_qubit(target, rot_x(c, s), Some(control));
            }
            GateOp::Cry { control, target, angle } => {
                let (c, s) = ((angle * half).cos(), (angle * half).sin());
                self.single_qubit(target, rot_y(c, s), Some(control));
            }
            GateOp::Crz { control, target, angle } => {
                let (c, s) = ((angle * half).cos(), (angle * half).sin());
                self.single_qubit(target, rot_z(c, s), Some(control));
            }
        }
        debug_assert!(
            (self.norm_sqr() - T::one()).abs() < T::of(1e-10).max(T::epsilon() * T::of(100.0))
                || self.n_qubits > 20,
            "norm drifted after gate application"
        );
        Ok(())
    }

    /// Apply a whole gate sequence in order.
    pub fn apply_all(&mut self, gates: &[GateOp<T>]) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// <psi| P_qubit |psi>, always in [-1, 1].
    pub fn expectation(&self, qubit: usize, pauli: Pauli) -> Result<T> {
        if qubit >= self.n_qubits {
            return Err(argument_error!(
                "expectation qubit {} out of range for {} qubits",
                qubit,
                self.n_qubits
            ));
        }
        let mask = 1usize << qubit;
        let two = T::of(2.0);
        let val = match pauli {
            Pauli::Z => {
                let mut acc = T::zero();
                for (i, a) in self.amps.iter().enumerate() {
                    let p = a.norm_sqr();
                    if i & mask == 0 {
                        acc += p;
                    } else {
                        acc -= p;
                    }
                }
                acc
            }
            Pauli::X => {
                // <X> = 2 Re sum_{i: bit=0} conj(a_i) a_{i|mask}
                let mut acc = T::zero();
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        acc += (self.amps[i].conj() * self.amps[i | mask]).re;
                    }
                }
                acc * two
            }
            Pauli::Y => {
                // <Y> = 2 Im sum_{i: bit=0} conj(a_i) a_{i|mask}
                let mut acc = T::zero();
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        acc += (self.amps[i].conj() * self.amps[i | mask]).im;
                    }
                }
                acc * two
            }
        };
        Ok(val)
    }

    /// In-place P on `target`, optionally projected onto control-bit-1 states
    /// (amplitudes with control bit 0 are zeroed). This is the action of the
    /// derivative generator of (controlled) rotations, used by adjoint
    /// differentiation; it is not unitary when a control is present.
    pub(crate) fn apply_generator(&mut self, target: usize, pauli: Pauli, control: Option<usize>) {
        let mask_t = 1usize << target;
        let zero = Complex::new(T::zero(), T::zero());
        let keep = |i: usize| control.is_none_or(|c| i & (1usize << c) != 0);
        match pauli {
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & mask_t == 0 {
                        let (lo, hi) = (self.amps[i], self.amps[i | mask_t]);
                        self.amps[i] = if keep(i) { hi } else { zero };
                        self.amps[i | mask_t] = if keep(i | mask_t) { lo } else { zero };
                    }
                }
            }
            Pauli::Y => {
                let im = Complex::new(T::zero(), T::one());
                for i in 0..self.amps.len() {
                    if i & mask_t == 0 {
                        let (lo, hi) = (self.amps[i], self.amps[i | mask_t]);
                        self.amps[i] = if keep(i) { -im * hi } else { zero };
                        self.amps[i | mask_t] = if keep(i | mask_t) { im * lo } else { zero };
                    }
                }
            }
            Pauli::Z => {
                for i in 0..self.amps.len() {
                    if !keep(i) {
                        self.amps[i] = zero;
                    } else if i & mask_t != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
        }
    }

    // 2x2 unitary on `target`, conditioned on `control` = 1 when present.
    fn single_qubit(&mut self, target: usize, m: [[Complex<T>; 2]; 2], control: Option<usize>) {
        let mask_t = 1usize << target;
        let mask_c = control.map(|c| 1usize << c);
        let low_bits = mask_t - 1;
        let n_pairs = self.amps.len() >> 1;
        for p in 0..n_pairs {
            // index with target bit 0, enumerated without branching on it
            let i0 = ((p & !low_bits) << 1) | (p & low_bits);
            if let Some(mc) = mask_c {
                if i0 & mc == 0 {
                    continue;
                }
            }
            let i1 = i0 | mask_t;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn rot_x<T: Real>(c: T, s: T) -> [[Complex<T>; 2]; 2] {
    let zero = T::zero();
    [
        [Complex::new(c, zero), Complex::new(zero, -s)],
        [Complex::new(zero, -s), Complex::new(c, zero)],
    ]
}

fn rot_y<T: Real>(c: T, s: T) -> [[Complex<T>; 2]; 2] {
    let zero = T::zero();
    [
        [Complex::new(c, zero), Complex::new(-s, zero)],
        [Complex::new(s, zero), Complex::new(c, zero)],
    ]
}

fn rot_z<T: Real>(c: T, s: T) -> [[Complex<T>; 2]; 2] {
    let zero = T::zero();
    [
        [Complex::new(c, -s), Complex::new(zero, zero)],
        [Complex::new(zero, zero), Complex::new(c, s)],
    ]
}

/// Finite-shot estimate of an expectation value.
///
/// Draws k ~ Binomial(n_shots, (1+e)/2) and returns 2k/n_shots - 1, the
/// unbiased estimator a hardware run with `n_shots` measurements produces.
pub fn shot_estimate<T: Real, R: rand::Rng + ?Sized>(
    expectation: T,
    n_shots: u64,
    rng: &mut R,
) -> Result<T> {
    if n_shots == 0 {
        return Err(argument_error!("n_shots must be positive"));
    }
    let e = expectation.to_f64_();
    if e.abs() > 1.0 + 1e-9 {
        return Err(argument_error!("expectation {} outside [-1, 1]", e));
    }
    let p = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
    let binom = rand_distr::Binomial::new(n_shots, p)
        .map_err(|err| argument_error!("invalid binomial parameters: {}", err))?;
    let k = rand::Rng::sample(rng, binom);
    Ok(T::of(2.0 * (k as f64) / (n_shots as f64) - 1.0))
}
