//! Style-based re-uploading ansätze.
//!
//! Two circuit templates are provided. The simple circuit is one column of
//! RY rotations per layer followed by a CNOT ring. The BEL circuit applies
//! RZ-RY-RZ on every qubit, a CRY ring, and a CRX reverse ring per layer,
//! plus one final RY column before readout.
//!
//! Every rotation angle is produced from the input noise element of the
//! gate's control-or-single qubit through the bounded style map
//! `2*pi*tanh(xi*w + b)`, so the noise is re-uploaded into all layers and no
//! angle can over-rotate past a full turn.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::statevector::{shot_estimate, GateOp, Pauli, StateVector};
use crate::{argument_error, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    Simple,
    Bel,
}

impl AnsatzKind {
    pub fn name(&self) -> &'static str {
        match self {
            AnsatzKind::Simple => "simple",
            AnsatzKind::Bel => "bel",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "simple" => Some(AnsatzKind::Simple),
            "bel" => Some(AnsatzKind::Bel),
            _ => None,
        }
    }

    // Parameterized rotations per qubit per layer.
    fn slots_per_layer(&self) -> usize {
        match self {
            AnsatzKind::Simple => 1,
            AnsatzKind::Bel => 5,
        }
    }

    // Trailing RY column of the BEL circuit adds one slot per qubit.
    fn final_slots(&self) -> usize {
        match self {
            AnsatzKind::Simple => 0,
            AnsatzKind::Bel => 1,
        }
    }

    fn slots_per_qubit(&self, n_layers: usize) -> usize {
        self.slots_per_layer() * n_layers + self.final_slots()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    Single,
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDistribution {
    StandardNormal,
    Uniform01,
}

/// Elementwise affine map applied to the readout expectations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputScale {
    pub gain: f64,
    pub offset: f64,
}

impl Default for OutputScale {
    fn default() -> Self {
        Self { gain: 1.0, offset: 0.0 }
    }
}

/// Shape and readout of a quantum generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: AnsatzKind,
    pub n_qb: usize,
    pub n_layers: usize,
    pub readout: Readout,
    #[serde(default)]
    pub output_scale: OutputScale,
    #[serde(default = "default_noise")]
    pub noise: NoiseDistribution,
}

fn default_noise() -> NoiseDistribution {
    NoiseDistribution::StandardNormal
}

impl GeneratorConfig {
    pub fn latent_dim(&self) -> usize {
        match self.readout {
            Readout::Single => self.n_qb,
            Readout::Dual => 2 * self.n_qb,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qb == 0 {
            return Err(argument_error!("n_qb must be positive"));
        }
        if self.n_layers == 0 {
            return Err(argument_error!("n_layers must be positive"));
        }
        Ok(())
    }
}

/// The style map: a bounded angle in (-2*pi, 2*pi).
pub fn angle<T: Real>(xi: T, w: T, b: T) -> T {
    T::of(TAU) * (xi * w + b).tanh()
}

/// Number of trainable scalars (w and b) of an ansatz.
pub fn param_count(kind: AnsatzKind, n_qb: usize, n_layers: usize) -> usize {
    2 * n_qb * kind.slots_per_qubit(n_layers)
}

/// Trainable style tensors, stored flat in (qubit, layer, k) lexicographic
/// order. For the BEL circuit the final-RY slot of qubit q sits at layer
/// index `n_layers`, k = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleParams<T> {
    kind: AnsatzKind,
    n_qb: usize,
    n_layers: usize,
    w: Vec<T>,
    b: Vec<T>,
}

impl<T: Real> StyleParams<T> {
    pub fn zeros(kind: AnsatzKind, n_qb: usize, n_layers: usize) -> Self {
        let n = kind.slots_per_qubit(n_layers) * n_qb;
        Self { kind, n_qb, n_layers, w: vec![T::zero(); n], b: vec![T::zero(); n] }
    }

    /// Uniform(-scale, scale) initialization of every entry.
    pub fn random<R: Rng + ?Sized>(
        kind: AnsatzKind,
        n_qb: usize,
        n_layers: usize,
        scale: T,
        rng: &mut R,
    ) -> Self {
        let mut p = Self::zeros(kind, n_qb, n_layers);
        for w in &mut p.w {
            *w = T::uniform_symmetric(rng, scale);
        }
        for b in &mut p.b {
            *b = T::uniform_symmetric(rng, scale);
        }
        p
    }

    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }

    pub fn n_qb(&self) -> usize {
        self.n_qb
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    /// Total trainable scalar count, w and b together.
    pub fn param_count(&self) -> usize {
        2 * self.w.len()
    }

    pub fn w(&self) -> &[T] {
        &self.w
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn w_mut(&mut self) -> &mut [T] {
        &mut self.w
    }

    pub fn b_mut(&mut self) -> &mut [T] {
        &mut self.b
    }

    fn slots_per_qubit(&self) -> usize {
        self.kind.slots_per_qubit(self.n_layers)
    }

    /// Flat index of slot (qubit, layer, k); the BEL final-RY slot is
    /// addressed as (qubit, n_layers, 0).
    pub fn slot_index(&self, qubit: usize, layer: usize, k: usize) -> usize {
        debug_assert!(qubit < self.n_qb);
        debug_assert!(
            (layer < self.n_layers && k < self.kind.slots_per_layer())
                || (layer == self.n_layers && k == 0 && self.kind.final_slots() == 1)
        );
        qubit * self.slots_per_qubit() + layer * self.kind.slots_per_layer() + k
    }

    pub fn matches(&self, config: &GeneratorConfig) -> bool {
        self.kind == config.kind && self.n_qb == config.n_qb && self.n_layers == config.n_layers
    }

    /// Write the checkpoint: a `style,<kind>,<n_qb>,<n_layers>` header, then
    /// all w values in slot order, then all b values, one per line.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "style,{},{},{}", self.kind.name(), self.n_qb, self.n_layers)?;
        for v in self.w.iter().chain(self.b.iter()) {
            writeln!(out, "{}", v)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let reader = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty checkpoint".into() })?;
        let header = header?;
        let fields: Vec<&str> = header.trim().split(',').collect();
        let parse_err = |msg: &str| Error::Parse { line: 1, msg: msg.into() };
        if fields.len() != 4 || fields[0] != "style" {
            return Err(parse_err("expected header style,<kind>,<n_qb>,<n_layers>"));
        }
        let kind = AnsatzKind::parse(fields[1]).ok_or_else(|| parse_err("unknown ansatz kind"))?;
        let n_qb: usize = fields[2].parse().map_err(|_| parse_err("bad n_qb"))?;
        let n_layers: usize = fields[3].parse().map_err(|_| parse_err("bad n_layers"))?;
        let n = kind.slots_per_qubit(n_layers) * n_qb;
        let mut values = Vec::with_capacity(2 * n);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v = T::parse_str(&line)
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad number {:?}", line) })?;
            values.push(v);
        }
        if values.len() != 2 * n {
            return Err(Error::Parse {
                line: values.len() + 1,
                msg: format!("expected {} values, found {}", 2 * n, values.len()),
            });
        }
        let b = values.split_off(n);
        Ok(Self { kind, n_qb, n_layers, w: values, b })
    }
}

/// Emission-order record of one parameterized gate: which flat parameter
/// slot produced its angle and which qubit's noise element feeds the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngleSlot {
    pub flat: usize,
    pub qubit: usize,
}

/// Number of parameterized gates the circuit emits.
pub fn angle_count(config: &GeneratorConfig) -> usize {
    let n = config.n_qb;
    let per_layer = match config.kind {
        AnsatzKind::Simple => n,
        AnsatzKind::Bel => 3 * n + if n >= 2 { 2 * n } else { 0 },
    };
    let final_col = match config.kind {
        AnsatzKind::Simple => 0,
        AnsatzKind::Bel => n,
    };
    config.n_layers * per_layer + final_col
}

/// Slots of all parameterized gates in emission order.
pub fn angle_slots(config: &GeneratorConfig) -> Vec<AngleSlot> {
    let spq = config.kind.slots_per_qubit(config.n_layers);
    let spl = config.kind.slots_per_layer();
    let slot = |q: usize, l: usize, k: usize| AngleSlot { flat: q * spq + l * spl + k, qubit: q };
    let n = config.n_qb;
    let mut slots = Vec::new();
    for l in 0..config.n_layers {
        match config.kind {
            AnsatzKind::Simple => {
                for q in 0..n {
                    slots.push(slot(q, l, 0));
                }
            }
            AnsatzKind::Bel => {
                for q in 0..n {
                    slots.push(slot(q, l, 0));
                    slots.push(slot(q, l, 1));
                    slots.push(slot(q, l, 2));
                }
                if n >= 2 {
                    for q in 0..n {
                        slots.push(slot(q, l, 3));
                    }
                    for q in 0..n {
                        slots.push(slot(q, l, 4));
                    }
                }
            }
        }
    }
    if config.kind == AnsatzKind::Bel {
        for q in 0..n {
            slots.push(slot(q, config.n_layers, 0));
        }
    }
    slots
}

/// Angles of all parameterized gates in emission order, from the style map.
pub fn style_angles<T: Real>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    noise: &[T],
) -> Result<Vec<T>> {
    check_shapes(config, params, noise)?;
    Ok(angle_slots(config)
        .iter()
        .map(|s| angle(noise[s.qubit], params.w[s.flat], params.b[s.flat]))
        .collect())
}

/// Gate list of the circuit for explicit angles in emission order.
pub fn build_circuit_from_angles<T: Real>(
    config: &GeneratorConfig,
    angles: &[T],
) -> Result<Vec<GateOp<T>>> {
    config.validate()?;
    let expected = angle_count(config);
    if angles.len() != expected {
        return Err(argument_error!("expected {} angles, got {}", expected, angles.len()));
    }
    let n = config.n_qb;
    let mut gates = Vec::new();
    let mut next = angles.iter().copied();
    let mut take = || next.next().expect("angle count checked above");
    for _ in 0..config.n_layers {
        match config.kind {
            AnsatzKind::Simple => {
                for q in 0..n {
                    gates.push(GateOp::Ry { target: q, angle: take() });
                }
                // CNOT ring; degenerate cases: none for 1 qubit, one for 2
                if n == 2 {
                    gates.push(GateOp::Cnot { control: 0, target: 1 });
                } else if n > 2 {
                    for q in 0..n {
                        gates.push(GateOp::Cnot { control: q, target: (q + 1) % n });
                    }
                }
            }
            AnsatzKind::Bel => {
                for q in 0..n {
                    gates.push(GateOp::Rz { target: q, angle: take() });
                    gates.push(GateOp::Ry { target: q, angle: take() });
                    gates.push(GateOp::Rz { target: q, angle: take() });
                }
                if n >= 2 {
                    for q in 0..n {
                        gates.push(GateOp::Cry { control: q, target: (q + 1) % n, angle: take() });
                    }
                    for q in 0..n {
                        gates.push(GateOp::Crx { control: q, target: (q + n - 1) % n, angle: take() });
                    }
                }
            }
        }
    }
    if config.kind == AnsatzKind::Bel {
        for q in 0..n {
            gates.push(GateOp::Ry { target: q, angle: take() });
        }
    }
    Ok(gates)
}

/// Gate list of the styled circuit for one noise vector.
pub fn build_circuit<T: Real>(
    config: &GeneratorConfig,
    noise: &[T],
    params: &StyleParams<T>,
) -> Result<Vec<GateOp<T>>> {
    let angles = style_angles(config, params, noise)?;
    build_circuit_from_angles(config, &angles)
}

fn check_shapes<T: Real>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    noise: &[T],
) -> Result<()> {
    config.validate()?;
    if !params.matches(config) {
        return Err(argument_error!(
            "params shaped for {}/{} qubits/{} layers, config wants {}/{}/{}",
            params.kind.name(),
            params.n_qb,
            params.n_layers,
            config.kind.name(),
            config.n_qb,
            config.n_layers
        ));
    }
    if noise.len() != config.n_qb {
        return Err(argument_error!("noise length {} != n_qb {}", noise.len(), config.n_qb));
    }
    Ok(())
}

/// Readout Paulis in output order: the Z block, then the X block for dual.
pub fn readout_paulis(config: &GeneratorConfig) -> Vec<(usize, Pauli)> {
    let mut out: Vec<(usize, Pauli)> = (0..config.n_qb).map(|q| (q, Pauli::Z)).collect();
    if config.readout == Readout::Dual {
        out.extend((0..config.n_qb).map(|q| (q, Pauli::X)));
    }
    out
}

/// Simulate the circuit from |0...0> and return the pre-scale expectations.
pub fn expectations_from_angles<T: Real>(
    config: &GeneratorConfig,
    angles: &[T],
) -> Result<Vec<T>> {
    let gates = build_circuit_from_angles(config, angles)?;
    let mut sv = StateVector::init_zero(config.n_qb)?;
    sv.apply_all(&gates)?;
    readout_paulis(config)
        .into_iter()
        .map(|(q, p)| sv.expectation(q, p))
        .collect()
}

fn scale_all<T: Real>(config: &GeneratorConfig, mut values: Vec<T>) -> Vec<T> {
    let gain = T::of(config.output_scale.gain);
    let offset = T::of(config.output_scale.offset);
    for v in &mut values {
        *v = gain * *v + offset;
    }
    values
}

/// Latent vector for explicit angles (pre-scale expectations mapped through
/// the output scale).
pub fn latent_from_angles<T: Real>(config: &GeneratorConfig, angles: &[T]) -> Result<Vec<T>> {
    Ok(scale_all(config, expectations_from_angles(config, angles)?))
}

/// Latent vector for one noise draw.
pub fn generate_latent<T: Real>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    noise: &[T],
) -> Result<Vec<T>> {
    let angles = style_angles(config, params, noise)?;
    latent_from_angles(config, &angles)
}

/// Latent vector with each expectation replaced by a finite-shot estimate.
pub fn generate_latent_shots<T: Real, R: Rng + ?Sized>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    noise: &[T],
    n_shots: u64,
    rng: &mut R,
) -> Result<Vec<T>> {
    let angles = style_angles(config, params, noise)?;
    let exact = expectations_from_angles(config, &angles)?;
    let estimates = exact
        .into_iter()
        .map(|e| shot_estimate(e, n_shots, rng))
        .collect::<Result<Vec<T>>>()?;
    Ok(scale_all(config, estimates))
}

/// One noise vector from the configured distribution.
pub fn sample_noise<T: Real, R: Rng + ?Sized>(
    config: &GeneratorConfig,
    rng: &mut R,
) -> Vec<T> {
    (0..config.n_qb)
        .map(|_| match config.noise {
            NoiseDistribution::StandardNormal => T::standard_normal(rng),
            NoiseDistribution::Uniform01 => T::uniform_01(rng),
        })
        .collect()
}

/// n_samples x latent_dim batch with i.i.d. noise rows.
pub fn generate_batch<T: Real, R: Rng + ?Sized>(
    config: &GeneratorConfig,
    params: &StyleParams<T>,
    n_samples: usize,
    rng: &mut R,
) -> Result<Array2<T>> {
    if n_samples == 0 {
        return Err(argument_error!("n_samples must be positive"));
    }
    let mut out = Array2::zeros((n_samples, config.latent_dim()));
    for mut row in out.rows_mut() {
        let noise = sample_noise::<T, R>(config, rng);
        let latent = generate_latent(config, params, &noise)?;
        row.assign(&Array1::from_vec(latent));
    }
    Ok(out)
}
