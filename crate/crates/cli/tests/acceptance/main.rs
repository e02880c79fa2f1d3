//! Acceptance suite: one test per numbered acceptance criterion, each
//! printing a `criterion N: PASS` line with its measured margins (run with
//! `--nocapture` to see them). Oracles live in the sibling module and are
//! independent of the implementation paths they check.

mod oracles;

use std::path::{Path, PathBuf};

use qlgan::ansatz::{
    self, AnsatzKind, GeneratorConfig, NoiseDistribution, OutputScale, Readout, StyleParams,
};
use qlgan::latent_data::{sample_synthetic, DistributionSpec, LatentDataset};
use qlgan::metrics::{load_scenario_table, wasserstein_1d, z0_average, z0_per_metric, Direction};
use qlgan::neural::{MlpDiscriminator, MlpGenerator};
use qlgan::qgrad;
use qlgan::recurrent::{bidirectional, dropout_between_layers, gru_sequence, gru_step, GruWeights};
use qlgan::statevector::{shot_estimate, GateOp, Pauli, StateVector};
use qlgan::wgan::{train, GeneratorKind, TrainConfig};
use qlgan::{Real, SeedStream};

use oracles::{assignment_w1, quadrature_w1_normal_uniform, rel_err};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn quantum_config(kind: AnsatzKind, n_qb: usize, n_layers: usize, readout: Readout) -> GeneratorConfig {
    GeneratorConfig {
        kind,
        n_qb,
        n_layers,
        readout,
        output_scale: OutputScale::default(),
        noise: NoiseDistribution::StandardNormal,
    }
}

// ---------------------------------------------------------------------------
// criterion 1: parameter-count oracle, exact
// ---------------------------------------------------------------------------
#[test]
fn criterion_1_parameter_counts() {
    use qlgan::ansatz::param_count;
    let quantum = [
        (AnsatzKind::Simple, 5, 2, 20),
        (AnsatzKind::Simple, 5, 4, 40),
        (AnsatzKind::Bel, 5, 2, 110),
        (AnsatzKind::Bel, 5, 4, 210),
        (AnsatzKind::Simple, 10, 2, 40),
        (AnsatzKind::Simple, 10, 4, 80),
        (AnsatzKind::Bel, 10, 2, 220),
        (AnsatzKind::Bel, 10, 4, 420),
        (AnsatzKind::Bel, 10, 6, 620),
        (AnsatzKind::Simple, 15, 2, 60),
        (AnsatzKind::Bel, 15, 2, 330),
    ];
    for (kind, n_qb, n_l, expected) in quantum {
        assert_eq!(param_count(kind, n_qb, n_l), expected, "{kind:?} {n_qb}qb {n_l}l");
    }
    let mut rng = SeedStream::new(1).stream("count");
    for (d_l, expected) in [(10usize, 705_162usize), (20, 716_692), (30, 728_222)] {
        assert_eq!(MlpGenerator::<f64>::new(d_l, &mut rng).param_count(), expected, "D_l {d_l}");
    }
    assert_eq!(MlpDiscriminator::<f64>::new(10, &mut rng).param_count(), 137_217);
    println!("criterion 1: PASS - 11 quantum and 3 classical generator counts plus the critic count reproduce exactly");
}

// ---------------------------------------------------------------------------
// criterion 2: Z0 reproduction from published tables
// ---------------------------------------------------------------------------

// printed per-metric Z0 columns, in fixture row order
const SIMPLE_PRINTED_Z0: [f64; 10] =
    [1.56, -7.21, 3.50, 2.40, -4.60, 1.43, -2.35, -2.31, 6.17, -8.56];
const BEL_PRINTED_Z0: [f64; 10] =
    [1.36, -3.43, 2.90, 0.82, -4.21, -0.17, -0.23, -0.71, 6.55, -5.42];

// half-ulp of each printed column (means and stds share the precision)
fn half_ulp(metric: &str) -> f64 {
    if metric == "weight_mean" {
        0.05
    } else {
        0.0005
    }
}

// extreme Z0 values attainable when each printed input moves within its
// rounding interval; Z is monotone in each argument so corners suffice
fn z0_rounding_interval(
    m1: f64,
    s1: f64,
    m2: f64,
    s2: f64,
    direction: Direction,
    ulp: f64,
) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m1c in [m1 - ulp, m1 + ulp] {
        for m2c in [m2 - ulp, m2 + ulp] {
            for s1c in [(s1 - ulp).max(0.0), s1 + ulp] {
                for s2c in [(s2 - ulp).max(0.0), s2 + ulp] {
                    let denom = (s1c * s1c + s2c * s2c).sqrt();
                    if denom == 0.0 {
                        continue;
                    }
                    let delta = match direction {
                        Direction::Maximize => m2c - m1c,
                        Direction::Minimize => m1c - m2c,
                    };
                    let z = delta / denom;
                    lo = lo.min(z);
                    hi = hi.max(z);
                }
            }
        }
    }
    (lo, hi)
}

#[test]
fn criterion_2_z0_reproduction() {
    // (a) averaging the printed per-metric values
    let simple_avg = SIMPLE_PRINTED_Z0.iter().sum::<f64>() / 10.0;
    let bel_avg = BEL_PRINTED_Z0.iter().sum::<f64>() / 10.0;
    assert!((simple_avg + 1.00).abs() <= 0.01, "printed simple average {simple_avg}");
    assert!((bel_avg + 0.26).abs() <= 0.01, "printed BEL average {bel_avg}");

    // (b) recomputing per-metric Z0 from the table means/stds
    let reference = load_scenario_table::<f64>(&fixture("scenario_ld10_classical_ref.csv")).unwrap();
    let mut out_of_band = 0usize;
    for (test_file, printed) in [
        ("scenario_ld10_qgan_simple.csv", &SIMPLE_PRINTED_Z0),
        ("scenario_ld10_qgan_bel.csv", &BEL_PRINTED_Z0),
    ] {
        let test = load_scenario_table::<f64>(&fixture(test_file)).unwrap();
        let recomputed = z0_per_metric(&reference, &test).unwrap();
        assert_eq!(recomputed.len(), 10);
        for ((name, z), &p) in recomputed.iter().zip(printed.iter()) {
            if (z - p).abs() <= 0.25 {
                continue;
            }
            // printed stds near zero make the +-0.25 band narrower than the
            // rounding of the inputs themselves; accept when the printed
            // value is attainable within the half-ulp input intervals
            out_of_band += 1;
            let r = reference.get(name).unwrap();
            let t = test.get(name).unwrap();
            let (lo, hi) =
                z0_rounding_interval(r.mean, r.std, t.mean, t.std, r.direction, half_ulp(name));
            assert!(
                (lo - 0.005..=hi + 0.005).contains(&p),
                "{test_file} {name}: recomputed {z}, printed {p}, rounding interval [{lo}, {hi}]"
            );
        }
    }

    assert!(
        out_of_band <= 6,
        "{out_of_band} per-metric entries needed rounding intervals; expected ~5 (near-zero stds)"
    );

    // (c) scenario averages against the tuned-VAE reference
    let vae = load_scenario_table::<f64>(&fixture("scenario_ld10_tuned_vae.csv")).unwrap();
    let nominal = load_scenario_table::<f64>(&fixture("scenario_ld10_gan_nominal.csv")).unwrap();
    let tuned = load_scenario_table::<f64>(&fixture("scenario_ld10_gan_tuned.csv")).unwrap();
    let z_nominal = z0_average(&vae, &nominal).unwrap();
    let z_tuned = z0_average(&vae, &tuned).unwrap();
    assert!((z_nominal - 1.45).abs() <= 0.15, "nominal GAN average {z_nominal}");
    assert!((z_tuned - 0.86).abs() <= 0.15, "tuned GAN average {z_tuned}");

    // (d) latent-dimension-30 scenario averages
    let ref30 = load_scenario_table::<f64>(&fixture("scenario_ld30_classical_ref.csv")).unwrap();
    let s30 = load_scenario_table::<f64>(&fixture("scenario_ld30_qgan_simple.csv")).unwrap();
    let b30 = load_scenario_table::<f64>(&fixture("scenario_ld30_qgan_bel.csv")).unwrap();
    let z_s30 = z0_average(&ref30, &s30).unwrap();
    let z_b30 = z0_average(&ref30, &b30).unwrap();
    assert!((z_s30 - 0.12).abs() <= 0.15, "ld30 simple average {z_s30}");
    assert!((z_b30 - 0.11).abs() <= 0.15, "ld30 BEL average {z_b30}");

    println!(
        "criterion 2: PASS - printed averages {simple_avg:.3}/{bel_avg:.3}; recomputed averages \
         {z_nominal:+.3}/{z_tuned:+.3}/{z_s30:+.3}/{z_b30:+.3}; {out_of_band}/20 per-metric \
         entries resolved by input-rounding intervals"
    );
}

// ---------------------------------------------------------------------------
// criterion 3: quantum gradient correctness
// ---------------------------------------------------------------------------
#[test]
fn criterion_3_quantum_gradients() {
    let grid = [(1usize, 1usize), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2)];
    let h = 1e-5;
    let mut max_rel = 0.0f64;
    for kind in [AnsatzKind::Simple, AnsatzKind::Bel] {
        for instance in 0..20 {
            let (n_qb, n_l) = grid[instance % grid.len()];
            let mut cfg = quantum_config(kind, n_qb, n_l, Readout::Dual);
            cfg.output_scale = OutputScale { gain: 1.4, offset: -0.2 };
            let mut rng = SeedStream::new(3000 + instance as u64).stream("c3");
            let params = StyleParams::<f64>::random(kind, n_qb, n_l, 0.7, &mut rng);
            let noise: Vec<f64> = (0..n_qb).map(|_| f64::standard_normal(&mut rng)).collect();
            let angles = ansatz::style_angles(&cfg, &params, &noise).unwrap();

            // angle Jacobians from both engines against central differences
            let adjoint = qgrad::angle_jacobian_at(&cfg, &angles).unwrap();
            let shift = qgrad::angle_jacobian_parameter_shift(&cfg, &angles).unwrap();
            let n_obs = cfg.latent_dim();
            let mut work = angles.clone();
            for a in 0..angles.len() {
                work[a] = angles[a] + h;
                let plus = ansatz::expectations_from_angles(&cfg, &work).unwrap();
                work[a] = angles[a] - h;
                let minus = ansatz::expectations_from_angles(&cfg, &work).unwrap();
                work[a] = angles[a];
                for o in 0..n_obs {
                    let fd = (plus[o] - minus[o]) / (2.0 * h);
                    for (engine, jac) in [("adjoint", &adjoint), ("shift", &shift)] {
                        let r = rel_err(jac[(o, a)], fd);
                        max_rel = max_rel.max(r);
                        assert!(
                            r < 1e-6,
                            "{kind:?} {n_qb}qb/{n_l}l {engine} ({o},{a}): {} vs fd {fd}",
                            jac[(o, a)]
                        );
                    }
                }
            }

            // style-chained (w, b) gradients against finite differences of
            // the scalar L = sum(upstream * latent)
            let upstream: Vec<f64> = (0..n_obs).map(|_| f64::standard_normal(&mut rng)).collect();
            let grads = qgrad::latent_gradients(&cfg, &params, &noise, &upstream).unwrap();
            let loss = |p: &StyleParams<f64>| -> f64 {
                ansatz::generate_latent(&cfg, p, &noise)
                    .unwrap()
                    .iter()
                    .zip(&upstream)
                    .map(|(l, u)| l * u)
                    .sum()
            };
            for i in 0..params.w().len() {
                for (which, analytic) in [("w", grads.w[i]), ("b", grads.b[i])] {
                    let mut p = params.clone();
                    let slot = if which == "w" { &mut p.w_mut()[i] } else { &mut p.b_mut()[i] };
                    *slot += h;
                    let plus = loss(&p);
                    *(if which == "w" { &mut p.w_mut()[i] } else { &mut p.b_mut()[i] }) -= 2.0 * h;
                    let minus = loss(&p);
                    let fd = (plus - minus) / (2.0 * h);
                    let r = rel_err(analytic, fd);
                    max_rel = max_rel.max(r);
                    assert!(r < 1e-6, "{kind:?} {n_qb}qb/{n_l}l {which}[{i}]: {analytic} vs {fd}");
                }
            }
        }
    }
    println!(
        "criterion 3: PASS - 20 instances per ansatz, both engines and the style chain; \
         max relative error {max_rel:.2e} (tolerance 1e-6)"
    );
}

// ---------------------------------------------------------------------------
// criterion 4: gradient-penalty second-order correctness
// ---------------------------------------------------------------------------
#[test]
fn criterion_4_penalty_gradients() {
    use qlgan::ndarray::{Array1, Array2};

    // closed form for a linear critic
    let mut rng = SeedStream::new(4).stream("c4");
    let mut linear = MlpDiscriminator::<f64>::with_dims(3, &[1], &mut rng);
    linear.layers_mut()[0].weights =
        Array2::from_shape_vec((1, 3), vec![0.6, -1.2, 2.0]).unwrap();
    linear.layers_mut()[0].bias = Array1::zeros(1);
    let w = linear.layers()[0].weights.row(0).to_owned();
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lambda = 10.0;
    let x = Array2::from_shape_fn((5, 3), |_| f64::standard_normal(&mut rng));
    let (grads, value) = linear.penalty_param_gradient(&x, lambda).unwrap();
    assert!((value - lambda * (norm - 1.0).powi(2)).abs() < 1e-10);
    for j in 0..3 {
        let closed = lambda * 2.0 * (norm - 1.0) * w[j] / norm;
        assert!(
            (grads.dense[0].0[(0, j)] - closed).abs() < 1e-10,
            "{} vs {closed}",
            grads.dense[0].0[(0, j)]
        );
    }

    // full critic, finite differences over a seeded parameter sample
    let d = MlpDiscriminator::<f64>::new(10, &mut rng);
    let x_hat = Array2::from_shape_fn((10, 10), |_| f64::standard_normal(&mut rng));
    let (grads, _) = d.penalty_param_gradient(&x_hat, lambda).unwrap();
    let flat_grads = grads.flat();
    let flat = d.params_flat();
    let h = 1e-4;
    let mut checked = 0usize;
    let mut max_rel = 0.0f64;
    let mut pick = SeedStream::new(44).stream("c4-pick");
    let loss = |p: &[f64]| -> f64 {
        let mut dd = d.clone();
        dd.set_params_flat(p);
        dd.penalty_param_gradient(&x_hat, lambda).unwrap().1
    };
    for _ in 0..600 {
        let i = (f64::uniform_01(&mut pick) * flat.len() as f64) as usize % flat.len();
        let mut p = flat.clone();
        p[i] += h;
        let plus = loss(&p);
        p[i] -= 2.0 * h;
        let minus = loss(&p);
        let fd = (plus - minus) / (2.0 * h);
        let r = rel_err(flat_grads[i], fd);
        max_rel = max_rel.max(r);
        assert!(r < 1e-4, "param {i}: analytic {} vs fd {fd}", flat_grads[i]);
        checked += 1;
    }
    println!(
        "criterion 4: PASS - linear closed form to 1e-10; {checked} sampled parameters of the \
         full critic match finite differences, max relative error {max_rel:.2e} (tolerance 1e-4)"
    );
}

// ---------------------------------------------------------------------------
// criterion 5: simulator analytic checks
// ---------------------------------------------------------------------------
#[test]
fn criterion_5_simulator_analytics() {
    // <Z> after RY(theta)|0> = cos(theta)
    for k in 0..32 {
        let theta = -6.0 + 12.0 * k as f64 / 31.0;
        let mut sv = StateVector::<f64>::init_zero(1).unwrap();
        sv.apply(&GateOp::Ry { target: 0, angle: theta }).unwrap();
        let z = sv.expectation(0, Pauli::Z).unwrap();
        assert!((z - theta.cos()).abs() < 1e-12, "theta {theta}: {z}");
    }

    // norm preservation and inverse round trips over random 100-gate sequences
    let mut worst_norm = 0.0f64;
    let mut worst_round_trip = 0.0f64;
    for seq in 0..20u64 {
        let mut rng = SeedStream::new(500 + seq).stream("c5");
        let gates: Vec<GateOp<f64>> = (0..100).map(|_| random_gate(5, &mut rng)).collect();
        let mut sv = StateVector::<f64>::init_zero(5).unwrap();
        sv.apply_all(&gates).unwrap();
        worst_norm = worst_norm.max((sv.norm_sqr() - 1.0).abs());
        assert!((sv.norm_sqr() - 1.0).abs() < 1e-9);

        let reference = sv.clone();
        for g in &gates {
            sv.apply(g).unwrap();
            sv.apply(&g.inverse()).unwrap();
        }
        for (a, b) in sv.amplitudes().iter().zip(reference.amplitudes()) {
            worst_round_trip = worst_round_trip.max((a - b).norm());
            assert!((a - b).norm() < 1e-12);
        }
    }
    println!(
        "criterion 5: PASS - cos(theta) readout to 1e-12, worst norm drift {worst_norm:.2e} \
         (tolerance 1e-9), worst inverse round trip {worst_round_trip:.2e} (tolerance 1e-12)"
    );
}

fn random_gate(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> GateOp<f64> {
    let t = (f64::uniform_01(rng) * n as f64) as usize % n;
    let c = (t + 1 + (f64::uniform_01(rng) * (n - 1) as f64) as usize % (n - 1)) % n;
    let angle = f64::uniform_symmetric(rng, 3.0);
    match (f64::uniform_01(rng) * 7.0) as usize {
        0 => GateOp::Rx { target: t, angle },
        1 => GateOp::Ry { target: t, angle },
        2 => GateOp::Rz { target: t, angle },
        3 => GateOp::Cnot { control: c, target: t },
        4 => GateOp::Crx { control: c, target: t, angle },
        5 => GateOp::Cry { control: c, target: t, angle },
        _ => GateOp::Crz { control: c, target: t, angle },
    }
}

// ---------------------------------------------------------------------------
// criterion 6: training smoke test (quantum and classical, five seeds)
// ---------------------------------------------------------------------------
#[test]
fn criterion_6_training_smoke() {
    let started = std::time::Instant::now();
    let dataset = sample_synthetic::<f32>(&DistributionSpec::StandardNormal, 10_000, 10, 0xDA7A)
        .expect("target dataset");

    let quantum = GeneratorConfig {
        kind: AnsatzKind::Bel,
        n_qb: 5,
        n_layers: 2,
        readout: Readout::Dual,
        output_scale: OutputScale { gain: 2.5, offset: 0.0 },
        noise: NoiseDistribution::StandardNormal,
    };
    let mut ratios = Vec::new();
    for (label, kind, qcfg) in [
        ("quantum BEL", GeneratorKind::QuantumBel, Some(&quantum)),
        ("classical", GeneratorKind::Classical, None),
    ] {
        let mut per_seed = Vec::new();
        for seed in 1..=5u64 {
            // two critic steps per generator step: at 1:1 the critic lags
            // the big classical net and the game orbits without closing
            // the distance, while 5:1 does not fit the runtime budget;
            // 2 is the smallest stably converging ratio (measured)
            let base = TrainConfig {
                seed,
                generator_kind: kind,
                n_critic: 2,
                ..TrainConfig::default()
            };
            let init_cfg = TrainConfig { epochs: 0, ..base.clone() };
            let init = train::<f32>(&init_cfg, qcfg, &dataset).expect("init");
            let w_init = mean_w1_to_target(&init.generator, &dataset, seed);

            let trained = train::<f32>(&base, qcfg, &dataset).expect("train");
            let w_final = mean_w1_to_target(&trained.generator, &dataset, seed);
            let ratio = w_final / w_init;
            println!(
                "criterion 6 [{label}] seed {seed}: W1 {w_init:.4} -> {w_final:.4} (ratio {ratio:.3})"
            );
            per_seed.push(ratio);
        }
        per_seed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = per_seed[per_seed.len() / 2];
        assert!(median < 0.5, "{label}: median ratio {median} not below 0.5");
        ratios.push((label, median));
    }
    println!(
        "criterion 6: PASS - median W1 ratios {} (threshold 0.5), {:.1} s total",
        ratios.iter().map(|(l, m)| format!("{l} {m:.3}")).collect::<Vec<_>>().join(", "),
        started.elapsed().as_secs_f64()
    );
}

fn mean_w1_to_target(
    generator: &qlgan::wgan::Generator<f32>,
    target: &LatentDataset<f32>,
    seed: u64,
) -> f64 {
    let mut rng = SeedStream::new(seed).stream("smoke-sample");
    let samples = generator.sample_eval(10_000, None, &mut rng).expect("sample");
    let dim = target.dim();
    let mut total = 0.0;
    for j in 0..dim {
        let a: Vec<f64> = samples.column(j).iter().map(|v| *v as f64).collect();
        let b: Vec<f64> = target.column(j).iter().map(|v| *v as f64).collect();
        total += wasserstein_1d(&a, &b).unwrap();
    }
    total / dim as f64
}

// ---------------------------------------------------------------------------
// criterion 7: shot-noise consistency
// ---------------------------------------------------------------------------
#[test]
fn criterion_7_shot_noise() {
    let cfg = quantum_config(AnsatzKind::Bel, 3, 2, Readout::Dual);
    let mut rng = SeedStream::new(7).stream("c7");
    let params = StyleParams::<f64>::random(cfg.kind, 3, 2, 0.8, &mut rng);
    let noise: Vec<f64> = (0..3).map(|_| f64::standard_normal(&mut rng)).collect();
    let angles = ansatz::style_angles(&cfg, &params, &noise).unwrap();
    let exact = ansatz::expectations_from_angles(&cfg, &angles).unwrap();

    let reps = 10_000;
    let shots = 1_000u64;
    let mut max_bias = 0.0f64;
    let mut worst_var_ratio = 1.0f64;
    for (o, &e) in exact.iter().enumerate() {
        let draws: Vec<f64> =
            (0..reps).map(|_| shot_estimate(e, shots, &mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / reps as f64;
        let var =
            draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let expected_var = (1.0 - e * e) / shots as f64;
        let bias = (mean - e).abs();
        max_bias = max_bias.max(bias);
        assert!(bias < 0.01, "output {o}: bias {bias}");
        assert!(expected_var > 1e-12, "degenerate fixture expectation {e}");
        let ratio = var / expected_var;
        if (ratio - 1.0).abs() > (worst_var_ratio - 1.0).abs() {
            worst_var_ratio = ratio;
        }
        assert!((ratio - 1.0).abs() < 0.15, "output {o}: variance ratio {ratio}");
    }
    println!(
        "criterion 7: PASS - {} outputs, max bias {max_bias:.4} (tolerance 0.01), worst \
         variance ratio {worst_var_ratio:.3} (tolerance 15%)",
        exact.len()
    );
}

// ---------------------------------------------------------------------------
// criterion 8: GRU property suite
// ---------------------------------------------------------------------------
#[test]
fn criterion_8_gru_properties() {
    use qlgan::ndarray::Array1;
    let mut rng = SeedStream::new(8).stream("c8");

    // z-saturation identity at b_z = 50
    let mut w = GruWeights::<f64>::random(6, 4, &mut rng);
    w.b_z.fill(50.0);
    let h_prev = Array1::from_shape_fn(6, |_| f64::standard_normal(&mut rng));
    let x = Array1::from_shape_fn(4, |_| f64::standard_normal(&mut rng));
    let h = gru_step(&x, &h_prev, &w).unwrap();
    for (a, b) in h.iter().zip(h_prev.iter()) {
        assert!((a - b).abs() < 1e-12, "saturated gate leaked: {a} vs {b}");
    }

    // gate ranges and the convex-combination bound
    for _ in 0..1000 {
        let w = GruWeights::<f64>::random(5, 3, &mut rng);
        let h_prev = Array1::from_shape_fn(5, |_| 2.5 * f64::standard_normal(&mut rng));
        let x = Array1::from_shape_fn(3, |_| f64::standard_normal(&mut rng));
        let h = gru_step(&x, &h_prev, &w).unwrap();
        for (a, b) in h.iter().zip(h_prev.iter()) {
            assert!(a.abs() <= b.abs().max(1.0) + 1e-12);
        }
    }

    // fold associativity under sequence splitting
    let w = GruWeights::<f64>::random(5, 3, &mut rng);
    let h0 = Array1::from_shape_fn(5, |_| f64::standard_normal(&mut rng));
    let inputs: Vec<Array1<f64>> =
        (0..12).map(|_| Array1::from_shape_fn(3, |_| f64::standard_normal(&mut rng))).collect();
    let (full, _) = gru_sequence(&inputs, &h0, &w).unwrap();
    for split in 1..inputs.len() {
        let (mid, _) = gru_sequence(&inputs[..split], &h0, &w).unwrap();
        let (chained, _) = gru_sequence(&inputs[split..], &mid, &w).unwrap();
        for (a, b) in full.iter().zip(chained.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    // bidirectional output dimension 2 * hidden
    let out = bidirectional(&inputs, &h0, &h0, &w, &w).unwrap();
    assert_eq!(out.len(), 10);

    // dropout survival fraction at p = 0.75
    let big = Array1::from_elem(10_000, 1.0f64);
    let masked = dropout_between_layers(&big, 0.75, &mut rng).unwrap();
    let survive = masked.iter().filter(|v| **v != 0.0).count() as f64 / 10_000.0;
    assert!((survive - 0.25).abs() < 0.02, "survival {survive}");

    println!(
        "criterion 8: PASS - saturation identity, 1000 convex bounds, fold associativity, \
         doubled bidirectional dimension, dropout survival {survive:.3}"
    );
}

// ---------------------------------------------------------------------------
// criterion 9: wasserstein oracle equivalence
// ---------------------------------------------------------------------------
#[test]
fn criterion_9_wasserstein_oracles() {
    // assignment oracle on 200 random equal-size instances
    let mut rng = SeedStream::new(9).stream("c9");
    let mut worst = 0.0f64;
    for instance in 0..200 {
        let n = 1 + (f64::uniform_01(&mut rng) * 50.0) as usize % 50;
        let a: Vec<f64> = (0..n).map(|_| 2.0 * f64::standard_normal(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| 2.0 * f64::standard_normal(&mut rng) + 0.5).collect();
        let fast = wasserstein_1d(&a, &b).unwrap();
        let oracle = assignment_w1(&a, &b);
        worst = worst.max((fast - oracle).abs());
        assert!((fast - oracle).abs() < 1e-12, "instance {instance} (n={n}): {fast} vs {oracle}");
    }

    // quadrature oracle for N(0,1) vs U(0,1); the closed-form value is
    // 0.39894 + 0.20113 + 0.01675 + 0.08331 = 0.70061 (piecewise CDF areas)
    let quad = quadrature_w1_normal_uniform();
    assert!((quad - 0.70061).abs() < 1e-3, "quadrature {quad}");
    let normal = sample_synthetic::<f64>(&DistributionSpec::StandardNormal, 100_000, 1, 91).unwrap();
    let uniform = sample_synthetic::<f64>(&DistributionSpec::Uniform01, 100_000, 1, 92).unwrap();
    let empirical = wasserstein_1d(&normal.column(0), &uniform.column(0)).unwrap();
    assert!((empirical - quad).abs() < 0.01, "empirical {empirical} vs quadrature {quad}");
    assert!(empirical > 0.3);

    println!(
        "criterion 9: PASS - 200 assignment instances, worst gap {worst:.2e} (tolerance 1e-12); \
         quadrature {quad:.5}, empirical at n=100000 {empirical:.5}"
    );
}

// ---------------------------------------------------------------------------
// criterion 10: command determinism
// ---------------------------------------------------------------------------

fn qlgan_bin() -> &'static str {
    env!("CARGO_BIN_EXE_qlgan")
}

fn run_ok(dir: &Path, args: &[&str]) {
    let output = std::process::Command::new(qlgan_bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn qlgan");
    assert!(
        output.status.success(),
        "qlgan {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
}

// compare two output trees byte for byte; run.log is wall-clock only, and
// the seconds column of history CSVs is the one sanctioned timing field
fn assert_trees_match(a: &Path, b: &Path) {
    let mut files_a = collect_files(a);
    let mut files_b = collect_files(b);
    files_a.sort();
    files_b.sort();
    assert_eq!(files_a, files_b, "output file sets differ");
    for rel in &files_a {
        if rel.file_name().is_some_and(|n| n == "run.log") {
            continue;
        }
        let mut left = std::fs::read(a.join(rel)).unwrap();
        let mut right = std::fs::read(b.join(rel)).unwrap();
        let under_histories = rel.components().any(|c| c.as_os_str() == "histories");
        if under_histories {
            left = mask_seconds_column(&left);
            right = mask_seconds_column(&right);
        }
        assert_eq!(left, right, "file {} differs between runs", rel.display());
    }
}

fn collect_files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out
}

fn mask_seconds_column(bytes: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(bytes);
    text.lines()
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() == 5 {
                format!("{},{},{},{}", cells[0], cells[1], cells[2], cells[3])
            } else {
                line.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        .into_bytes()
}

#[test]
fn criterion_10_cli_determinism() {
    let root = tempfile::tempdir().unwrap();
    let root = root.path();
    std::fs::create_dir_all(root.join("a")).unwrap();
    std::fs::create_dir_all(root.join("b")).unwrap();

    let config = r#"{
  "generator": { "kind": "bel", "n_qb": 2, "n_layers": 1, "readout": "dual",
                 "output_scale": {"gain": 1.5, "offset": 0.0}, "noise": "standard_normal" },
  "train": { "epochs": 2, "batch_size": 8, "generator_kind": "quantum_bel" },
  "data": { "kind": "standard_normal" },
  "dim": 4, "n_samples": 48, "data_seed": 5, "seeds": [1, 2], "out_dir": "run"
}"#;
    std::fs::write(root.join("config.json"), config).unwrap();

    for side in ["a", "b"] {
        let dir = root.join(side);
        run_ok(
            &dir,
            &["gen-data", "--config", "../config.json", "--out", "data.csv"],
        );
        run_ok(
            &dir,
            &["train", "--config", "../config.json", "--dataset", "data.csv", "--out-dir", "run"],
        );
        run_ok(
            &dir,
            &[
                "sample",
                "--checkpoint",
                "run/checkpoints/seed_1.generator.csv",
                "--n",
                "20",
                "--shots",
                "100",
                "--seed",
                "3",
                "--out",
                "samples.csv",
            ],
        );
        run_ok(
            &dir,
            &[
                "eval",
                "--generated",
                "samples.csv",
                "--reference",
                "data.csv",
                "--out-dir",
                "evaldir",
            ],
        );
        let ref_fixture = fixture("scenario_ld10_classical_ref.csv");
        let test_fixture = fixture("scenario_ld10_qgan_bel.csv");
        run_ok(
            &dir,
            &[
                "compare",
                "--reference",
                ref_fixture.to_str().unwrap(),
                "--tests",
                test_fixture.to_str().unwrap(),
                "--out-dir",
                "comparedir",
            ],
        );
    }

    assert_trees_match(&root.join("a"), &root.join("b"));

    // and the sampled values are quantized on the shot grid 2k/100 - 1
    let samples = std::fs::read_to_string(root.join("a/samples.csv")).unwrap();
    for cell in samples.lines().flat_map(|l| l.split(',')) {
        let v: f64 = cell.parse().unwrap();
        let pre_scale = v / 1.5; // undo the configured output gain
        let k = (pre_scale + 1.0) * 50.0;
        assert!((k - k.round()).abs() < 1e-9, "sample {v} is not on the shot grid");
    }

    println!("criterion 10: PASS - gen-data/train/sample/eval/compare re-runs byte-identical (seconds column of histories excepted)");
}
