//! Implementations of the pipeline subcommands. Every command is a pure
//! function of its resolved configuration and seeds: outputs are written
//! with deterministic formatting and fixed iteration order, and wall-clock
//! timing goes to `run.log` only.

use std::fmt::Write as FmtWrite;
use std::io::Write as IoWrite;
use std::path::{Path, PathBuf};

use qlgan::ndarray::Array2;

use qlgan::latent_data::{sample_synthetic, write_matrix_csv, LatentDataset};
use qlgan::metrics::{
    aggregate_seeds, correlation_matrix, load_scenario_table, wasserstein_1d,
    write_comparison_csv, Direction, ScenarioTable,
};
use qlgan::recurrent::{bidirectional, GruWeights};
use qlgan::wgan::{load_generator, train, Generator, TrainConfig};
use qlgan::{Error, Result, SeedStream};

use crate::config::RunConfig;

fn column_mean_std(data: &Array2<f64>, j: usize) -> (f64, f64) {
    let col = data.column(j);
    let n = col.len() as f64;
    let mean = col.sum() / n;
    let var = if col.len() > 1 {
        col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Synthesize a latent dataset and write it as CSV.
pub fn gen_data(config: &RunConfig, out: Option<PathBuf>) -> Result<()> {
    let spec = config
        .data
        .ok_or_else(|| Error::Config("gen-data needs a synthetic data spec".into()))?;
    if config.n_samples == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let ds = sample_synthetic::<f64>(&spec, config.n_samples, config.dim, config.data_seed)?;
    let path = match out {
        Some(p) => p,
        None => {
            std::fs::create_dir_all(&config.out_dir)?;
            config.echo(&config.out_dir)?;
            config.out_dir.join("data.csv")
        }
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    ds.save_csv(&path)?;
    println!("wrote {} rows of dimension {} to {}", ds.len(), ds.dim(), path.display());
    println!("dim,mean,std");
    for j in 0..ds.dim() {
        let (mean, std) = column_mean_std(&ds.rows().to_owned(), j);
        println!("{},{:.6},{:.6}", j, mean, std);
    }
    Ok(())
}

fn resolve_dataset(config: &RunConfig) -> Result<LatentDataset<f64>> {
    match (&config.dataset, &config.data) {
        (Some(path), _) => LatentDataset::load_csv(path),
        (None, Some(spec)) => {
            sample_synthetic(spec, config.n_samples, config.dim, config.data_seed)
        }
        (None, None) => Err(Error::Config("no dataset path and no synthetic spec".into())),
    }
}

/// Train one WGAN-GP per seed; write checkpoints, histories, and an
/// aggregate loss summary under the output directory.
pub fn cmd_train(config: &RunConfig) -> Result<()> {
    let dataset = resolve_dataset(config)?;
    // validate the latent dimension before any expensive work; train() re-checks
    if let Some(g) = &config.generator {
        if matches!(
            config.train.generator_kind,
            qlgan::wgan::GeneratorKind::QuantumSimple | qlgan::wgan::GeneratorKind::QuantumBel
        ) && g.latent_dim() != dataset.dim()
        {
            return Err(Error::Config(format!(
                "quantum latent dimension {} != dataset dimension {}",
                g.latent_dim(),
                dataset.dim()
            )));
        }
    }

    let out = &config.out_dir;
    std::fs::create_dir_all(out.join("checkpoints"))?;
    std::fs::create_dir_all(out.join("histories"))?;
    std::fs::create_dir_all(out.join("metrics"))?;
    config.echo(out)?;
    let mut log = std::fs::File::create(out.join("run.log"))?;

    let mut finals: Vec<(u64, f64, f64, f64)> = Vec::new();
    for &seed in &config.seeds {
        let started = std::time::Instant::now();
        let train_config = TrainConfig { seed, ..config.train.clone() };
        let result = train::<f64>(&train_config, config.generator.as_ref(), &dataset)?;
        let gen_path = out.join("checkpoints").join(format!("seed_{seed}.generator.csv"));
        let disc_path = out.join("checkpoints").join(format!("seed_{seed}.discriminator.csv"));
        result.generator.save(&gen_path)?;
        result.discriminator.save(&disc_path)?;
        let mut hist = std::fs::File::create(out.join("histories").join(format!("seed_{seed}.csv")))?;
        result.history.write_csv(&mut hist)?;

        let last = result.history.epochs.last();
        let (c, g, gp) = last.map_or((0.0, 0.0, 0.0), |e| (e.critic_loss, e.gen_loss, e.gp_mean));
        finals.push((seed, c, g, gp));
        writeln!(
            log,
            "[{:?}] seed {} finished in {:.1}s ({} critic / {} generator updates)",
            std::time::SystemTime::now(),
            seed,
            started.elapsed().as_secs_f64(),
            result.critic_updates,
            result.generator_updates
        )?;
        println!("seed {seed}: critic {c:.4}, generator {g:.4}, penalty {gp:.4}");
    }

    let mut summary = String::new();
    writeln!(summary, "seed,critic_loss,gen_loss,gp_mean").expect("string write");
    for (seed, c, g, gp) in &finals {
        writeln!(summary, "{},{},{},{}", seed, c, g, gp).expect("string write");
    }
    if finals.len() >= 2 {
        let columns = [
            finals.iter().map(|t| t.1).collect::<Vec<f64>>(),
            finals.iter().map(|t| t.2).collect(),
            finals.iter().map(|t| t.3).collect(),
        ];
        let mut means = Vec::new();
        let mut stds = Vec::new();
        for (name, values) in ["critic_loss", "gen_loss", "gp_mean"].iter().zip(&columns) {
            let record = aggregate_seeds(*name, Direction::Minimize, values)?;
            means.push(record.mean.to_string());
            stds.push(record.std.to_string());
        }
        writeln!(summary, "mean,{}", means.join(",")).expect("string write");
        writeln!(summary, "std,{}", stds.join(",")).expect("string write");
    }
    std::fs::write(out.join("metrics").join("final_losses.csv"), summary)?;
    println!("artifacts under {}", out.display());
    Ok(())
}

/// Sample latent vectors from a trained checkpoint.
pub fn sample(
    checkpoint: &Path,
    n: usize,
    shots: Option<u64>,
    seed: u64,
    out: &Path,
    run_config: Option<&RunConfig>,
) -> Result<()> {
    if n == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    if shots == Some(0) {
        return Err(Error::Argument("shot budget must be positive".into()));
    }
    // quantum checkpoints need the readout/scale config; search the run
    // directory layout (<run>/checkpoints/<file> -> <run>/config.json)
    // when no explicit config is given
    let discovered;
    let quantum_config = match run_config {
        Some(rc) => rc.generator.as_ref(),
        None => {
            let sibling = checkpoint
                .parent()
                .and_then(|d| d.parent())
                .map(|d| d.join("config.json"))
                .filter(|p| p.is_file());
            match sibling {
                Some(p) => {
                    discovered = RunConfig::load(&p)?;
                    discovered.generator.as_ref()
                }
                None => None,
            }
        }
    };
    let generator: Generator<f64> = load_generator(checkpoint, quantum_config)?;
    let mut rng = SeedStream::new(seed).stream("sample");
    let rows = generator.sample_eval(n, shots, &mut rng)?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(out)?);
    write_matrix_csv(&mut file, &rows.view())?;
    drop(file);
    println!("wrote {} rows of dimension {} to {}", rows.nrows(), rows.ncols(), out.display());
    Ok(())
}

/// Distribution metrics of a generated sample against a reference sample.
pub fn eval(generated: &Path, reference: &Path, out_dir: &Path) -> Result<()> {
    let gen_ds = LatentDataset::<f64>::load_csv(generated)?;
    let ref_ds = LatentDataset::<f64>::load_csv(reference)?;
    if gen_ds.dim() != ref_ds.dim() {
        return Err(Error::Argument(format!(
            "dimension mismatch: generated {} vs reference {}",
            gen_ds.dim(),
            ref_ds.dim()
        )));
    }
    std::fs::create_dir_all(out_dir)?;

    let mut wasserstein = String::from("dim,wasserstein\n");
    let mut sum = 0.0;
    for j in 0..gen_ds.dim() {
        let d = wasserstein_1d(&gen_ds.column(j), &ref_ds.column(j))?;
        sum += d;
        writeln!(wasserstein, "{},{}", j, d).expect("string write");
    }
    let mean_w = sum / gen_ds.dim() as f64;
    writeln!(wasserstein, "mean,{}", mean_w).expect("string write");
    std::fs::write(out_dir.join("wasserstein.csv"), wasserstein)?;

    let gen_rows = gen_ds.rows().to_owned();
    let ref_rows = ref_ds.rows().to_owned();
    let mut moments = String::from("dim,gen_mean,gen_std,ref_mean,ref_std\n");
    for j in 0..gen_ds.dim() {
        let (gm, gs) = column_mean_std(&gen_rows, j);
        let (rm, rs) = column_mean_std(&ref_rows, j);
        writeln!(moments, "{},{},{},{},{}", j, gm, gs, rm, rs).expect("string write");
    }
    std::fs::write(out_dir.join("moments.csv"), moments)?;

    let corr = correlation_matrix(&gen_ds)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(out_dir.join("correlation.csv"))?);
    write_matrix_csv(&mut file, &corr.view())?;
    drop(file);

    println!("mean per-dimension wasserstein distance: {mean_w:.6}");
    println!("reports under {}", out_dir.display());
    Ok(())
}

/// Z0 comparison of one reference scenario against test scenarios.
pub fn compare(reference: &Path, tests: &[PathBuf], out_dir: &Path) -> Result<()> {
    let ref_table: ScenarioTable<f64> = load_scenario_table(reference)?;
    std::fs::create_dir_all(out_dir)?;

    type Column = (String, Vec<(String, f64)>, f64);
    let mut columns: Vec<Column> = Vec::new();
    for test_path in tests {
        let test_table: ScenarioTable<f64> = load_scenario_table(test_path)?;
        let per = qlgan::metrics::z0_per_metric(&ref_table, &test_table)?;
        let mut file = std::io::BufWriter::new(
            std::fs::File::create(out_dir.join(format!("compare_{}.csv", test_table.scenario)))?,
        );
        let avg = write_comparison_csv(&mut file, &ref_table, &test_table)?;
        columns.push((test_table.scenario.clone(), per, avg));
    }

    // console table mirrors the reports: metric rows, scenario columns
    let name_width = ref_table
        .records
        .iter()
        .map(|r| r.name.len())
        .chain(["average".len()])
        .max()
        .unwrap_or(8);
    print!("{:<name_width$}", "metric");
    for (scenario, _, _) in &columns {
        print!("  {:>12}", scenario);
    }
    println!();
    for r in &ref_table.records {
        print!("{:<name_width$}", r.name);
        for (_, per, _) in &columns {
            let z = per.iter().find(|(n, _)| *n == r.name).map(|(_, z)| *z).unwrap_or(f64::NAN);
            print!("  {:>+12.2}", z);
        }
        println!();
    }
    print!("{:<name_width$}", "average");
    for (_, _, avg) in &columns {
        print!("  {:>+12.2}", avg);
    }
    println!();
    Ok(())
}

/// Deterministic bidirectional GRU demonstration.
pub fn gru_demo(seed: u64, hidden: usize, input_dim: usize, steps: usize) -> Result<()> {
    let seeds = SeedStream::new(seed);
    let mut rng = seeds.stream("gru-demo");
    let w_fwd = GruWeights::<f64>::random(hidden, input_dim, &mut rng);
    let w_bwd = GruWeights::<f64>::random(hidden, input_dim, &mut rng);
    let h0 = qlgan::ndarray::Array1::zeros(hidden);
    let inputs: Vec<qlgan::ndarray::Array1<f64>> = (0..steps)
        .map(|_| qlgan::ndarray::Array1::from_shape_fn(input_dim, |_| qlgan::Real::standard_normal(&mut rng)))
        .collect();
    let state = bidirectional(&inputs, &h0, &h0, &w_fwd, &w_bwd)?;
    println!(
        "bidirectional GRU: {} steps, input dim {}, hidden dim {} -> state dim {}",
        steps,
        input_dim,
        hidden,
        state.len()
    );
    let rendered: Vec<String> = state.iter().map(|v| format!("{v:.6}")).collect();
    println!("[{}]", rendered.join(", "));
    Ok(())
}
