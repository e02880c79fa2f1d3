//! Distribution metrics and significance aggregation.
//!
//! Includes the order-1 empirical Wasserstein distance (exact quantile
//! integration, so unequal sample sizes need no resampling), per-metric Z0
//! significance with direction-aware sign, multi-seed aggregation, Pearson
//! correlation matrices, and CSV ingestion of externally computed metric
//! tables so published results can be fed straight into the comparator.

use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::Array2;

use crate::latent_data::LatentDataset;
use crate::scalar::Real;
use crate::{argument_error, Error, Result};

/// Whether larger or smaller metric values are better; flips the sign of
/// the mean difference inside Z0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" | "maximize" => Some(Direction::Maximize),
            "min" | "minimize" => Some(Direction::Minimize),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Direction::Maximize => "maximize",
            Direction::Minimize => "minimize",
        }
    }
}

/// One metric summarized over repeated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord<T> {
    pub name: String,
    pub mean: T,
    pub std: T,
    pub direction: Direction,
}

/// Named collection of metric records with unique names.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTable<T> {
    pub scenario: String,
    pub records: Vec<MetricRecord<T>>,
}

impl<T: Real> ScenarioTable<T> {
    pub fn new(scenario: impl Into<String>, records: Vec<MetricRecord<T>>) -> Result<Self> {
        let table = Self { scenario: scenario.into(), records };
        table.check_unique()?;
        Ok(table)
    }

    fn check_unique(&self) -> Result<()> {
        for (i, r) in self.records.iter().enumerate() {
            if self.records[..i].iter().any(|p| p.name == r.name) {
                return Err(argument_error!("duplicate metric name {:?}", r.name));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&MetricRecord<T>> {
        self.records.iter().find(|r| r.name == name)
    }
}

/// Order-1 Wasserstein distance between two empirical samples.
///
/// Both samples are sorted and the quantile functions are integrated
/// exactly over the common breakpoint grid k/(n*m), which reduces to the
/// mean of |a_(i) - b_(i)| when the sizes agree.
pub fn wasserstein_1d<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(argument_error!("wasserstein_1d needs non-empty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos: u128 = 0; // in units of 1/(n*m)
    let mut total = T::zero();
    while i < n && j < m {
        let next_a = ((i + 1) * m) as u128;
        let next_b = ((j + 1) * n) as u128;
        let next = next_a.min(next_b);
        total += T::of((next - pos) as f64) * (a[i] - b[j]).abs();
        pos = next;
        if next == next_a {
            i += 1;
        }
        if next == next_b {
            j += 1;
        }
    }
    Ok(total / T::of((n * m) as f64))
}

/// Direction-aware standardized mean difference of one metric:
/// delta / sqrt(std_ref^2 + std_test^2), with delta = test - ref when the
/// metric is maximized and ref - test when it is minimized.
pub fn z0_metric<T: Real>(reference: &MetricRecord<T>, test: &MetricRecord<T>) -> Result<T> {
    if reference.direction != test.direction {
        return Err(argument_error!(
            "direction mismatch for {:?}: {} vs {}",
            reference.name,
            reference.direction.name(),
            test.direction.name()
        ));
    }
    let denom_sq = reference.std * reference.std + test.std * test.std;
    if denom_sq <= T::zero() {
        return Err(Error::UndefinedSignificance(format!(
            "both standard deviations of {:?} are zero",
            reference.name
        )));
    }
    let delta = match reference.direction {
        Direction::Maximize => test.mean - reference.mean,
        Direction::Minimize => reference.mean - test.mean,
    };
    Ok(delta / denom_sq.sqrt())
}

/// Per-metric Z0 values for two scenarios with identical metric sets, in
/// the reference table's order.
pub fn z0_per_metric<T: Real>(
    reference: &ScenarioTable<T>,
    test: &ScenarioTable<T>,
) -> Result<Vec<(String, T)>> {
    let ref_names: Vec<&str> = reference.records.iter().map(|r| r.name.as_str()).collect();
    let test_names: Vec<&str> = test.records.iter().map(|r| r.name.as_str()).collect();
    let missing: Vec<&str> =
        ref_names.iter().filter(|n| !test_names.contains(n)).copied().collect();
    let extra: Vec<&str> = test_names.iter().filter(|n| !ref_names.contains(n)).copied().collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(argument_error!(
            "metric sets differ: missing from test {:?}, extra in test {:?}",
            missing,
            extra
        ));
    }
    reference
        .records
        .iter()
        .map(|r| {
            let t = test.get(&r.name).expect("checked above");
            z0_metric(r, t).map(|z| (r.name.clone(), z))
        })
        .collect()
}

/// Arithmetic mean of the per-metric Z0 values.
pub fn z0_average<T: Real>(reference: &ScenarioTable<T>, test: &ScenarioTable<T>) -> Result<T> {
    let per = z0_per_metric(reference, test)?;
    let n = T::of(per.len() as f64);
    Ok(per.into_iter().map(|(_, z)| z).sum::<T>() / n)
}

/// Mean and sample standard deviation (n-1 denominator) over repeated runs.
pub fn aggregate_seeds<T: Real>(
    name: impl Into<String>,
    direction: Direction,
    values: &[T],
) -> Result<MetricRecord<T>> {
    if values.len() < 2 {
        return Err(argument_error!("aggregation needs at least 2 runs, got {}", values.len()));
    }
    let n = T::of(values.len() as f64);
    let mean = values.iter().copied().sum::<T>() / n;
    let ss = values.iter().map(|v| (*v - mean) * (*v - mean)).sum::<T>();
    let std = (ss / (n - T::one())).sqrt();
    Ok(MetricRecord { name: name.into(), mean, std, direction })
}

/// Pearson correlation matrix of the dataset columns. Entries touching a
/// zero-variance column are NaN rather than a silent zero; everything else
/// is symmetric with a unit diagonal.
pub fn correlation_matrix<T: Real>(dataset: &LatentDataset<T>) -> Result<Array2<T>> {
    let n = dataset.len();
    if n < 2 {
        return Err(argument_error!("correlation needs at least 2 rows"));
    }
    let d = dataset.dim();
    let rows = dataset.rows();
    let n_t = T::of(n as f64);
    let means: Vec<T> = (0..d).map(|j| rows.column(j).sum() / n_t).collect();
    let mut centered = rows.to_owned();
    for (j, m) in means.iter().enumerate() {
        centered.column_mut(j).mapv_inplace(|v| v - *m);
    }
    let stds: Vec<T> = (0..d)
        .map(|j| centered.column(j).iter().map(|v| *v * *v).sum::<T>().sqrt())
        .collect();
    let nan = T::nan();
    let mut corr = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let value = if stds[i] <= T::zero() || stds[j] <= T::zero() {
                nan
            } else if i == j {
                T::one()
            } else {
                let dot = centered
                    .column(i)
                    .iter()
                    .zip(centered.column(j).iter())
                    .map(|(x, y)| *x * *y)
                    .sum::<T>();
                dot / (stds[i] * stds[j])
            };
            corr[(i, j)] = value;
            corr[(j, i)] = value;
        }
    }
    Ok(corr)
}

/// Read a scenario table from CSV with columns name, mean, std, direction.
/// A header line is skipped when its mean column is non-numeric.
pub fn load_scenario_table<T: Real>(path: &Path) -> Result<ScT<T>> {
    let scenario = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut records: Vec<MetricRecord<T>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if cells.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 columns name,mean,std,direction; got {}", cells.len()),
            });
        }
        let mean = T::parse_str(cells[1]);
        if mean.is_none() && records.is_empty() && line_no == 1 {
            continue; // header
        }
        let mean = mean
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad mean {:?}", cells[1]) })?;
        let std = T::parse_str(cells[2])
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad std {:?}", cells[2]) })?;
        if std < T::zero() {
            return Err(Error::Parse { line: line_no, msg: "negative std".into() });
        }
        let direction = Direction::parse(cells[3]).ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("unknown direction {:?}", cells[3]),
        })?;
        if records.iter().any(|r| r.name == cells[0]) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate metric name {:?}", cells[0]),
            });
        }
        records.push(MetricRecord { name: cells[0].to_string(), mean, std, direction });
    }
    if records.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no metric records".into() });
    }
    ScenarioTable::new(scenario, records)
}

type ScT<T> = ScenarioTable<T>;

/// Write a scenario table as CSV with a header line.
pub fn save_scenario_table<T: Real>(table: &ScenarioTable<T>, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "name,mean,std,direction")?;
    for r in &table.records {
        writeln!(out, "{},{},{},{}", r.name, r.mean, r.std, r.direction.name())?;
    }
    Ok(())
}

/// Comparison report: one row per metric with both summaries and Z0, then
/// a one-line average. Returns the average.
pub fn write_comparison_csv<T: Real, W: Write>(
    out: &mut W,
    reference: &ScenarioTable<T>,
    test: &ScenarioTable<T>,
) -> Result<T> {
    let per = z0_per_metric(reference, test)?;
    writeln!(out, "metric,ref_mean,ref_std,test_mean,test_std,z0")?;
    for (name, z) in &per {
        let r = reference.get(name).expect("validated");
        let t = test.get(name).expect("validated");
        writeln!(out, "{},{},{},{},{},{}", name, r.mean, r.std, t.mean, t.std, z)?;
    }
    let avg = per.iter().map(|(_, z)| *z).sum::<T>() / T::of(per.len() as f64);
    writeln!(out, "average,,,,,{}", avg)?;
    Ok(avg)
}
