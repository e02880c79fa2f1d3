//! Latent datasets: CSV and binary interchange, synthetic target
//! distributions, and deterministic batching.
//!
//! CSV is the canonical format (comma-separated, '.' decimal, LF lines, one
//! vector per line, optional single header line auto-detected when the
//! first line is non-numeric). A binary mirror with a 16-byte magic/version
//! header and little-endian f64 payload is provided for bulk data.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::{argument_error, Error, Result};

/// Magic prefix of the binary latent format, padded to 16 bytes with the
/// format version.
const BINARY_MAGIC: &[u8; 12] = b"QLGAN-LATENT";
const BINARY_VERSION: u32 = 1;

/// A finite latent dataset: n rows of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentDataset<T> {
    rows: Array2<T>,
}

impl<T: Real> LatentDataset<T> {
    pub fn new(rows: Array2<T>) -> Result<Self> {
        if rows.ncols() == 0 {
            return Err(argument_error!("dataset dimension must be at least 1"));
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(argument_error!("dataset contains non-finite values"));
        }
        Ok(Self { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rows(&self) -> ArrayView2<'_, T> {
        self.rows.view()
    }

    pub fn into_rows(self) -> Array2<T> {
        self.rows
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows.column(j).to_vec()
    }

    /// Load a CSV matrix; a non-numeric first line is treated as a header.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let reader = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut data: Vec<T> = Vec::new();
        let mut dim: Option<usize> = None;
        let mut n_rows = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let cells: Vec<&str> = trimmed.split(',').collect();
            let parsed: Option<Vec<T>> = cells.iter().map(|c| T::parse_str(c)).collect();
            match parsed {
                None if n_rows == 0 && dim.is_none() => continue, // header line
                None => {
                    let bad = cells.iter().find(|c| T::parse_str(c).is_none()).unwrap_or(&"");
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("non-numeric cell {:?}", bad),
                    });
                }
                Some(values) => {
                    match dim {
                        None => dim = Some(values.len()),
                        Some(d) if d != values.len() => {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: format!("ragged row: {} cells, expected {}", values.len(), d),
                            })
                        }
                        Some(_) => {}
                    }
                    data.extend(values);
                    n_rows += 1;
                }
            }
        }
        let dim = dim.ok_or(Error::Parse { line: 1, msg: "no data rows".into() })?;
        let rows = Array2::from_shape_vec((n_rows, dim), data).expect("consistent shape");
        Self::new(rows)
    }

    /// Write as plain CSV, no header. Values use the shortest representation
    /// that round-trips, so save/load is an identity.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_matrix_csv(&mut out, &self.rows.view())?;
        Ok(())
    }

    /// Binary mirror: 16-byte header, u64 rows, u64 cols, row-major LE f64.
    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&BINARY_VERSION.to_le_bytes())?;
        out.write_all(&(self.len() as u64).to_le_bytes())?;
        out.write_all(&(self.dim() as u64).to_le_bytes())?;
        for v in self.rows.iter() {
            out.write_all(&v.to_f64_().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let mut reader = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut header = [0u8; 16];
        reader.read_exact(&mut header)?;
        if &header[..12] != BINARY_MAGIC {
            return Err(Error::Parse { line: 1, msg: "bad magic in binary latent file".into() });
        }
        let version = u32::from_le_bytes(header[12..16].try_into().expect("4 bytes"));
        if version != BINARY_VERSION {
            return Err(Error::Parse { line: 1, msg: format!("unsupported version {}", version) });
        }
        let mut w = [0u8; 8];
        reader.read_exact(&mut w)?;
        let n = u64::from_le_bytes(w) as usize;
        reader.read_exact(&mut w)?;
        let dim = u64::from_le_bytes(w) as usize;
        let mut data = Vec::with_capacity(n * dim);
        for _ in 0..n * dim {
            reader.read_exact(&mut w)?;
            data.push(T::of(f64::from_le_bytes(w)));
        }
        let rows = Array2::from_shape_vec((n, dim), data)
            .map_err(|_| Error::Parse { line: 1, msg: "truncated binary latent file".into() })?;
        Self::new(rows)
    }

    /// Batches of row indices for one epoch: a seeded shuffle when
    /// requested, with the trailing partial batch dropped unless
    /// `drop_last` is off.
    pub fn batches(
        &self,
        batch_size: usize,
        seed: u64,
        shuffle: bool,
        drop_last: bool,
    ) -> Result<Vec<Vec<usize>>> {
        if batch_size == 0 {
            return Err(argument_error!("batch_size must be positive"));
        }
        if batch_size > self.len() {
            return Err(argument_error!(
                "batch_size {} exceeds dataset size {}; drop-last would yield zero batches",
                batch_size,
                self.len()
            ));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        if shuffle {
            let mut rng = crate::rng::SeedStream::new(seed).stream("batch-shuffle");
            // Fisher-Yates
            for i in (1..order.len()).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
        }
        let mut out: Vec<Vec<usize>> = order.chunks(batch_size).map(|c| c.to_vec()).collect();
        if drop_last {
            if let Some(last) = out.last() {
                if last.len() < batch_size {
                    out.pop();
                }
            }
        }
        Ok(out)
    }

    /// Materialize one batch of rows.
    pub fn gather(&self, indices: &[usize]) -> Array2<T> {
        let mut out = Array2::zeros((indices.len(), self.dim()));
        for (r, &i) in indices.iter().enumerate() {
            out.row_mut(r).assign(&self.rows.row(i));
        }
        out
    }
}

/// Write any matrix as plain CSV.
pub fn write_matrix_csv<W: Write, T: Real>(out: &mut W, m: &ArrayView2<'_, T>) -> Result<()> {
    for row in m.rows() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                write!(out, ",")?;
            }
            write!(out, "{}", v)?;
            first = false;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Synthetic target distribution, sampled i.i.d. per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    Uniform01,
    StandardNormal,
    /// exp(mu + sigma N(0,1)) + shift.
    ShiftedLogNormal { mu: f64, sigma: f64, shift: f64 },
    /// Density proportional to cos^2(pi x / 2) on [lo, hi]: for the default
    /// range [-3, 3] this has exactly three interior peaks at -2, 0, +2 and
    /// vanishes at +-1 and +-3. Sampled by rejection.
    SinThreePeak { lo: f64, hi: f64 },
}

impl DistributionSpec {
    /// The log-normal target: mu = 0, sigma = 0.558, shifted two units down.
    pub fn shifted_log_normal_default() -> Self {
        DistributionSpec::ShiftedLogNormal { mu: 0.0, sigma: 0.558, shift: -2.0 }
    }

    pub fn sin_three_peak_default() -> Self {
        DistributionSpec::SinThreePeak { lo: -3.0, hi: 3.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::ShiftedLogNormal { sigma, .. } if sigma <= 0.0 => {
                Err(argument_error!("log-normal sigma must be positive"))
            }
            DistributionSpec::SinThreePeak { lo, hi } if lo >= hi => {
                Err(argument_error!("sin range must have lo < hi"))
            }
            _ => Ok(()),
        }
    }

    fn draw<T: Real, R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            DistributionSpec::Uniform01 => T::uniform_01(rng),
            DistributionSpec::StandardNormal => T::standard_normal(rng),
            DistributionSpec::ShiftedLogNormal { mu, sigma, shift } => {
                let n = T::standard_normal(rng).to_f64_();
                T::of((mu + sigma * n).exp() + shift)
            }
            DistributionSpec::SinThreePeak { lo, hi } => loop {
                let x = lo + (hi - lo) * T::uniform_01(rng).to_f64_();
                let density = (std::f64::consts::FRAC_PI_2 * x).cos().powi(2);
                if T::uniform_01(rng).to_f64_() < density {
                    return T::of(x);
                }
            },
        }
    }
}

/// n i.i.d. samples of dimension `dim`; a pure function of (spec, n, dim, seed).
pub fn sample_synthetic<T: Real>(
    spec: &DistributionSpec,
    n: usize,
    dim: usize,
    seed: u64,
) -> Result<LatentDataset<T>> {
    if n == 0 {
        return Err(argument_error!("sample count must be positive"));
    }
    if dim == 0 {
        return Err(argument_error!("dimension must be positive"));
    }
    spec.validate()?;
    let mut rng = crate::rng::SeedStream::new(seed).stream("synthetic");
    let rows = Array2::from_shape_fn((n, dim), |_| spec.draw::<T, _>(&mut rng));
    LatentDataset::new(rows)
}
