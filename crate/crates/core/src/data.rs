//! Synthetic Dirichlet-mixture benchmarks, dataset files and downsampling.
//!
//! Sampling uses `ChaCha8Rng::seed_from_u64(seed)`; a point first draws its
//! component from a uniform variate against the cumulative weights, then
//! one `Gamma(alpha_n, 1)` variate per coordinate, normalized to sum to one.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{LabeledSimplexDataset, SimplexDataset};

/// A mixture of Dirichlet components with `n` points drawn under `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletSpec {
    /// `(alpha, weight)` per component.
    pub components: Vec<(Vec<f64>, f64)>,
    pub n: usize,
    pub seed: u64,
}

impl DirichletSpec {
    pub fn validate(&self) -> Result<()> {
        let d = self.components.first().map(|c| c.0.len()).ok_or_else(|| Error::Config("no components".into()))?;
        if d == 0 {
            return Err(Error::Config("components need at least one coordinate".into()));
        }
        for (alpha, w) in &self.components {
            if alpha.len() != d {
                return Err(Error::Shape { expected: d, found: alpha.len() });
            }
            if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(Error::Config(format!("Dirichlet parameters must be positive: {alpha:?}")));
            }
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::Config(format!("invalid component weight {w}")));
            }
        }
        let total: f64 = self.components.iter().map(|c| c.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("component weights sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.components.first().map_or(0, |c| c.0.len())
    }
}

/// Component parameters of the balanced three-class benchmark.
pub const SIMU_ALPHAS: [[f64; 3]; 3] = [[1.0, 1.0, 5.0], [25.0, 5.0, 5.0], [5.0, 7.0, 5.0]];

/// Proportions permuted across the imbalanced benchmark.
pub const ISIMUS_PROPORTIONS: [f64; 3] = [0.75, 0.2, 0.05];

/// Balanced benchmark: the three [`SIMU_ALPHAS`] components, equal weights.
pub fn simu_spec(n: usize, seed: u64) -> DirichletSpec {
    DirichletSpec { components: SIMU_ALPHAS.iter().map(|a| (a.to_vec(), 1.0 / 3.0)).collect(), n, seed }
}

/// The six permutations of [`ISIMUS_PROPORTIONS`], in lexicographic order of
/// the index permutation.
pub fn isimus_weights() -> [[f64; 3]; 6] {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.map(|p| p.map(|i| ISIMUS_PROPORTIONS[i]))
}

/// Imbalanced benchmark: one spec per weight permutation, all sharing `n`
/// and `seed`.
pub fn make_isimus(n: usize, seed: u64) -> Vec<DirichletSpec> {
    isimus_weights()
        .iter()
        .map(|w| DirichletSpec {
            components: SIMU_ALPHAS.iter().zip(w).map(|(a, &w)| (a.to_vec(), w)).collect(),
            n,
            seed,
        })
        .collect()
}

/// Draws `spec.n` labeled points; the label is the component index.
pub fn sample_dirichlet_mixture(spec: &DirichletSpec) -> Result<LabeledSimplexDataset> {
    spec.validate()?;
    let d = spec.dim();
    let gammas: Vec<Vec<Gamma<f64>>> = spec
        .components
        .iter()
        .map(|(alpha, _)| alpha.iter().map(|&a| Gamma::new(a, 1.0).expect("validated shape")).collect())
        .collect();
    let mut cumulative = Vec::with_capacity(spec.components.len());
    let mut acc = 0.0;
    for (_, w) in &spec.components {
        acc += w;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = Vec::with_capacity(spec.n * d);
    let mut labels = Vec::with_capacity(spec.n);
    let mut draw = vec![0.0; d];
    for _ in 0..spec.n {
        let u: f64 = rng.random::<f64>() * acc;
        let c = cumulative.iter().position(|&cw| u < cw).unwrap_or(cumulative.len() - 1);
        loop {
            for (v, g) in draw.iter_mut().zip(&gammas[c]) {
                *v = g.sample(&mut rng);
            }
            let s: f64 = draw.iter().sum();
            if s > 0.0 && s.is_finite() {
                values.extend(draw.iter().map(|v| v / s));
                break;
            }
        }
        labels.push(c);
    }
    LabeledSimplexDataset::new(SimplexDataset::from_flat(values, d)?, labels)
}

/// On-disk dataset encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    /// One row per point, comma-separated decimals, optional header line.
    Csv,
    /// `SPXD`, u32 N, u32 D, then N*D f32, all little-endian, row-major.
    Binary,
}

/// Leading bytes of the binary format.
pub const BINARY_MAGIC: &[u8; 4] = b"SPXD";

impl DataFormat {
    /// Binary when the file starts with [`BINARY_MAGIC`], CSV otherwise.
    pub fn detect(path: &Path) -> Result<Self> {
        let mut head = [0u8; 4];
        let mut f = File::open(path)?;
        let mut read = 0;
        while read < 4 {
            let k = f.read(&mut head[read..])?;
            if k == 0 {
                break;
            }
            read += k;
        }
        Ok(if read == 4 && &head == BINARY_MAGIC { DataFormat::Binary } else { DataFormat::Csv })
    }
}

/// Loads a dataset, detecting the format when `format` is `None`.
pub fn load_predictions(path: &Path, format: Option<DataFormat>) -> Result<SimplexDataset> {
    match format.map_or_else(|| DataFormat::detect(path), Ok)? {
        DataFormat::Csv => read_csv(BufReader::new(File::open(path)?)),
        DataFormat::Binary => read_binary(BufReader::new(File::open(path)?)),
    }
}

/// Parses CSV rows. A first line that does not parse as numbers is taken as
/// a header and skipped. Row indices in errors count data rows from 0.
pub fn read_csv<R: Read>(reader: R) -> Result<SimplexDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut header_seen = false;
    for (idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Data { row: rows.len(), message: e.to_string() })?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if idx == 0 && !header_seen => header_seen = true,
            Err(e) => {
                return Err(Error::Data { row: rows.len(), message: format!("line {line}: {e}") });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Data { row: 0, message: "no data rows".into() });
    }
    SimplexDataset::from_rows(&rows)
}

/// Writes one row per point with the shortest decimal that round-trips.
pub fn write_csv<W: Write>(writer: W, data: &SimplexDataset) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for row in data.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut reader: R) -> Result<SimplexDataset> {
    let mut header = [0u8; 12];
    reader
        .read_exact(&mut header)
        .map_err(|_| Error::Data { row: 0, message: "binary header truncated".into() })?;
    if &header[..4] != BINARY_MAGIC {
        return Err(Error::Data { row: 0, message: "missing SPXD magic".into() });
    }
    let n = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes")) as usize;
    let d = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes")) as usize;
    if d == 0 {
        return Err(Error::Data { row: 0, message: "dimension is zero".into() });
    }
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let expected = n.checked_mul(d).and_then(|v| v.checked_mul(4));
    if expected != Some(bytes.len()) {
        return Err(Error::Data {
            row: bytes.len() / (4 * d),
            message: format!("payload has {} bytes, expected {n} x {d} x 4", bytes.len()),
        });
    }
    let values = bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64).collect();
    SimplexDataset::from_flat(values, d)
}

/// Values are narrowed to f32.
pub fn write_binary<W: Write>(writer: W, data: &SimplexDataset) -> Result<()> {
    let to_u32 = |v: usize| u32::try_from(v).map_err(|_| Error::Config(format!("{v} exceeds u32")));
    let mut w = BufWriter::new(writer);
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&to_u32(data.len())?.to_le_bytes())?;
    w.write_all(&to_u32(data.dim())?.to_le_bytes())?;
    for &v in data.as_flat() {
        w.write_all(&(v as f32).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(path: &Path, data: &SimplexDataset, format: DataFormat) -> Result<()> {
    let f = File::create(path)?;
    match format {
        DataFormat::Csv => write_csv(f, data),
        DataFormat::Binary => write_binary(f, data),
    }
}

/// One non-negative integer per line; blank lines are ignored.
pub fn read_labels<R: Read>(reader: R) -> Result<Vec<usize>> {
    let mut labels = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v = t
            .parse::<usize>()
            .map_err(|e| Error::Data { row: labels.len(), message: format!("line {}: {e}", i + 1) })?;
        labels.push(v);
    }
    Ok(labels)
}

pub fn load_labels(path: &Path) -> Result<Vec<usize>> {
    read_labels(File::open(path)?)
}

pub fn write_labels<W: Write>(writer: W, labels: &[usize]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for l in labels {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_labels(path: &Path, labels: &[usize]) -> Result<()> {
    write_labels(File::create(path)?, labels)
}

/// Keeps the pixels at rows and columns divisible by `factor` of a
/// row-major `height x width` grid.
pub fn downsample_rows(data: &SimplexDataset, height: usize, width: usize, factor: usize) -> Result<SimplexDataset> {
    if factor < 1 {
        return Err(Error::Config("downsampling factor must be at least 1".into()));
    }
    if height * width != data.len() {
        return Err(Error::Shape { expected: height * width, found: data.len() });
    }
    let idx: Vec<usize> =
        (0..height).step_by(factor).flat_map(|r| (0..width).step_by(factor).map(move |c| r * width + c)).collect();
    Ok(data.select(&idx))
}
