//! Dataset loading, synthetic instances and solution files.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::driver::{Solution, SubroutineStats};
use crate::error::{HckmError, Result};
use crate::types::{evaluate_cost_d, Instance, Partition, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

impl FromStr for DataFormat {
    type Err = HckmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            other => Err(HckmError::InvalidParameter(format!(
                "unknown format `{other}`"
            ))),
        }
    }
}

pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Vec<Point>> {
    let text = fs::read_to_string(path).map_err(|e| HckmError::io(path, e))?;
    match format {
        DataFormat::Csv => parse_csv(&text),
        DataFormat::Json => parse_json(&text),
    }
}

/// One point per line, comma-separated, uniform arity. Blank lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<Point>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    let mut arity = None;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if *arity.get_or_insert(record.len()) != record.len() {
            return Err(HckmError::RaggedRow { line });
        }
        let coords = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| HckmError::Parse {
                    line,
                    message: format!("`{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let point = Point::new(coords).map_err(|e| HckmError::Parse {
            line,
            message: e.to_string(),
        })?;
        points.push(point);
    }
    if points.is_empty() {
        return Err(HckmError::EmptyDataset);
    }
    Ok(points)
}

/// An array of arrays of numbers.
pub fn parse_json(text: &str) -> Result<Vec<Point>> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text)?;
    let Some(first) = rows.first() else {
        return Err(HckmError::EmptyDataset);
    };
    let arity = first.len();
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let line = i as u64 + 1;
            if row.len() != arity {
                return Err(HckmError::RaggedRow { line });
            }
            Point::new(row).map_err(|e| HckmError::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(points: &[Point], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for p in points {
        w.serialize(p.coords())?;
    }
    w.flush().map_err(|e| HckmError::io("<csv writer>", e))?;
    Ok(())
}

/// Synthetic data sets.
///
/// String forms: `blobs:COUNT,PER_BLOB,SIGMA,SPREAD[,DIM]` and
/// `uniform:N,DIM,EXTENT`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorSpec {
    /// Isotropic Gaussian blobs. Blob centers sit on a regular grid with
    /// spacing `spread` (row-major cell order); `sigma = 0` gives exact copies.
    Blobs {
        count: usize,
        per_blob: usize,
        sigma: f64,
        spread: f64,
        dim: usize,
    },
    /// Uniform points in `[0, extent]^dim`.
    Uniform { n: usize, dim: usize, extent: f64 },
}

impl GeneratorSpec {
    pub fn blobs(count: usize, per_blob: usize, sigma: f64, spread: f64) -> Self {
        GeneratorSpec::Blobs {
            count,
            per_blob,
            sigma,
            spread,
            dim: 2,
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Vec<Point>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match *self {
            GeneratorSpec::Blobs {
                count,
                per_blob,
                sigma,
                spread,
                dim,
            } => {
                if count == 0 || per_blob == 0 || dim == 0 || !(sigma >= 0.0) || !spread.is_finite()
                {
                    return Err(HckmError::InvalidParameter(format!("bad blob spec {self}")));
                }
                let noise = Normal::new(0.0, sigma)
                    .map_err(|e| HckmError::InvalidParameter(e.to_string()))?;
                let mut side = 1usize;
                while side.checked_pow(dim as u32).is_some_and(|c| c < count) {
                    side += 1;
                }
                let mut points = Vec::with_capacity(count * per_blob);
                for b in 0..count {
                    let mut cell = b;
                    let center: Vec<f64> = (0..dim)
                        .map(|_| {
                            let c = (cell % side) as f64 * spread;
                            cell /= side;
                            c
                        })
                        .collect();
                    for _ in 0..per_blob {
                        let coords = center.iter().map(|c| c + noise.sample(&mut rng)).collect();
                        points.push(Point::new(coords)?);
                    }
                }
                Ok(points)
            }
            GeneratorSpec::Uniform { n, dim, extent } => {
                if n == 0 || dim == 0 || !(extent.is_finite() && extent >= 0.0) {
                    return Err(HckmError::InvalidParameter(format!(
                        "bad uniform spec {self}"
                    )));
                }
                (0..n)
                    .map(|_| Point::new((0..dim).map(|_| rng.random::<f64>() * extent).collect()))
                    .collect()
            }
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Blobs {
                count,
                per_blob,
                sigma,
                spread,
                dim,
            } => write!(f, "blobs:{count},{per_blob},{sigma},{spread},{dim}"),
            GeneratorSpec::Uniform { n, dim, extent } => write!(f, "uniform:{n},{dim},{extent}"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = HckmError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || HckmError::InvalidParameter(format!("cannot parse generator spec `{s}`"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let int = |i: usize| {
            args.get(i)
                .and_then(|a| a.parse::<usize>().ok())
                .ok_or_else(bad)
        };
        let real = |i: usize| {
            args.get(i)
                .and_then(|a| a.parse::<f64>().ok())
                .ok_or_else(bad)
        };
        match kind.trim() {
            "blobs" if args.len() == 4 || args.len() == 5 => Ok(GeneratorSpec::Blobs {
                count: int(0)?,
                per_blob: int(1)?,
                sigma: real(2)?,
                spread: real(3)?,
                dim: if args.len() == 5 { int(4)? } else { 2 },
            }),
            "uniform" if args.len() == 3 => Ok(GeneratorSpec::Uniform {
                n: int(0)?,
                dim: int(1)?,
                extent: real(2)?,
            }),
            _ => Err(bad()),
        }
    }
}

pub fn generate_instance(spec: &GeneratorSpec, seed: u64, k: usize, u: usize) -> Result<Instance> {
    Instance::new(spec.generate(seed)?, k, u)
}

/// Everything that determines a run's result. Worker count and output path
/// are deliberately absent: they do not change the solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: Option<String>,
    pub generator: Option<GeneratorSpec>,
    pub k: usize,
    pub u: usize,
    pub epsilon: f64,
    pub subroutine: String,
    pub seed: u64,
    pub overseed_factor: f64,
    pub lloyd_rounds: usize,
    pub prune: bool,
}

/// On-disk form of a [`Solution`]; field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub cost_d: f64,
    pub cost_h: Option<f64>,
    pub cost_d_before_recenter: f64,
    pub winning_composition: Vec<usize>,
    pub compositions_evaluated: u64,
    pub compositions_total: u64,
    pub complete: bool,
    pub subroutine_stats: SubroutineStats,
    pub wall_time_ms: u64,
    pub config: Option<RunConfig>,
}

impl SolutionRecord {
    pub fn from_solution(solution: &Solution, config: Option<&RunConfig>) -> Self {
        SolutionRecord {
            labels: solution.partition.labels.clone(),
            centers: solution
                .partition
                .centers
                .iter()
                .map(|c| c.coords().to_vec())
                .collect(),
            cost_d: solution.cost_after_recenter.cost_d,
            cost_h: solution.cost_before_recenter.cost_h,
            cost_d_before_recenter: solution.cost_before_recenter.cost_d,
            winning_composition: solution.winning_composition.0.clone(),
            compositions_evaluated: solution.compositions_evaluated,
            compositions_total: solution.compositions_total,
            complete: solution.complete,
            subroutine_stats: solution.subroutine_stats.clone(),
            wall_time_ms: solution.wall_time.as_millis() as u64,
            config: config.cloned(),
        }
    }

    pub fn partition(&self) -> Result<Partition> {
        let centers = self
            .centers
            .iter()
            .map(|c| Point::new(c.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition::new(self.labels.clone(), centers))
    }

    /// `cost_d` recomputed from the stored labels and centers.
    pub fn recompute_cost_d(&self, instance: &Instance) -> Result<f64> {
        evaluate_cost_d(instance, &self.partition()?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn emit_solution(solution: &Solution, config: Option<&RunConfig>, path: &Path) -> Result<()> {
    let record = SolutionRecord::from_solution(solution, config);
    let mut json = record.to_json()?;
    json.push('\n');
    fs::write(path, json).map_err(|e| HckmError::io(path, e))
}

pub fn load_solution(path: &Path) -> Result<SolutionRecord> {
    let text = fs::read_to_string(path).map_err(|e| HckmError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
