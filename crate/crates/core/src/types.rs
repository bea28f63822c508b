//! Instances, points, partitions and the squared-Euclidean objective.

use serde::{Deserialize, Serialize};

use crate::error::{HckmError, Result};

/// A point in `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(position) = coords.iter().position(|c| !c.is_finite()) {
            return Err(HckmError::NonFinite { position });
        }
        if coords.is_empty() {
            return Err(HckmError::InvalidParameter(
                "point must have at least one coordinate".into(),
            ));
        }
        Ok(Point(coords))
    }

    /// Builds a point from literal coordinates, panicking on non-finite input.
    pub fn from_slice(coords: &[f64]) -> Self {
        Point::new(coords.to_vec()).expect("finite coordinates")
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// A hard-capacitated k-means instance: data points, cluster count `k` and
/// uniform capacity `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    points: Vec<Point>,
    k: usize,
    u: usize,
    dim: usize,
}

impl Instance {
    /// Validates `n >= 1`, `k >= 1`, `u >= 1` and a common dimension.
    ///
    /// Feasibility (`k <= n`, `k * u >= n`) is *not* checked here; see
    /// [`check_feasibility`].
    pub fn new(points: Vec<Point>, k: usize, u: usize) -> Result<Self> {
        let first = points.first().ok_or(HckmError::EmptyDataset)?;
        let dim = first.dim();
        for p in &points {
            if p.dim() != dim {
                return Err(HckmError::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        if k == 0 {
            return Err(HckmError::InvalidParameter("k must be positive".into()));
        }
        if u == 0 {
            return Err(HckmError::InvalidParameter("u must be positive".into()));
        }
        Ok(Instance { points, k, u, dim })
    }

    pub fn from_coords(rows: &[&[f64]], k: usize, u: usize) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::new(r.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Instance::new(points, k, u)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same points, different `k` and `u`.
    pub fn with_params(&self, k: usize, u: usize) -> Result<Self> {
        Instance::new(self.points.clone(), k, u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(self) -> bool {
        self == Feasibility::Feasible
    }
}

/// A capacity-respecting partition exists iff `k <= n` and `k * u >= n`.
pub fn check_feasibility(instance: &Instance) -> Feasibility {
    let (n, k, u) = (instance.n(), instance.k(), instance.u());
    match k.checked_mul(u) {
        _ if k > n => Feasibility::Infeasible,
        Some(cap) if cap < n => Feasibility::Infeasible,
        _ => Feasibility::Feasible,
    }
}

/// Cluster labels (one per point) together with the `k` cluster centers.
///
/// Clusters may be empty; an empty cluster keeps whatever center it was given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub centers: Vec<Point>,
}

impl Partition {
    pub fn new(labels: Vec<usize>, centers: Vec<Point>) -> Self {
        Partition { labels, centers }
    }

    pub fn num_clusters(&self) -> usize {
        self.centers.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centers.len()];
        for &l in &self.labels {
            if l < sizes.len() {
                sizes[l] += 1;
            }
        }
        sizes
    }

    /// Checks one label per point, labels in range, `k` centers and every
    /// cluster of size at most `u`.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.labels.len() != instance.n() {
            return Err(HckmError::InvalidPartition(format!(
                "{} labels for {} points",
                self.labels.len(),
                instance.n()
            )));
        }
        if self.centers.len() != instance.k() {
            return Err(HckmError::InvalidPartition(format!(
                "{} centers, expected k={}",
                self.centers.len(),
                instance.k()
            )));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= self.centers.len()) {
            return Err(HckmError::InvalidPartition(format!(
                "label {bad} out of range"
            )));
        }
        for c in &self.centers {
            if c.dim() != instance.dim() {
                return Err(HckmError::DimensionMismatch {
                    expected: instance.dim(),
                    found: c.dim(),
                });
            }
        }
        if let Some((i, size)) = self
            .cluster_sizes()
            .into_iter()
            .enumerate()
            .find(|&(_, s)| s > instance.u())
        {
            return Err(HckmError::InvalidPartition(format!(
                "cluster {i} has {size} points, capacity is {}",
                instance.u()
            )));
        }
        Ok(())
    }
}

/// Objective values of one assignment. `cost_h` is only meaningful relative
/// to a representing set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub cost_d: f64,
    pub cost_h: Option<f64>,
}

/// Coordinate-wise mean of a nonempty cluster.
pub fn centroid<'a, I>(cluster: I) -> Result<Point>
where
    I: IntoIterator<Item = &'a Point>,
{
    let mut iter = cluster.into_iter();
    let first = iter.next().ok_or(HckmError::EmptyCluster)?;
    let mut sum = first.coords().to_vec();
    let mut count = 1usize;
    for p in iter {
        if p.dim() != sum.len() {
            return Err(HckmError::DimensionMismatch {
                expected: sum.len(),
                found: p.dim(),
            });
        }
        for (s, c) in sum.iter_mut().zip(p.coords()) {
            *s += c;
        }
        count += 1;
    }
    let inv = count as f64;
    Ok(Point(sum.into_iter().map(|s| s / inv).collect()))
}

/// `sum_i sum_{x in X_i} ||x - centers[i]||^2`.
pub fn evaluate_cost_d(instance: &Instance, partition: &Partition) -> Result<f64> {
    if partition.labels.len() != instance.n() {
        return Err(HckmError::InvalidPartition(format!(
            "{} labels for {} points",
            partition.labels.len(),
            instance.n()
        )));
    }
    let mut total = 0.0;
    for (x, &label) in instance.points().iter().zip(&partition.labels) {
        let c = partition
            .centers
            .get(label)
            .ok_or_else(|| HckmError::InvalidPartition(format!("label {label} out of range")))?;
        total += crate::metrics::dist_d(x, c)?;
    }
    Ok(total)
}
