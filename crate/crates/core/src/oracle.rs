//! Brute-force ground truth for small instances.
//!
//! Nothing here shares code with the approximation path beyond the cost
//! scaling in [`crate::transport::scale_cost`], which exact comparisons need.

use crate::error::{HckmError, Result};
use crate::metrics::sq_dist;
use crate::transport::{scaled_point_cost, Metric};
use crate::types::{centroid, check_feasibility, evaluate_cost_d, Instance, Partition, Point};

/// Largest `n` accepted by the set-partition searches.
pub const MAX_PARTITION_POINTS: usize = 10;

/// Largest `k^n` accepted by [`exact_assignment`].
pub const MAX_LABELINGS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub opt_cost: f64,
    pub opt_partition: Partition,
    pub nodes_explored: u64,
    /// Optimum in scaled units; only set by [`exact_assignment`].
    pub scaled_cost: Option<i64>,
}

/// Exact hard-capacitated optimum by enumerating set partitions into at most
/// `k` parts of size at most `u`.
pub fn exact_hckm(instance: &Instance) -> Result<OracleResult> {
    if !check_feasibility(instance).is_feasible() {
        return Err(HckmError::Infeasible {
            n: instance.n(),
            k: instance.k(),
            u: instance.u(),
        });
    }
    exact_partition(instance, instance.u())
}

/// Exact uncapacitated k-means optimum (same search without the size bound).
pub fn exact_km(instance: &Instance) -> Result<OracleResult> {
    exact_partition(instance, instance.n())
}

struct PartitionSearch<'a> {
    points: &'a [Point],
    k: usize,
    cap: usize,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    best_cost: f64,
    best_labels: Vec<usize>,
    nodes: u64,
}

impl PartitionSearch<'_> {
    // restricted growth strings: point i joins an open part or opens the next one
    fn branch(&mut self, i: usize, parts: usize) {
        self.nodes += 1;
        if i == self.points.len() {
            let cost = self.leaf_cost(parts);
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best_labels.clone_from(&self.labels);
            }
            return;
        }
        let limit = (parts + 1).min(self.k);
        for p in 0..limit {
            if self.sizes[p] == self.cap {
                continue;
            }
            self.labels[i] = p;
            self.sizes[p] += 1;
            self.branch(i + 1, parts.max(p + 1));
            self.sizes[p] -= 1;
        }
    }

    fn leaf_cost(&self, parts: usize) -> f64 {
        let dim = self.points[0].dim();
        let mut sums = vec![vec![0.0; dim]; parts];
        for (x, &l) in self.points.iter().zip(&self.labels) {
            for (s, c) in sums[l].iter_mut().zip(x.coords()) {
                *s += c;
            }
        }
        for (s, &size) in sums.iter_mut().zip(&self.sizes) {
            for v in s.iter_mut() {
                *v /= size as f64;
            }
        }
        self.points
            .iter()
            .zip(&self.labels)
            .map(|(x, &l)| sq_dist(x.coords(), &sums[l]))
            .sum()
    }
}

fn exact_partition(instance: &Instance, cap: usize) -> Result<OracleResult> {
    let n = instance.n();
    if n > MAX_PARTITION_POINTS {
        return Err(HckmError::OracleTooLarge(format!(
            "n={n} exceeds {MAX_PARTITION_POINTS}"
        )));
    }
    let k = instance.k();
    let mut search = PartitionSearch {
        points: instance.points(),
        k,
        cap,
        labels: vec![0; n],
        sizes: vec![0; k],
        best_cost: f64::INFINITY,
        best_labels: Vec::new(),
        nodes: 0,
    };
    search.branch(0, 0);
    if search.best_labels.is_empty() {
        return Err(HckmError::NoFeasibleLabeling);
    }

    let labels = search.best_labels;
    let centers = (0..k)
        .map(|p| {
            let members: Vec<&Point> = instance
                .points()
                .iter()
                .zip(&labels)
                .filter(|&(_, &l)| l == p)
                .map(|(x, _)| x)
                .collect();
            if members.is_empty() {
                Ok(instance.points()[0].clone())
            } else {
                centroid(members)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let opt_partition = Partition::new(labels, centers);
    let opt_cost = evaluate_cost_d(instance, &opt_partition)?;
    Ok(OracleResult {
        opt_cost,
        opt_partition,
        nodes_explored: search.nodes,
        scaled_cost: None,
    })
}

/// Exhaustive optimal assignment to fixed `centers` (each copy holds at most
/// `u` points) under `metric`. Minimizes the scaled objective; `opt_cost` is
/// the real-valued objective of the minimizing labeling.
pub fn exact_assignment(
    instance: &Instance,
    centers: &[Point],
    u: usize,
    metric: Metric<'_>,
) -> Result<OracleResult> {
    let n = instance.n();
    let k = centers.len();
    if k == 0 {
        return Err(HckmError::InvalidParameter("no centers given".into()));
    }
    let space = (k as u128).checked_pow(n as u32);
    if space.is_none_or(|s| s > MAX_LABELINGS) {
        return Err(HckmError::OracleTooLarge(format!(
            "{k}^{n} labelings exceed {MAX_LABELINGS}"
        )));
    }

    let mut scaled = vec![0i64; n * k];
    let mut real = vec![0.0f64; n * k];
    for j in 0..n {
        for (i, c) in centers.iter().enumerate() {
            scaled[j * k + i] = scaled_point_cost(instance, j, c, metric)?;
            real[j * k + i] = match metric {
                Metric::D => sq_dist(instance.points()[j].coords(), c.coords()),
                Metric::H(index) => index.dist_h_indexed(j, c)?,
            };
        }
    }

    let mut labels = vec![0usize; n];
    let mut sizes = vec![0usize; k];
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut nodes = 0u64;
    loop {
        nodes += 1;
        sizes.fill(0);
        for &l in &labels {
            sizes[l] += 1;
        }
        if sizes.iter().all(|&s| s <= u) {
            let cost: i64 = labels
                .iter()
                .enumerate()
                .map(|(j, &l)| scaled[j * k + l])
                .sum();
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, labels.clone()));
            }
        }
        // odometer
        let mut pos = 0;
        while pos < n {
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }

    let (scaled_cost, labels) = best.ok_or(HckmError::NoFeasibleLabeling)?;
    let opt_cost = labels
        .iter()
        .enumerate()
        .map(|(j, &l)| real[j * k + l])
        .sum();
    Ok(OracleResult {
        opt_cost,
        opt_partition: Partition::new(labels, centers.to_vec()),
        nodes_explored: nodes,
        scaled_cost: Some(scaled_cost),
    })
}
