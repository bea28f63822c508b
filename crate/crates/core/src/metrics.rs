//! Squared-Euclidean distance `d`, the surrogate distance `h` that routes
//! through a representing set, and the relaxed triangle inequalities that
//! relate them.
//!
//! For a representing set `S` with nearest-point map `pi`,
//!
//! ```text
//! h(x, y) = d(x, pi(x)) + d(pi(x), pi(y)) + d(pi(y), y)
//! ```
//!
//! `h` is not a metric in the strict sense: `h(x, x) = 2 d(x, pi(x))`.

use crate::error::{HckmError, Result};
use crate::types::{Instance, Point};

/// Relative tolerance for the inequality checks.
pub const INEQUALITY_REL_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn same_dim(x: &Point, y: &Point) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(HckmError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// `||x - y||^2`.
pub fn dist_d(x: &Point, y: &Point) -> Result<f64> {
    same_dim(x, y)?;
    Ok(sq_dist(x.coords(), y.coords()))
}

/// Nearest-representing-point table for a data set.
///
/// Ties between equidistant representing points go to the lowest index.
#[derive(Debug, Clone)]
pub struct VoronoiIndex {
    representing: Vec<Point>,
    labels: Vec<usize>,
    sqdist: Vec<f64>,
    per_region_count: Vec<usize>,
    voronoi_cost: f64,
    // d(s_a, s_b), row-major |S| x |S|
    between: Vec<f64>,
}

impl VoronoiIndex {
    pub fn build(instance: &Instance, representing: Vec<Point>) -> Result<Self> {
        if representing.is_empty() {
            return Err(HckmError::EmptyRepresentingSet);
        }
        for s in &representing {
            if s.dim() != instance.dim() {
                return Err(HckmError::DimensionMismatch {
                    expected: instance.dim(),
                    found: s.dim(),
                });
            }
        }
        let m = representing.len();
        let mut labels = Vec::with_capacity(instance.n());
        let mut sqdist = Vec::with_capacity(instance.n());
        let mut per_region_count = vec![0; m];
        let mut voronoi_cost = 0.0;
        for x in instance.points() {
            let (j, dj) = nearest_in(&representing, x.coords());
            labels.push(j);
            sqdist.push(dj);
            per_region_count[j] += 1;
            voronoi_cost += dj;
        }
        let mut between = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                between[a * m + b] = sq_dist(representing[a].coords(), representing[b].coords());
            }
        }
        Ok(VoronoiIndex {
            representing,
            labels,
            sqdist,
            per_region_count,
            voronoi_cost,
            between,
        })
    }

    pub fn representing_points(&self) -> &[Point] {
        &self.representing
    }

    /// Number of representing points `|S|`.
    pub fn len(&self) -> usize {
        self.representing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representing.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.representing[0].dim()
    }

    /// Region of the `j`-th indexed data point.
    pub fn region_of(&self, j: usize) -> usize {
        self.labels[j]
    }

    /// `d(x_j, pi(x_j))` for the `j`-th indexed data point.
    pub fn dist_to_region(&self, j: usize) -> f64 {
        self.sqdist[j]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn per_region_count(&self) -> &[usize] {
        &self.per_region_count
    }

    /// `cost_D(S)`: every data point charged to its nearest representing point.
    pub fn voronoi_cost(&self) -> f64 {
        self.voronoi_cost
    }

    /// `d(s_a, s_b)`.
    pub fn between(&self, a: usize, b: usize) -> f64 {
        self.between[a * self.len() + b]
    }

    /// Nearest representing point for an arbitrary query, computed on the fly.
    pub fn nearest(&self, x: &Point) -> Result<(usize, f64)> {
        if x.dim() != self.dim() {
            return Err(HckmError::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(nearest_in(&self.representing, x.coords()))
    }

    /// `h(x_j, c)` for the `j`-th indexed data point and an arbitrary center.
    pub fn dist_h_indexed(&self, j: usize, c: &Point) -> Result<f64> {
        let (rc, dc) = self.nearest(c)?;
        Ok(self.sqdist[j] + self.between(self.labels[j], rc) + dc)
    }

    pub fn dist_h(&self, x: &Point, y: &Point) -> Result<f64> {
        let (rx, dx) = self.nearest(x)?;
        let (ry, dy) = self.nearest(y)?;
        Ok(dx + self.between(rx, ry) + dy)
    }
}

fn nearest_in(representing: &[Point], x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, s) in representing.iter().enumerate() {
        let d = sq_dist(x, s.coords());
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub fn build_voronoi_index(instance: &Instance, representing: &[Point]) -> Result<VoronoiIndex> {
    VoronoiIndex::build(instance, representing.to_vec())
}

/// Surrogate distance `h(x, y)` relative to `index`.
pub fn dist_h(x: &Point, y: &Point, index: &VoronoiIndex) -> Result<f64> {
    index.dist_h(x, y)
}

fn within_tol(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + INEQUALITY_REL_TOL * lhs.max(rhs)
}

/// `d(i, j) <= 2 (d(i, k) + d(j, k))`.
pub fn check_extended_triangle(i: &Point, j: &Point, k: &Point) -> bool {
    let lhs = sq_dist(i.coords(), j.coords());
    let rhs = 2.0 * (sq_dist(i.coords(), k.coords()) + sq_dist(j.coords(), k.coords()));
    within_tol(lhs, rhs)
}

/// `d(i, j) <= 3 (d(i, l) + d(l, k) + d(k, j))`.
pub fn check_four_point(i: &Point, l: &Point, k: &Point, j: &Point) -> bool {
    let lhs = sq_dist(i.coords(), j.coords());
    let rhs = 3.0
        * (sq_dist(i.coords(), l.coords())
            + sq_dist(l.coords(), k.coords())
            + sq_dist(k.coords(), j.coords()));
    within_tol(lhs, rhs)
}
