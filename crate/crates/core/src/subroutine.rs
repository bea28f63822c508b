//! Uncapacitated k-means subroutines that produce the representing set `S`.
//!
//! Any implementation of [`RepresentingSetSubroutine`] that returns between
//! `k` and `n` points can be plugged into the driver. The default,
//! [`D2Lloyd`], overseeds with D²-weighted sampling and then runs Lloyd
//! rounds. Randomness comes from `ChaCha8Rng::seed_from_u64(rng_seed)`, so
//! the seed fully determines the output on every platform.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HckmError, Result};
use crate::metrics::sq_dist;
use crate::types::{centroid, Instance, Point};

/// Divisor applied to the overall accuracy `epsilon` before it reaches the
/// subroutine.
pub const EPSILON_DIVISOR: f64 = 36.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubroutineConfig {
    pub epsilon_prime: f64,
    pub overseed_factor: f64,
    pub lloyd_rounds: usize,
    pub rng_seed: u64,
}

impl Default for SubroutineConfig {
    fn default() -> Self {
        SubroutineConfig::from_epsilon(0.36, 0)
    }
}

impl SubroutineConfig {
    /// `epsilon_prime = epsilon / 36`, other fields at their defaults.
    pub fn from_epsilon(epsilon: f64, rng_seed: u64) -> Self {
        SubroutineConfig {
            epsilon_prime: epsilon / EPSILON_DIVISOR,
            overseed_factor: 3.0,
            lloyd_rounds: 20,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_prime.is_finite() && self.epsilon_prime > 0.0) {
            return Err(HckmError::InvalidParameter(format!(
                "epsilon' must be positive, got {}",
                self.epsilon_prime
            )));
        }
        if !(self.overseed_factor.is_finite() && self.overseed_factor > 0.0) {
            return Err(HckmError::InvalidParameter(format!(
                "overseed factor must be positive, got {}",
                self.overseed_factor
            )));
        }
        Ok(())
    }

    /// `m = min(n, ceil(beta * k * max(1, ln(1 / epsilon'))))`, never below `k`.
    pub fn target_size(&self, n: usize, k: usize) -> usize {
        let log_term = (1.0 / self.epsilon_prime).ln().max(1.0);
        let raw = (self.overseed_factor * k as f64 * log_term).ceil();
        let m = if raw.is_finite() && raw < n as f64 {
            raw as usize
        } else {
            n
        };
        m.max(k).min(n)
    }
}

/// Contract for the uncapacitated k-means stage.
pub trait RepresentingSetSubroutine: Send + Sync {
    fn name(&self) -> &str;

    /// Returns the representing set; must contain between `k` and `n` points.
    fn run(&self, instance: &Instance, config: &SubroutineConfig) -> Result<Vec<Point>>;
}

/// D²-seeding followed by Lloyd rounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct D2Lloyd;

/// Output of [`D2Lloyd::run_traced`].
#[derive(Debug, Clone)]
pub struct LloydTrace {
    pub centers: Vec<Point>,
    /// Voronoi cost after seeding, then after every Lloyd round that ran.
    pub cost_history: Vec<f64>,
}

impl D2Lloyd {
    pub const NAME: &'static str = "d2-lloyd";

    pub fn run_traced(&self, instance: &Instance, config: &SubroutineConfig) -> Result<LloydTrace> {
        config.validate()?;
        let m = config.target_size(instance.n(), instance.k());
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let mut centers = d2_seed(instance.points(), m, &mut rng);

        let (mut labels, cost) = nearest_labels(instance.points(), &centers);
        let mut cost_history = vec![cost];
        for _ in 0..config.lloyd_rounds {
            let mut members: Vec<Vec<&Point>> = vec![Vec::new(); centers.len()];
            for (x, &l) in instance.points().iter().zip(&labels) {
                members[l].push(x);
            }
            for (c, m) in centers.iter_mut().zip(&members) {
                // an empty cell keeps its previous location
                if !m.is_empty() {
                    *c = centroid(m.iter().copied())?;
                }
            }
            let (next, cost) = nearest_labels(instance.points(), &centers);
            cost_history.push(cost);
            if next == labels {
                break;
            }
            labels = next;
        }
        Ok(LloydTrace {
            centers,
            cost_history,
        })
    }
}

impl RepresentingSetSubroutine for D2Lloyd {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn run(&self, instance: &Instance, config: &SubroutineConfig) -> Result<Vec<Point>> {
        Ok(self.run_traced(instance, config)?.centers)
    }
}

/// Uses every data point as a representing point (`S = X`). Exact in the
/// uncapacitated sense but makes the sweep grow with `n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllPoints;

impl AllPoints {
    pub const NAME: &'static str = "all-points";
}

impl RepresentingSetSubroutine for AllPoints {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn run(&self, instance: &Instance, _config: &SubroutineConfig) -> Result<Vec<Point>> {
        Ok(instance.points().to_vec())
    }
}

fn nearest_labels(points: &[Point], centers: &[Point]) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let labels = points
        .iter()
        .map(|x| {
            let mut best = (0, f64::INFINITY);
            for (i, c) in centers.iter().enumerate() {
                let d = sq_dist(x.coords(), c.coords());
                if d < best.1 {
                    best = (i, d);
                }
            }
            cost += best.1;
            best.0
        })
        .collect();
    (labels, cost)
}

/// First center uniform, the rest with probability proportional to the squared
/// distance to the closest chosen center. When every remaining point coincides
/// with a chosen center, further picks are uniform over unchosen indices.
fn d2_seed(points: &[Point], m: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![points[first].clone()];
    let mut weight: Vec<f64> = points
        .iter()
        .map(|x| sq_dist(x.coords(), points[first].coords()))
        .collect();

    while centers.len() < m {
        let total: f64 = weight.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in weight.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total weight")
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centers.push(points[pick].clone());
        for (w, x) in weight.iter_mut().zip(points) {
            *w = w.min(sq_dist(x.coords(), points[pick].coords()));
        }
    }
    centers
}

/// Named subroutines selectable at run time.
#[derive(Clone)]
pub struct SubroutineRegistry {
    entries: BTreeMap<String, Arc<dyn RepresentingSetSubroutine>>,
}

impl Default for SubroutineRegistry {
    fn default() -> Self {
        let mut r = SubroutineRegistry {
            entries: BTreeMap::new(),
        };
        r.register(Arc::new(D2Lloyd));
        r.register(Arc::new(AllPoints));
        r
    }
}

impl SubroutineRegistry {
    pub fn register(&mut self, sub: Arc<dyn RepresentingSetSubroutine>) {
        self.entries.insert(sub.name().to_string(), sub);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn RepresentingSetSubroutine>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| HckmError::UnknownSubroutine(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Runs the default subroutine.
pub fn run_subroutine(instance: &Instance, config: &SubroutineConfig) -> Result<Vec<Point>> {
    D2Lloyd.run(instance, config)
}

/// `cost_D(S) / opt_KM`. `0/0` is 1; positive over zero is infinity.
pub fn measure_lambda1(instance: &Instance, representing: &[Point], oracle_opt_km: f64) -> f64 {
    let (_, cost) = nearest_labels(instance.points(), representing);
    lambda_ratio(cost, oracle_opt_km)
}

pub(crate) fn lambda_ratio(cost: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        cost / opt
    } else if cost > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::build_voronoi_index;

    #[test]
    fn target_size_formula() {
        let c = SubroutineConfig::default();
        assert!((c.epsilon_prime - 0.01).abs() < 1e-15);
        // 3 * 2 * ln(100) = 27.6 -> 28
        assert_eq!(c.target_size(1000, 2), 28);
        assert_eq!(c.target_size(10, 2), 10);

        let wide = SubroutineConfig {
            epsilon_prime: 0.9,
            overseed_factor: 1.0,
            ..c
        };
        // ln(1/0.9) < 1 is clamped to 1
        assert_eq!(wide.target_size(100, 4), 4);

        let tiny = SubroutineConfig {
            overseed_factor: 0.01,
            ..c
        };
        assert_eq!(tiny.target_size(100, 5), 5);
    }

    #[test]
    fn n_equals_k_returns_the_data() {
        let inst = Instance::from_coords(&[&[0.0], &[3.0], &[7.0]], 3, 1).unwrap();
        let s = run_subroutine(&inst, &SubroutineConfig::default()).unwrap();
        let idx = build_voronoi_index(&inst, &s).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(idx.voronoi_cost(), 0.0);
    }

    #[test]
    fn unit_square_k1() {
        let inst =
            Instance::from_coords(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]], 1, 4)
                .unwrap();
        let s = run_subroutine(&inst, &SubroutineConfig::default()).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(build_voronoi_index(&inst, &s).unwrap().voronoi_cost(), 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let pts: Vec<Point> = (0..40)
            .map(|i| Point::from_slice(&[(i * 7 % 13) as f64, (i * 5 % 11) as f64 * 0.5]))
            .collect();
        let inst = Instance::new(pts, 3, 20).unwrap();
        let cfg = SubroutineConfig {
            overseed_factor: 1.0,
            ..SubroutineConfig::from_epsilon(0.36, 99)
        };
        let a = run_subroutine(&inst, &cfg).unwrap();
        let b = run_subroutine(&inst, &cfg).unwrap();
        assert_eq!(a, b);
        let other = run_subroutine(
            &inst,
            &SubroutineConfig {
                rng_seed: 100,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(a.len(), other.len());
    }

    #[test]
    fn coincident_points_still_fill_target() {
        let inst = Instance::from_coords(&[&[1.0], &[1.0], &[1.0], &[2.0]], 2, 2).unwrap();
        let s = run_subroutine(&inst, &SubroutineConfig::default()).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn lambda_edge_cases() {
        assert_eq!(lambda_ratio(0.0, 0.0), 1.0);
        assert_eq!(lambda_ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(lambda_ratio(0.0, 2.0), 0.0);
        assert_eq!(lambda_ratio(3.0, 2.0), 1.5);
    }

    #[test]
    fn registry_lookup() {
        let r = SubroutineRegistry::default();
        assert_eq!(
            r.names().collect::<Vec<_>>(),
            vec!["all-points", "d2-lloyd"]
        );
        assert!(r.get("d2-lloyd").is_ok());
        assert!(matches!(r.get("hsu"), Err(HckmError::UnknownSubroutine(_))));
    }
}
