//! End-to-end solver: feasibility gate, representing set, composition sweep
//! under `h`, point-level assignment of the winner, recentering.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::enumeration::{chunk_ranges, count_compositions, Composition, Compositions};
use crate::error::{HckmError, Result};
use crate::metrics::VoronoiIndex;
use crate::metrics::INEQUALITY_REL_TOL;
use crate::subroutine::{D2Lloyd, RepresentingSetSubroutine, SubroutineConfig};
use crate::transport::{assign_points, composition_centers, Metric, RegionSolver};
use crate::types::{
    centroid, check_feasibility, evaluate_cost_d, CostReport, Instance, Partition, Point,
};

/// Shared flag for aborting a long sweep.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Clone)]
pub struct SolveOptions {
    pub subroutine: Arc<dyn RepresentingSetSubroutine>,
    pub workers: usize,
    /// Cap each slot at `ceil(n / u)` copies.
    pub prune: bool,
    /// Log progress every this many compositions (0 disables).
    pub progress_every: u64,
    pub cancel: Option<CancelToken>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            subroutine: Arc::new(D2Lloyd),
            workers: 1,
            prune: true,
            progress_every: 0,
            cancel: None,
        }
    }
}

impl std::fmt::Debug for SolveOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolveOptions")
            .field("subroutine", &self.subroutine.name())
            .field("workers", &self.workers)
            .field("prune", &self.prune)
            .field("progress_every", &self.progress_every)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubroutineStats {
    pub name: String,
    pub representing_size: usize,
    pub representing_cost: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Final partition with recentered centers.
    pub partition: Partition,
    /// Centers of the winning composition, before recentering.
    pub centers_before_recenter: Vec<Point>,
    pub cost_before_recenter: CostReport,
    pub cost_after_recenter: CostReport,
    pub winning_composition: Composition,
    /// Winner's `cost_h` in scaled units.
    pub winning_cost_h_scaled: i64,
    pub representing_set: Vec<Point>,
    pub per_slot_cap: usize,
    pub compositions_total: u64,
    pub compositions_evaluated: u64,
    pub subroutine_stats: SubroutineStats,
    /// False when the sweep was cancelled; the result is then only the best
    /// composition seen so far.
    pub complete: bool,
    pub wall_time: Duration,
}

/// Per-slot copy limit used by the sweep.
pub fn per_slot_cap(instance: &Instance, prune: bool) -> usize {
    if prune {
        instance.k().min(instance.n().div_ceil(instance.u()))
    } else {
        instance.k()
    }
}

struct ChunkBest {
    best: Option<(i64, Vec<usize>)>,
    evaluated: u64,
}

#[allow(clippy::too_many_arguments)]
fn sweep_chunk(
    solver: &RegionSolver<'_>,
    size: usize,
    k: usize,
    cap: usize,
    (start, end): (u128, u128),
    options: &SolveOptions,
    progress: &AtomicU64,
    total: u64,
) -> Result<ChunkBest> {
    let mut out = ChunkBest {
        best: None,
        evaluated: 0,
    };
    for comp in Compositions::range(size, k, cap, start, end) {
        if options
            .cancel
            .as_ref()
            .is_some_and(CancelToken::is_cancelled)
        {
            break;
        }
        let cost = solver.cost(comp.counts())?;
        out.evaluated += 1;
        // strict: earlier positions win ties
        if out.best.as_ref().is_none_or(|(b, _)| cost < *b) {
            out.best = Some((cost, comp.0));
        }
        if options.progress_every > 0 {
            let done = progress.fetch_add(1, Ordering::Relaxed) + 1;
            if done.is_multiple_of(options.progress_every) {
                log::info!("evaluated {done}/{total} compositions");
            }
        }
    }
    Ok(out)
}

/// Runs the full approximation on `instance`.
pub fn solve_hckm(
    instance: &Instance,
    config: &SubroutineConfig,
    options: &SolveOptions,
) -> Result<Solution> {
    let started = Instant::now();
    if !check_feasibility(instance).is_feasible() {
        return Err(HckmError::Infeasible {
            n: instance.n(),
            k: instance.k(),
            u: instance.u(),
        });
    }
    if options.workers == 0 {
        return Err(HckmError::InvalidParameter(
            "worker count must be at least 1".into(),
        ));
    }
    let (n, k, u) = (instance.n(), instance.k(), instance.u());

    let representing = options.subroutine.run(instance, config)?;
    if representing.len() < k || representing.len() > n {
        return Err(HckmError::Subroutine(format!(
            "`{}` returned {} representing points, need between k={k} and n={n}",
            options.subroutine.name(),
            representing.len()
        )));
    }
    let index = VoronoiIndex::build(instance, representing)?;
    log::debug!(
        "representing set: {} points, voronoi cost {}",
        index.len(),
        index.voronoi_cost()
    );

    let cap = per_slot_cap(instance, options.prune);
    let size = index.len();
    let total = count_compositions(size, k, cap);
    assert!(
        total > 0,
        "no composition of k={k} over {size} slots with cap {cap}"
    );
    let total_u64 = u64::try_from(total).unwrap_or(u64::MAX);

    let solver = RegionSolver::new(&index, u)?;
    let progress = AtomicU64::new(0);
    let ranges = chunk_ranges(total, options.workers);
    let chunks: Vec<Result<ChunkBest>> = if ranges.len() == 1 {
        vec![sweep_chunk(
            &solver, size, k, cap, ranges[0], options, &progress, total_u64,
        )]
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|&range| {
                    let solver = &solver;
                    let progress = &progress;
                    scope.spawn(move || {
                        sweep_chunk(solver, size, k, cap, range, options, progress, total_u64)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        })
    };

    // chunks are in rank order, so a strict comparison keeps the earliest tie
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut evaluated = 0u64;
    for chunk in chunks {
        let chunk = chunk?;
        evaluated += chunk.evaluated;
        if let Some((cost, comp)) = chunk.best {
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, comp));
            }
        }
    }
    let complete = evaluated == total_u64;
    let (best_scaled, best_counts) = best.ok_or(HckmError::Cancelled)?;

    let centers = composition_centers(&index, &best_counts);
    let assignment = assign_points(instance, &centers, u, Metric::H(&index))?;
    if assignment.scaled_cost != best_scaled {
        return Err(HckmError::Internal(format!(
            "point-level h cost {} disagrees with region-level {}",
            assignment.scaled_cost, best_scaled
        )));
    }
    let cost_before_recenter = assignment.cost;
    let partition = recenter(instance, &assignment.partition)?;
    let cost_after_recenter = CostReport {
        cost_d: evaluate_cost_d(instance, &partition)?,
        cost_h: Some(h_cost(&index, &partition)?),
    };

    Ok(Solution {
        partition,
        centers_before_recenter: centers,
        cost_before_recenter,
        cost_after_recenter,
        winning_composition: Composition(best_counts),
        winning_cost_h_scaled: best_scaled,
        subroutine_stats: SubroutineStats {
            name: options.subroutine.name().to_string(),
            representing_size: index.len(),
            representing_cost: index.voronoi_cost(),
            seed: config.rng_seed,
        },
        representing_set: index.representing_points().to_vec(),
        per_slot_cap: cap,
        compositions_total: total_u64,
        compositions_evaluated: evaluated,
        complete,
        wall_time: started.elapsed(),
    })
}

/// Moves every nonempty cluster's center to its centroid; labels unchanged.
///
/// If floating-point rounding makes the centroid marginally worse than the
/// current center for some cluster, that cluster keeps its center.
pub fn recenter(instance: &Instance, partition: &Partition) -> Result<Partition> {
    let mut members: Vec<Vec<&Point>> = vec![Vec::new(); partition.centers.len()];
    for (x, &l) in instance.points().iter().zip(&partition.labels) {
        members[l].push(x);
    }
    let centers = partition
        .centers
        .iter()
        .zip(&members)
        .map(|(old, m)| {
            if m.is_empty() {
                return Ok(old.clone());
            }
            let new = centroid(m.iter().copied())?;
            let cost = |c: &Point| -> f64 {
                m.iter()
                    .map(|x| crate::metrics::sq_dist(x.coords(), c.coords()))
                    .sum()
            };
            Ok(if cost(&new) <= cost(old) {
                new
            } else {
                old.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::new(partition.labels.clone(), centers))
}

/// `sum_j h(x_j, center of x_j)` in real arithmetic.
pub fn h_cost(index: &VoronoiIndex, partition: &Partition) -> Result<f64> {
    partition
        .labels
        .iter()
        .enumerate()
        .map(|(j, &l)| index.dist_h_indexed(j, &partition.centers[l]))
        .sum()
}

/// `3 * lambda2 * (11 + 12 * lambda1)`.
pub fn ratio_bound(lambda1: f64, lambda2: f64) -> f64 {
    3.0 * lambda2 * (11.0 + 12.0 * lambda1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub cost_d: f64,
    pub cost_h: f64,
    /// `3 * cost_h - cost_d`.
    pub slack: f64,
}

/// Checks `cost_d <= 3 * cost_h` for one assignment.
pub fn verify_sandwich(
    instance: &Instance,
    index: &VoronoiIndex,
    partition: &Partition,
) -> Result<SandwichReport> {
    let cost_d = evaluate_cost_d(instance, partition)?;
    let cost_h = h_cost(index, partition)?;
    let bound = 3.0 * cost_h;
    if cost_d > bound + INEQUALITY_REL_TOL * cost_d.max(bound) {
        return Err(HckmError::SandwichViolation { cost_d, cost_h });
    }
    Ok(SandwichReport {
        cost_d,
        cost_h,
        slack: bound - cost_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::build_voronoi_index;
    use crate::oracle::exact_hckm;

    fn default_solve(inst: &Instance) -> Result<Solution> {
        solve_hckm(inst, &SubroutineConfig::default(), &SolveOptions::default())
    }

    #[test]
    fn ratio_bound_values() {
        assert_eq!(ratio_bound(1.0, 1.0), 69.0);
        assert!((ratio_bound(1.0 + 0.36 / 36.0, 1.0) - 69.36).abs() < 1e-12);
        assert_eq!(ratio_bound(0.0, 1.0), 33.0);
    }

    #[test]
    fn infeasible_instance_message() {
        let inst = Instance::from_coords(&[&[0.0], &[1.0], &[2.0]], 1, 2).unwrap();
        let err = default_solve(&inst).unwrap_err();
        assert!(err.to_string().contains("Infeasible instance"));
    }

    #[test]
    fn two_tight_pairs() {
        let inst = Instance::from_coords(
            &[&[0.0, 0.0], &[0.0, 0.4], &[20.0, 0.0], &[20.0, 0.2]],
            2,
            2,
        )
        .unwrap();
        let sol = default_solve(&inst).unwrap();
        let opt = exact_hckm(&inst).unwrap();
        // within-pair variances: 2 * 0.2^2 + 2 * 0.1^2
        assert!((opt.opt_cost - 0.1).abs() < 1e-12);
        assert!((sol.cost_after_recenter.cost_d - opt.opt_cost).abs() < 1e-12);
        let l = &sol.partition.labels;
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
    }

    #[test]
    fn tight_triple_respects_capacity() {
        let inst = Instance::from_coords(&[&[0.0, 0.0], &[0.1, 0.0], &[0.2, 0.0]], 2, 2).unwrap();
        let sol = default_solve(&inst).unwrap();
        sol.partition.validate(&inst).unwrap();
        let opt = exact_hckm(&inst).unwrap().opt_cost;
        assert!(sol.cost_after_recenter.cost_d <= 69.36 * opt);
        assert!(sol.cost_after_recenter.cost_d >= opt - 1e-15);
    }

    #[test]
    fn k_equals_n_gives_zero() {
        let inst = Instance::from_coords(&[&[0.0], &[2.0], &[5.0], &[6.0]], 4, 1).unwrap();
        let sol = default_solve(&inst).unwrap();
        assert_eq!(sol.cost_after_recenter.cost_d, 0.0);
        assert_eq!(sol.partition.cluster_sizes(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn recentering_keeps_labels_and_never_increases_cost() {
        let inst = Instance::from_coords(
            &[
                &[0.0, 0.0],
                &[1.0, 0.3],
                &[0.4, 2.0],
                &[6.0, 6.0],
                &[6.5, 5.0],
                &[9.0, 1.0],
            ],
            2,
            3,
        )
        .unwrap();
        let cfg = SubroutineConfig {
            overseed_factor: 0.3,
            ..SubroutineConfig::default()
        };
        let sol = solve_hckm(&inst, &cfg, &SolveOptions::default()).unwrap();
        assert!(sol.cost_after_recenter.cost_d <= sol.cost_before_recenter.cost_d);
        let before = Partition::new(
            sol.partition.labels.clone(),
            sol.centers_before_recenter.clone(),
        );
        assert_eq!(
            evaluate_cost_d(&inst, &before).unwrap(),
            sol.cost_before_recenter.cost_d
        );
    }

    #[test]
    fn cancelled_before_start_is_an_error() {
        let inst = Instance::from_coords(&[&[0.0], &[1.0]], 1, 2).unwrap();
        let token = CancelToken::new();
        token.cancel();
        let opts = SolveOptions {
            cancel: Some(token),
            ..SolveOptions::default()
        };
        assert!(solve_hckm(&inst, &SubroutineConfig::default(), &opts).is_err());
    }

    #[test]
    fn sandwich_trivial_case() {
        let inst = Instance::from_coords(&[&[0.0], &[4.0]], 2, 1).unwrap();
        let idx = build_voronoi_index(&inst, inst.points()).unwrap();
        let p = Partition::new(vec![0, 1], inst.points().to_vec());
        let r = verify_sandwich(&inst, &idx, &p).unwrap();
        assert_eq!(r.cost_d, 0.0);
        assert_eq!(r.cost_h, 0.0);
    }
}
