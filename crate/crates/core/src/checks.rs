//! Invariant checks on a single instance, run against a fresh solve.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::driver::{h_cost, ratio_bound, solve_hckm, verify_sandwich, Solution, SolveOptions};
use crate::enumeration::{count_compositions, unrank};
use crate::error::Result;
use crate::metrics::{check_extended_triangle, check_four_point, VoronoiIndex};
use crate::oracle::{exact_hckm, exact_km, MAX_PARTITION_POINTS};
use crate::subroutine::{measure_lambda1, SubroutineConfig, EPSILON_DIVISOR};
use crate::transport::{assign_points, assign_regions_h, Metric, RegionSolver};
use crate::types::{check_feasibility, Instance, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            name,
            passed,
            detail: detail.into(),
        });
    }
}

/// Re-evaluates `samples` random compositions and returns how many beat the
/// winner's scaled `cost_h` (should be zero).
pub fn h_optimality_spot_check(
    instance: &Instance,
    solution: &Solution,
    samples: usize,
    seed: u64,
) -> Result<usize> {
    let index = VoronoiIndex::build(instance, solution.representing_set.clone())?;
    let solver = RegionSolver::new(&index, instance.u())?;
    let total = count_compositions(index.len(), instance.k(), solution.per_slot_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut better = 0;
    for _ in 0..samples {
        let rank = rng.random_range(0..total);
        let comp = unrank(index.len(), instance.k(), solution.per_slot_cap, rank)
            .expect("rank below total");
        if solver.cost(comp.counts())? < solution.winning_cost_h_scaled {
            better += 1;
        }
    }
    Ok(better)
}

/// Moves one winning center off the representing set by a random offset
/// (`trials` times) and returns how many moves lowered the point-level
/// scaled `cost_h` (should be zero).
pub fn snapping_check(
    instance: &Instance,
    solution: &Solution,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let index = VoronoiIndex::build(instance, solution.representing_set.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = instance
        .points()
        .iter()
        .flat_map(|p| p.coords().iter().map(|c| c.abs()))
        .fold(1.0f64, f64::max);
    let mut lowered = 0;
    for _ in 0..trials {
        let mut centers = solution.centers_before_recenter.clone();
        let i = rng.random_range(0..centers.len());
        let moved: Vec<f64> = centers[i]
            .coords()
            .iter()
            .map(|c| c + (rng.random::<f64>() - 0.5) * scale)
            .collect();
        centers[i] = Point::new(moved)?;
        let a = assign_points(instance, &centers, instance.u(), Metric::H(&index))?;
        if a.scaled_cost < solution.winning_cost_h_scaled {
            lowered += 1;
        }
    }
    Ok(lowered)
}

pub fn run_checks(
    instance: &Instance,
    config: &SubroutineConfig,
    options: &SolveOptions,
) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let feasible = check_feasibility(instance).is_feasible();
    report.push(
        "feasibility",
        true,
        format!(
            "n={} k={} u={} -> {}",
            instance.n(),
            instance.k(),
            instance.u(),
            if feasible { "feasible" } else { "infeasible" }
        ),
    );
    if instance.n() <= 8 {
        let oracle_feasible = exact_hckm(instance).is_ok();
        report.push(
            "feasibility-vs-oracle",
            oracle_feasible == feasible,
            format!("oracle finds a partition: {oracle_feasible}"),
        );
    }
    if !feasible {
        return Ok(report);
    }

    let pts = instance.points();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut violations = 0;
    let trials = 1000;
    for _ in 0..trials {
        let pick = |rng: &mut ChaCha8Rng| &pts[rng.random_range(0..pts.len())];
        let (a, b, c, d) = (
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
        );
        if !check_extended_triangle(a, b, c) || !check_four_point(a, b, c, d) {
            violations += 1;
        }
    }
    report.push(
        "relaxed-triangle",
        violations == 0,
        format!("{violations} violations in {trials} sampled triples/quadruples"),
    );

    let sol = solve_hckm(instance, config, options)?;
    let valid = sol.partition.validate(instance);
    report.push(
        "output-feasible",
        valid.is_ok(),
        match valid {
            Ok(()) => format!(
                "sizes {:?} <= u={}",
                sol.partition.cluster_sizes(),
                instance.u()
            ),
            Err(e) => e.to_string(),
        },
    );
    report.push(
        "recentering-monotone",
        sol.cost_after_recenter.cost_d <= sol.cost_before_recenter.cost_d,
        format!(
            "{} -> {}",
            sol.cost_before_recenter.cost_d, sol.cost_after_recenter.cost_d
        ),
    );

    let index = VoronoiIndex::build(instance, sol.representing_set.clone())?;
    let before = crate::types::Partition::new(
        sol.partition.labels.clone(),
        sol.centers_before_recenter.clone(),
    );
    for (name, p) in [
        ("sandwich-before", &before),
        ("sandwich-after", &sol.partition),
    ] {
        match verify_sandwich(instance, &index, p) {
            Ok(r) => report.push(
                name,
                true,
                format!("cost_d={} cost_h={} slack={}", r.cost_d, r.cost_h, r.slack),
            ),
            Err(e) => report.push(name, false, e.to_string()),
        }
    }

    let region = assign_regions_h(&index, sol.winning_composition.counts(), instance.u())?;
    report.push(
        "aggregation-equivalence",
        region.cost_h_scaled == sol.winning_cost_h_scaled,
        format!(
            "region {} vs point {}",
            region.cost_h_scaled, sol.winning_cost_h_scaled
        ),
    );
    let h = h_cost(&index, &before)?;
    report.push(
        "h-cost-consistent",
        (h - region.cost_h).abs() <= 1e-9 * h.max(1.0) + 1e-6,
        format!("real {h} vs scaled {}", region.cost_h),
    );

    let better = h_optimality_spot_check(instance, &sol, 100, config.rng_seed ^ 0x5eed)?;
    report.push(
        "h-optimality",
        better == 0,
        format!("{better} of 100 random compositions beat the winner"),
    );
    let lowered = snapping_check(instance, &sol, 20, config.rng_seed ^ 0xc0ffee)?;
    report.push(
        "center-snapping",
        lowered == 0,
        format!("{lowered} of 20 off-set perturbations lowered cost_h"),
    );

    if instance.n() <= MAX_PARTITION_POINTS {
        let opt = exact_hckm(instance)?;
        let km = exact_km(instance)?;
        let lambda1 = measure_lambda1(instance, &sol.representing_set, km.opt_cost);
        let cost = sol.cost_after_recenter.cost_d;
        let ratio = crate::subroutine::lambda_ratio(cost, opt.opt_cost);
        let advertised = ratio_bound(1.0 + config.epsilon_prime, 1.0);
        report.push(
            "oracle-ratio",
            ratio <= advertised,
            format!(
                "cost {cost} / opt {} = {ratio:.4} (bound {advertised:.4}, lambda1 {lambda1:.4}, eps {})",
                opt.opt_cost,
                config.epsilon_prime * EPSILON_DIVISOR
            ),
        );
    }
    Ok(report)
}
