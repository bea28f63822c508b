use std::sync::Arc;

use hckm::io::{emit_solution, load_solution, GeneratorSpec, SolutionRecord};
use hckm::subroutine::AllPoints;
use hckm::{
    exact_hckm, exact_km, solve_hckm, CancelToken, HckmError, Instance, Point,
    RepresentingSetSubroutine, SolveOptions, SubroutineConfig, SubroutineRegistry,
};

fn blobs(seed: u64) -> Instance {
    let pts = GeneratorSpec::blobs(3, 3, 0.1, 10.0)
        .generate(seed)
        .unwrap();
    Instance::new(pts, 3, 3).unwrap()
}

#[test]
fn well_separated_blobs_are_recovered() {
    let inst = blobs(7);
    let sol = solve_hckm(
        &inst,
        &SubroutineConfig::from_epsilon(0.36, 7),
        &SolveOptions::default(),
    )
    .unwrap();
    let opt = exact_km(&inst.with_params(3, 9).unwrap()).unwrap().opt_cost;
    assert!(sol.cost_after_recenter.cost_d <= opt * (1.0 + 1e-9));
    assert_eq!(sol.partition.cluster_sizes(), vec![3, 3, 3]);
}

#[test]
fn identical_runs_are_identical() {
    let inst = blobs(3);
    let config = SubroutineConfig {
        overseed_factor: 1.0,
        ..SubroutineConfig::from_epsilon(0.36, 11)
    };
    let a = solve_hckm(&inst, &config, &SolveOptions::default()).unwrap();
    let b = solve_hckm(&inst, &config, &SolveOptions::default()).unwrap();
    assert_eq!(a.partition, b.partition);
    assert_eq!(a.winning_composition, b.winning_composition);
    assert_eq!(a.representing_set, b.representing_set);
}

#[test]
fn all_points_subroutine_matches_the_oracle_on_tiny_inputs() {
    let inst = Instance::from_coords(&[&[0.0], &[1.0], &[2.0], &[10.0], &[11.0]], 2, 3).unwrap();
    let options = SolveOptions {
        subroutine: Arc::new(AllPoints),
        prune: false,
        ..SolveOptions::default()
    };
    let sol = solve_hckm(&inst, &SubroutineConfig::default(), &options).unwrap();
    let opt = exact_hckm(&inst).unwrap().opt_cost;
    assert!((sol.cost_after_recenter.cost_d - opt).abs() <= 1e-9);
    assert_eq!(sol.subroutine_stats.name, "all-points");
    assert_eq!(sol.compositions_total, 15);
}

#[test]
fn infeasible_instances_are_rejected() {
    let inst = Instance::from_coords(&[&[0.0], &[1.0], &[2.0]], 1, 2).unwrap();
    let err = solve_hckm(
        &inst,
        &SubroutineConfig::default(),
        &SolveOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, HckmError::Infeasible { n: 3, k: 1, u: 2 }));
    assert!(err.to_string().contains("Infeasible instance"));
}

#[test]
fn cancelled_before_start_reports_cancellation() {
    let inst = blobs(1);
    let cancel = CancelToken::new();
    cancel.cancel();
    let options = SolveOptions {
        cancel: Some(cancel),
        ..SolveOptions::default()
    };
    let err = solve_hckm(&inst, &SubroutineConfig::default(), &options).unwrap_err();
    assert!(matches!(err, HckmError::Cancelled));
}

struct Broken;

impl RepresentingSetSubroutine for Broken {
    fn name(&self) -> &str {
        "broken"
    }

    fn run(&self, _: &Instance, _: &SubroutineConfig) -> hckm::Result<Vec<Point>> {
        Ok(vec![Point::from_slice(&[0.0, 0.0])])
    }
}

#[test]
fn undersized_representing_sets_are_refused() {
    let inst = blobs(2);
    let options = SolveOptions {
        subroutine: Arc::new(Broken),
        ..SolveOptions::default()
    };
    let err = solve_hckm(&inst, &SubroutineConfig::default(), &options).unwrap_err();
    assert!(matches!(err, HckmError::Subroutine(_)));
}

#[test]
fn registry_accepts_custom_subroutines() {
    let mut registry = SubroutineRegistry::default();
    assert!(registry.get("broken").is_err());
    registry.register(Arc::new(Broken));
    assert_eq!(registry.get("broken").unwrap().name(), "broken");
    assert!(registry.names().any(|n| n == "d2-lloyd"));
}

#[test]
fn solution_json_round_trips() {
    let inst = blobs(5);
    let sol = solve_hckm(
        &inst,
        &SubroutineConfig::default(),
        &SolveOptions::default(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    emit_solution(&sol, None, &path).unwrap();
    let record = load_solution(&path).unwrap();
    assert_eq!(record, SolutionRecord::from_solution(&sol, None));
    let recomputed = record.recompute_cost_d(&inst).unwrap();
    assert!((recomputed - record.cost_d).abs() <= 1e-9 * record.cost_d.max(1.0));
}
