//! Plug a different representing-set routine into the solver.

use std::sync::Arc;

use hckm::io::GeneratorSpec;
use hckm::{
    solve_hckm, Instance, Point, RepresentingSetSubroutine, SolveOptions, SubroutineConfig,
    SubroutineRegistry,
};

/// Takes every `stride`-th input point.
struct Strided {
    stride: usize,
}

impl RepresentingSetSubroutine for Strided {
    fn name(&self) -> &str {
        "strided"
    }

    fn run(&self, instance: &Instance, _: &SubroutineConfig) -> hckm::Result<Vec<Point>> {
        let mut picked: Vec<Point> = instance
            .points()
            .iter()
            .step_by(self.stride)
            .cloned()
            .collect();
        picked.truncate(instance.n());
        Ok(picked)
    }
}

fn main() -> hckm::Result<()> {
    let mut registry = SubroutineRegistry::default();
    registry.register(Arc::new(Strided { stride: 3 }));
    println!("registered: {:?}", registry.names().collect::<Vec<_>>());

    let points = GeneratorSpec::blobs(3, 6, 0.5, 8.0).generate(1)?;
    let instance = Instance::new(points, 3, 6)?;
    for name in ["d2-lloyd", "strided", "all-points"] {
        let options = SolveOptions {
            subroutine: registry.get(name)?,
            ..SolveOptions::default()
        };
        let sol = solve_hckm(&instance, &SubroutineConfig::default(), &options)?;
        println!(
            "{name:>10}: |S| = {:>2}, {:>5} compositions, cost_d {:.4}",
            sol.subroutine_stats.representing_size,
            sol.compositions_evaluated,
            sol.cost_after_recenter.cost_d
        );
    }
    Ok(())
}
