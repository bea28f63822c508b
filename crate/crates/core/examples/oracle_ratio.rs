//! Compare the approximation against brute force on small instances.

use hckm::io::GeneratorSpec;
use hckm::{exact_hckm, solve_hckm, Instance, SolveOptions, SubroutineConfig};

fn main() -> hckm::Result<()> {
    let mut worst: f64 = 1.0;
    for seed in 0..20 {
        let points = GeneratorSpec::Uniform {
            n: 9,
            dim: 2,
            extent: 10.0,
        }
        .generate(seed)?;
        let instance = Instance::new(points, 3, 3)?;
        let config = SubroutineConfig {
            overseed_factor: 0.5,
            ..SubroutineConfig::from_epsilon(0.36, seed)
        };
        let sol = solve_hckm(&instance, &config, &SolveOptions::default())?;
        let opt = exact_hckm(&instance)?.opt_cost;
        let ratio = sol.cost_after_recenter.cost_d / opt;
        worst = worst.max(ratio);
        println!(
            "seed {seed:>2}: cost {:>8.3}  opt {opt:>8.3}  ratio {ratio:.3}",
            sol.cost_after_recenter.cost_d
        );
    }
    println!("worst ratio {worst:.3}");
    Ok(())
}
