//! Solve a synthetic blob instance and print the clustering.
//!
//! cargo run --example solve_blobs -- [seed]

use hckm::io::GeneratorSpec;
use hckm::{solve_hckm, Instance, SolveOptions, SubroutineConfig};

fn main() -> hckm::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let points = GeneratorSpec::blobs(4, 25, 1.0, 10.0).generate(seed)?;
    // one blob's worth of capacity per cluster, plus a little slack
    let instance = Instance::new(points, 4, 28)?;

    // a lean representing set keeps the placement sweep small (10 points, 715 placements)
    let config = SubroutineConfig {
        overseed_factor: 0.5,
        ..SubroutineConfig::from_epsilon(0.36, seed)
    };
    let sol = solve_hckm(&instance, &config, &SolveOptions::default())?;
    println!(
        "representing set: {} points, {} compositions",
        sol.subroutine_stats.representing_size, sol.compositions_evaluated
    );
    println!(
        "winning composition: {:?}",
        sol.winning_composition.counts()
    );
    println!(
        "cost_d {:.4} before recentering, {:.4} after",
        sol.cost_before_recenter.cost_d, sol.cost_after_recenter.cost_d
    );
    for (c, (center, size)) in sol
        .partition
        .centers
        .iter()
        .zip(sol.partition.cluster_sizes())
        .enumerate()
    {
        println!("cluster {c}: {size} points around {:?}", center.coords());
    }
    Ok(())
}
