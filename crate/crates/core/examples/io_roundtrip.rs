//! Load a dataset from disk, solve, write the solution, and read it back.

use std::fs::File;

use hckm::io::{emit_solution, load_dataset, load_solution, write_csv, DataFormat, GeneratorSpec};
use hckm::{solve_hckm, Instance, SolveOptions, SubroutineConfig};

fn main() -> hckm::Result<()> {
    let dir = std::env::temp_dir().join("hckm-io-example");
    std::fs::create_dir_all(&dir).map_err(|e| hckm::HckmError::Io {
        path: dir.clone(),
        source: e,
    })?;
    let data = dir.join("points.csv");
    let out = dir.join("solution.json");

    let points = GeneratorSpec::Uniform {
        n: 30,
        dim: 3,
        extent: 5.0,
    }
    .generate(8)?;
    let file = File::create(&data).map_err(|e| hckm::HckmError::Io {
        path: data.clone(),
        source: e,
    })?;
    write_csv(&points, file)?;

    let loaded = load_dataset(&data, DataFormat::from_path(&data))?;
    let instance = Instance::new(loaded, 3, 10)?;
    let sol = solve_hckm(
        &instance,
        &SubroutineConfig::default(),
        &SolveOptions::default(),
    )?;
    emit_solution(&sol, None, &out)?;

    let record = load_solution(&out)?;
    println!("wrote {}", out.display());
    println!(
        "stored cost_d {:.6}, recomputed {:.6}",
        record.cost_d,
        record.recompute_cost_d(&instance)?
    );
    Ok(())
}
