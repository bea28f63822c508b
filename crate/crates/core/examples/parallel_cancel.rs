//! Multi-threaded sweep, and cancelling a long one.

use std::thread;
use std::time::{Duration, Instant};

use hckm::io::GeneratorSpec;
use hckm::{solve_hckm, CancelToken, Instance, SolveOptions, SubroutineConfig};

fn main() -> hckm::Result<()> {
    let points = GeneratorSpec::blobs(5, 40, 1.0, 10.0).generate(3)?;
    let instance = Instance::new(points, 5, 50)?;
    let config = SubroutineConfig {
        overseed_factor: 0.6,
        ..SubroutineConfig::from_epsilon(0.36, 3)
    };

    for workers in [1, 4] {
        let started = Instant::now();
        let options = SolveOptions {
            workers,
            ..SolveOptions::default()
        };
        let sol = solve_hckm(&instance, &config, &options)?;
        println!(
            "{workers} worker(s): {} compositions, cost_d {:.4}, {:.2?}",
            sol.compositions_evaluated,
            sol.cost_after_recenter.cost_d,
            started.elapsed()
        );
    }

    // the stock oversampling makes this sweep far too long to finish
    let config = SubroutineConfig::from_epsilon(0.36, 3);
    let cancel = CancelToken::new();
    let options = SolveOptions {
        workers: 2,
        cancel: Some(cancel.clone()),
        ..SolveOptions::default()
    };
    let stopper = thread::spawn(move || {
        thread::sleep(Duration::from_millis(200));
        cancel.cancel();
    });
    match solve_hckm(&instance, &config, &options) {
        Ok(sol) => println!(
            "cancelled run: complete={}, {}/{} compositions, best cost_d {:.4}",
            sol.complete,
            sol.compositions_evaluated,
            sol.compositions_total,
            sol.cost_after_recenter.cost_d
        ),
        Err(e) => println!("cancelled run: {e}"),
    }
    stopper.join().unwrap();
    Ok(())
}
