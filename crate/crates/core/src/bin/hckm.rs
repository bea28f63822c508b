use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hckm::bench::{run_bench, write_bench_csv, BenchConfig, BenchData};
use hckm::checks::run_checks;
use hckm::io::{emit_solution, load_dataset, DataFormat, GeneratorSpec, RunConfig, SolutionRecord};
use hckm::subroutine::EPSILON_DIVISOR;
use hckm::{
    exact_hckm, solve_hckm, HckmError, Instance, SolveOptions, SubroutineConfig, SubroutineRegistry,
};

#[derive(Parser)]
#[command(name = "hckm", version, about = "Hard-capacitated k-means solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the approximation algorithm.
    Solve(RunArgs),
    /// Exact brute-force optimum (n <= 10).
    Oracle(RunArgs),
    /// Sweep sizes and seeds; print a ratio/runtime table as CSV.
    Bench(BenchArgs),
    /// Run the invariant suite on one instance.
    Check(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Data file (CSV or JSON).
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<DataFormat>,
    /// Synthetic data, e.g. `blobs:3,20,0.1,10` or `uniform:50,2,10`.
    #[arg(long)]
    generate: Option<GeneratorSpec>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    u: usize,
    #[arg(long, default_value_t = 0.36)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3.0)]
    overseed_factor: f64,
    #[arg(long, default_value_t = 20)]
    lloyd_rounds: usize,
    #[arg(long, default_value = "d2-lloyd")]
    subroutine: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Enumerate every composition without the per-slot cap.
    #[arg(long)]
    no_prune: bool,
    /// Write the solution as JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated point counts.
    #[arg(long, value_delimiter = ',', default_values_t = [6usize, 8, 9])]
    sizes: Vec<usize>,
    /// Number of seeds per size, starting at --seed.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    u: Option<usize>,
    #[arg(long)]
    uniform: bool,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 10.0)]
    spread: f64,
    #[arg(long, default_value_t = 0.36)]
    epsilon: f64,
    #[arg(long, default_value_t = 3.0)]
    overseed_factor: f64,
    #[arg(long, default_value_t = 20)]
    lloyd_rounds: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            input: self.input.as_ref().map(|p| p.display().to_string()),
            generator: self.generate.clone(),
            k: self.k,
            u: self.u,
            epsilon: self.epsilon,
            subroutine: self.subroutine.clone(),
            seed: self.seed,
            overseed_factor: self.overseed_factor,
            lloyd_rounds: self.lloyd_rounds,
            prune: !self.no_prune,
        }
    }

    fn instance(&self) -> Result<Instance, HckmError> {
        let points = match (&self.input, &self.generate) {
            (Some(path), _) => {
                let format = self.format.unwrap_or_else(|| DataFormat::from_path(path));
                load_dataset(path, format)?
            }
            (None, Some(spec)) => spec.generate(self.seed)?,
            (None, None) => {
                return Err(HckmError::InvalidParameter(
                    "one of --input or --generate is required".into(),
                ))
            }
        };
        Instance::new(points, self.k, self.u)
    }

    fn subroutine_config(&self) -> Result<SubroutineConfig, HckmError> {
        if !(self.epsilon > 0.0) {
            return Err(HckmError::InvalidParameter(
                "epsilon must be positive".into(),
            ));
        }
        Ok(SubroutineConfig {
            epsilon_prime: self.epsilon / EPSILON_DIVISOR,
            overseed_factor: self.overseed_factor,
            lloyd_rounds: self.lloyd_rounds,
            rng_seed: self.seed,
        })
    }

    fn options(&self) -> Result<SolveOptions, HckmError> {
        Ok(SolveOptions {
            subroutine: SubroutineRegistry::default().get(&self.subroutine)?,
            workers: self.workers,
            prune: !self.no_prune,
            progress_every: 10_000,
            cancel: None,
        })
    }

    fn write(&self, json: String) -> Result<(), HckmError> {
        match &self.output {
            Some(path) => std::fs::write(path, json + "\n").map_err(|e| HckmError::Io {
                path: path.clone(),
                source: e,
            }),
            None => {
                println!("{json}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, HckmError> {
    match cli.command {
        Command::Solve(args) => {
            let inst = args.instance()?;
            let sol = solve_hckm(&inst, &args.subroutine_config()?, &args.options()?)?;
            let config = args.run_config();
            match &args.output {
                Some(path) => emit_solution(&sol, Some(&config), path)?,
                None => println!(
                    "{}",
                    SolutionRecord::from_solution(&sol, Some(&config)).to_json()?
                ),
            }
            Ok(true)
        }
        Command::Oracle(args) => {
            let inst = args.instance()?;
            let r = exact_hckm(&inst)?;
            let json = serde_json::json!({
                "labels": r.opt_partition.labels,
                "centers": r.opt_partition.centers,
                "opt_cost": r.opt_cost,
                "nodes_explored": r.nodes_explored,
            });
            args.write(serde_json::to_string_pretty(&json)?)?;
            Ok(true)
        }
        Command::Check(args) => {
            let inst = args.instance()?;
            let report = run_checks(&inst, &args.subroutine_config()?, &args.options()?)?;
            let text: Vec<String> = report.lines.iter().map(ToString::to_string).collect();
            args.write(text.join("\n"))?;
            Ok(report.all_passed())
        }
        Command::Bench(args) => {
            let cfg = BenchConfig {
                sizes: args.sizes,
                seeds: (args.seed..args.seed + args.seeds).collect(),
                k: args.k,
                u: args.u,
                data: if args.uniform {
                    BenchData::Uniform
                } else {
                    BenchData::Blobs
                },
                dim: args.dim,
                sigma: args.sigma,
                spread: args.spread,
                subroutine: SubroutineConfig {
                    epsilon_prime: args.epsilon / EPSILON_DIVISOR,
                    overseed_factor: args.overseed_factor,
                    lloyd_rounds: args.lloyd_rounds,
                    rng_seed: args.seed,
                },
            };
            let options = SolveOptions {
                workers: args.workers,
                ..SolveOptions::default()
            };
            let rows = run_bench(&cfg, &options)?;
            match args.output {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| HckmError::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    write_bench_csv(&rows, file)?;
                }
                None => write_bench_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("HCKM_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ HckmError::Infeasible { .. }) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
