//! Seed and size sweeps producing ratio/runtime tables.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::driver::{solve_hckm, SolveOptions};
use crate::error::{HckmError, Result};
use crate::io::GeneratorSpec;
use crate::oracle::{exact_hckm, MAX_PARTITION_POINTS};
use crate::subroutine::{lambda_ratio, SubroutineConfig};
use crate::types::{check_feasibility, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchData {
    Blobs,
    Uniform,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub k: usize,
    /// Capacity; `None` uses the tightest feasible value `ceil(n / k)`.
    pub u: Option<usize>,
    pub data: BenchData,
    pub dim: usize,
    pub sigma: f64,
    pub spread: f64,
    pub subroutine: SubroutineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub u: usize,
    pub seed: u64,
    pub representing_size: usize,
    pub compositions: u64,
    pub cost_d: f64,
    /// Brute-force optimum, only for `n <= 10`.
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub solve_ms: f64,
    pub oracle_ms: Option<f64>,
}

fn bench_instance(cfg: &BenchConfig, n: usize, seed: u64) -> Result<Instance> {
    let k = cfg.k;
    let u = cfg.u.unwrap_or_else(|| n.div_ceil(k));
    let points = match cfg.data {
        BenchData::Blobs => {
            let per_blob = n.div_ceil(k);
            let mut pts = GeneratorSpec::Blobs {
                count: k,
                per_blob,
                sigma: cfg.sigma,
                spread: cfg.spread,
                dim: cfg.dim,
            }
            .generate(seed)?;
            pts.truncate(n);
            pts
        }
        BenchData::Uniform => GeneratorSpec::Uniform {
            n,
            dim: cfg.dim,
            extent: cfg.spread,
        }
        .generate(seed)?,
    };
    Instance::new(points, k, u)
}

pub fn run_bench(cfg: &BenchConfig, options: &SolveOptions) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        for &seed in &cfg.seeds {
            let inst = bench_instance(cfg, n, seed)?;
            if !check_feasibility(&inst).is_feasible() {
                return Err(HckmError::Infeasible {
                    n,
                    k: inst.k(),
                    u: inst.u(),
                });
            }
            let sub = SubroutineConfig {
                rng_seed: seed,
                ..cfg.subroutine
            };
            let t = Instant::now();
            let sol = solve_hckm(&inst, &sub, options)?;
            let solve_ms = t.elapsed().as_secs_f64() * 1e3;
            let cost = sol.cost_after_recenter.cost_d;
            let (opt, ratio, oracle_ms) = if n <= MAX_PARTITION_POINTS {
                let t = Instant::now();
                let opt = exact_hckm(&inst)?.opt_cost;
                let ms = t.elapsed().as_secs_f64() * 1e3;
                (Some(opt), Some(lambda_ratio(cost, opt)), Some(ms))
            } else {
                (None, None, None)
            };
            log::info!("n={n} seed={seed} cost={cost} ratio={ratio:?}");
            rows.push(BenchRow {
                n,
                k: inst.k(),
                u: inst.u(),
                seed,
                representing_size: sol.subroutine_stats.representing_size,
                compositions: sol.compositions_evaluated,
                cost_d: cost,
                opt,
                ratio,
                solve_ms,
                oracle_ms,
            });
        }
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| HckmError::io("<bench csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_produces_rows() {
        let cfg = BenchConfig {
            sizes: vec![6, 12],
            seeds: vec![1, 2],
            k: 2,
            u: None,
            data: BenchData::Blobs,
            dim: 2,
            sigma: 0.5,
            spread: 10.0,
            subroutine: SubroutineConfig {
                overseed_factor: 0.5,
                ..SubroutineConfig::default()
            },
        };
        let rows = run_bench(&cfg, &SolveOptions::default()).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].ratio.is_some());
        assert!(rows[3].ratio.is_none());
        for r in &rows {
            assert_eq!(r.u, r.n.div_ceil(2));
            if let Some(ratio) = r.ratio {
                assert!((1.0 - 1e-9..=69.36).contains(&ratio));
            }
        }
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,k,u,seed,"));
        assert_eq!(text.lines().count(), 5);
    }
}
