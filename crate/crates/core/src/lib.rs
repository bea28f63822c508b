//! Hard-capacitated k-means: partition `n` points into `k` clusters of at
//! most `u` points each, minimizing the total squared distance to cluster
//! centroids.
//!
//! The solver in [`driver`] is a fixed-parameter approximation:
//!
//! 1. an uncapacitated k-means subroutine ([`subroutine`]) picks a small
//!    representing set `S`;
//! 2. every way of placing `k` centers on `S` ([`enumeration`]) is scored by
//!    an optimal capacitated assignment under the surrogate distance `h`
//!    ([`metrics`], [`transport`]);
//! 3. the best placement is assigned point by point and its clusters are
//!    recentered on their centroids.
//!
//! The final squared-Euclidean cost is within `3 * lambda2 * (11 + 12 * lambda1)`
//! of optimal, which is `69 + epsilon` for a `(1 + epsilon/36)`-approximate
//! subroutine. [`oracle`] provides brute-force optima for certifying that on
//! small instances.
//!
//! ```
//! use hckm::{solve_hckm, Instance, SolveOptions, SubroutineConfig};
//!
//! let inst = Instance::from_coords(
//!     &[&[0.0, 0.0], &[0.2, 0.0], &[5.0, 5.0], &[5.0, 5.2]],
//!     2,
//!     2,
//! )
//! .unwrap();
//! let sol = solve_hckm(&inst, &SubroutineConfig::default(), &SolveOptions::default()).unwrap();
//! assert_eq!(sol.partition.cluster_sizes(), vec![2, 2]);
//! assert!(sol.cost_after_recenter.cost_d < 0.05);
//! ```

pub mod bench;
pub mod checks;
pub mod driver;
pub mod enumeration;
pub mod error;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod subroutine;
pub mod transport;
pub mod types;

pub use driver::{ratio_bound, solve_hckm, verify_sandwich, CancelToken, Solution, SolveOptions};
pub use enumeration::{count_compositions, enumerate_compositions, Composition};
pub use error::{HckmError, Result};
pub use metrics::{build_voronoi_index, dist_d, dist_h, VoronoiIndex};
pub use oracle::{exact_assignment, exact_hckm, exact_km, OracleResult};
pub use subroutine::{RepresentingSetSubroutine, SubroutineConfig, SubroutineRegistry};
pub use transport::{
    assign_points, assign_regions_h, solve, AssignmentProblem, FlowResult, Metric,
};
pub use types::{
    centroid, check_feasibility, evaluate_cost_d, CostReport, Feasibility, Instance, Partition,
    Point,
};
