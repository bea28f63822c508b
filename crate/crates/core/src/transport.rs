//! Capacitated assignment as a transportation problem.
//!
//! Sources carry integral supplies (single points, or whole Voronoi regions),
//! sinks carry capacities (center copies times `u`). The problem is solved as
//! min-cost flow with successive shortest augmenting paths; Dijkstra runs on
//! reduced costs, so every step sees nonnegative edge weights.
//!
//! Real costs are converted to integers with [`scale_cost`] (factor `2^30`,
//! round-half-even) before solving. Everything that is compared for exact
//! equality (point-level vs region-level, solver vs brute force) goes through
//! the same conversion.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{HckmError, Result};
use crate::metrics::{sq_dist, VoronoiIndex};
use crate::types::{evaluate_cost_d, CostReport, Instance, Partition, Point};

pub const COST_SCALE_BITS: u32 = 30;
pub const COST_SCALE: f64 = (1u64 << COST_SCALE_BITS) as f64;

// Largest scaled unit cost accepted by `scale_cost`.
const MAX_SCALED_UNIT: f64 = (1u64 << 62) as f64;

/// Converts a nonnegative real cost to fixed point with `2^30` resolution.
pub fn scale_cost(cost: f64) -> Result<i64> {
    if cost.is_nan() || cost < 0.0 {
        return Err(HckmError::InvalidParameter(format!(
            "cost must be finite and nonnegative, got {cost}"
        )));
    }
    let scaled = (cost * COST_SCALE).round_ties_even();
    if !scaled.is_finite() || scaled > MAX_SCALED_UNIT {
        return Err(HckmError::CostOverflow);
    }
    Ok(scaled as i64)
}

pub fn unscale_cost(scaled: i64) -> f64 {
    scaled as f64 / COST_SCALE
}

/// Supplies, sink capacities and a dense per-unit cost table.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProblem {
    pub supplies: Vec<u64>,
    pub demands_cap: Vec<u64>,
    pub cost: Vec<Vec<f64>>,
}

impl AssignmentProblem {
    pub fn new(supplies: Vec<u64>, demands_cap: Vec<u64>, cost: Vec<Vec<f64>>) -> Result<Self> {
        if cost.len() != supplies.len() {
            return Err(HckmError::InvalidParameter(format!(
                "cost table has {} rows for {} sources",
                cost.len(),
                supplies.len()
            )));
        }
        for row in &cost {
            if row.len() != demands_cap.len() {
                return Err(HckmError::InvalidParameter(format!(
                    "cost row has {} entries for {} sinks",
                    row.len(),
                    demands_cap.len()
                )));
            }
            if row.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(HckmError::InvalidParameter(
                    "costs must be finite and nonnegative".into(),
                ));
            }
        }
        Ok(AssignmentProblem {
            supplies,
            demands_cap,
            cost,
        })
    }

    pub fn scaled_costs(&self) -> Result<Vec<i64>> {
        self.cost
            .iter()
            .flat_map(|row| row.iter().map(|&c| scale_cost(c)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub flow: Vec<Vec<u64>>,
    /// `sum flow[a][b] * cost[a][b]` in real arithmetic.
    pub total_cost: f64,
    /// The same sum over scaled costs; this is what the solver minimizes.
    pub scaled_cost: i64,
}

impl FlowResult {
    pub fn row_sums(&self) -> Vec<u64> {
        self.flow.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        let cols = self.flow.first().map_or(0, Vec::len);
        (0..cols)
            .map(|b| self.flow.iter().map(|r| r[b]).sum())
            .collect()
    }
}

/// Minimum-cost integral flow saturating every supply.
pub fn solve(problem: &AssignmentProblem) -> Result<FlowResult> {
    let scaled = problem.scaled_costs()?;
    let (flow, scaled_cost) = solve_scaled(&problem.supplies, &problem.demands_cap, &scaled)?;
    let total_cost = flow
        .iter()
        .zip(&problem.cost)
        .flat_map(|(fr, cr)| fr.iter().zip(cr).map(|(&f, &c)| f as f64 * c))
        .sum();
    Ok(FlowResult {
        flow,
        total_cost,
        scaled_cost,
    })
}

struct Edge {
    to: usize,
    cap: u64,
    cost: i64,
}

/// Residual network; edge `e ^ 1` is the reverse of edge `e`.
struct Network {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u64, cost: i64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, cost });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
    }

    /// Successive shortest paths from `source` to `sink` until `demand` units
    /// are routed or no augmenting path remains. Returns (routed, cost).
    fn min_cost_flow(&mut self, source: usize, sink: usize, demand: u64) -> (u64, i64) {
        let n = self.adj.len();
        // all original costs are nonnegative, so zero potentials are valid
        let mut potential = vec![0i64; n];
        let mut dist = vec![i64::MAX; n];
        let mut parent_edge = vec![usize::MAX; n];
        let mut routed = 0u64;
        let mut total = 0i64;
        let mut heap = BinaryHeap::new();

        while routed < demand {
            dist.fill(i64::MAX);
            parent_edge.fill(usize::MAX);
            dist[source] = 0;
            heap.push(Reverse((0i64, source)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &e in &self.adj[v] {
                    let edge = &self.edges[e];
                    if edge.cap == 0 {
                        continue;
                    }
                    let reduced = edge.cost + potential[v] - potential[edge.to];
                    debug_assert!(reduced >= 0, "negative reduced cost {reduced}");
                    let nd = d + reduced;
                    if nd < dist[edge.to] {
                        dist[edge.to] = nd;
                        parent_edge[edge.to] = e;
                        heap.push(Reverse((nd, edge.to)));
                    }
                }
            }
            if dist[sink] == i64::MAX {
                break;
            }
            // nodes unreachable now stay unreachable, so their potentials are never read again
            for v in 0..n {
                if dist[v] != i64::MAX {
                    potential[v] += dist[v];
                }
            }

            let mut push = demand - routed;
            let mut v = sink;
            while v != source {
                let e = parent_edge[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let e = parent_edge[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                total += push as i64 * self.edges[e].cost;
                v = self.edges[e ^ 1].to;
            }
            routed += push;
        }
        (routed, total)
    }
}

/// Transportation solve over integer costs (row-major `supplies.len() x caps.len()`).
///
/// Zero supplies and zero capacities are allowed and simply carry no flow.
pub fn solve_scaled(supplies: &[u64], caps: &[u64], cost: &[i64]) -> Result<(Vec<Vec<u64>>, i64)> {
    let rows = supplies.len();
    let cols = caps.len();
    if cost.len() != rows * cols {
        return Err(HckmError::InvalidParameter(format!(
            "cost table has {} entries, expected {}",
            cost.len(),
            rows * cols
        )));
    }
    if let Some(c) = cost.iter().find(|&&c| c < 0) {
        return Err(HckmError::InvalidParameter(format!(
            "negative scaled cost {c}"
        )));
    }
    let supply: u64 = supplies.iter().sum();
    let capacity: u64 = caps.iter().fold(0u64, |acc, &c| acc.saturating_add(c));
    if supply > capacity {
        return Err(HckmError::TransportInfeasible { supply, capacity });
    }

    // every potential and every partial sum is bounded by (supply + nodes) * max unit cost
    let max_unit = cost.iter().copied().max().unwrap_or(0) as u128;
    let nodes = (rows + cols + 2) as u128;
    if max_unit * (supply as u128 + nodes) * 4 > i64::MAX as u128 {
        return Err(HckmError::CostOverflow);
    }

    let source = rows + cols;
    let sink = source + 1;
    let mut net = Network::new(rows + cols + 2);
    for (a, &s) in supplies.iter().enumerate() {
        if s > 0 {
            net.add_edge(source, a, s, 0);
        }
    }
    let mut arc_ids = vec![usize::MAX; rows * cols];
    for a in 0..rows {
        if supplies[a] == 0 {
            continue;
        }
        for b in 0..cols {
            if caps[b] == 0 {
                continue;
            }
            arc_ids[a * cols + b] = net.edges.len();
            net.add_edge(a, rows + b, supplies[a], cost[a * cols + b]);
        }
    }
    for (b, &c) in caps.iter().enumerate() {
        if c > 0 {
            net.add_edge(rows + b, sink, c, 0);
        }
    }

    let (routed, total) = net.min_cost_flow(source, sink, supply);
    if routed < supply {
        return Err(HckmError::TransportInfeasible { supply, capacity });
    }

    let mut flow = vec![vec![0u64; cols]; rows];
    for a in 0..rows {
        for b in 0..cols {
            let e = arc_ids[a * cols + b];
            if e != usize::MAX {
                // flow on an arc equals the residual capacity of its reverse
                flow[a][b] = net.edges[e ^ 1].cap;
            }
        }
    }
    Ok((flow, total))
}

/// Which objective an assignment is optimized for.
#[derive(Debug, Clone, Copy)]
pub enum Metric<'a> {
    /// Squared Euclidean distance.
    D,
    /// Surrogate distance routed through the representing set of the index.
    H(&'a VoronoiIndex),
}

/// Scaled `h(x_j, c)` where `c` has nearest representing point `rc` at
/// distance `dc`. Each of the three terms is scaled separately.
fn scaled_h(index: &VoronoiIndex, j: usize, rc: usize, dc: f64) -> Result<i64> {
    Ok(scale_cost(index.dist_to_region(j))?
        + scale_cost(index.between(index.region_of(j), rc))?
        + scale_cost(dc)?)
}

/// Scaled cost of sending the `j`-th data point to `center` under `metric`.
pub fn scaled_point_cost(
    instance: &Instance,
    j: usize,
    center: &Point,
    metric: Metric<'_>,
) -> Result<i64> {
    match metric {
        Metric::D => scale_cost(sq_dist(instance.points()[j].coords(), center.coords())),
        Metric::H(index) => {
            let (rc, dc) = index.nearest(center)?;
            scaled_h(index, j, rc, dc)
        }
    }
}

/// Result of a point-level capacitated assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub partition: Partition,
    pub cost: CostReport,
    /// Optimal objective in scaled units under the requested metric.
    pub scaled_cost: i64,
}

/// Optimal capacity-respecting assignment of every data point to `centers`
/// (listed with multiplicity; identical locations share one sink of capacity
/// `multiplicity * u`).
///
/// `cost.cost_d` is always recomputed from the final partition. Under
/// [`Metric::H`], `cost.cost_h` is the optimal scaled objective converted back
/// to real units.
pub fn assign_points(
    instance: &Instance,
    centers: &[Point],
    u: usize,
    metric: Metric<'_>,
) -> Result<Assignment> {
    if centers.is_empty() {
        return Err(HckmError::InvalidParameter("no centers given".into()));
    }
    for c in centers {
        if c.dim() != instance.dim() {
            return Err(HckmError::DimensionMismatch {
                expected: instance.dim(),
                found: c.dim(),
            });
        }
    }
    if let Metric::H(index) = metric {
        if index.labels().len() != instance.n() || index.dim() != instance.dim() {
            return Err(HckmError::InvalidParameter(
                "voronoi index was not built for this instance".into(),
            ));
        }
    }

    // merge copies at identical locations
    let mut sink_members: Vec<Vec<usize>> = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        match sink_members
            .iter()
            .position(|m| centers[m[0]].coords() == c.coords())
        {
            Some(g) => sink_members[g].push(i),
            None => sink_members.push(vec![i]),
        }
    }
    let groups = sink_members.len();
    let caps: Vec<u64> = sink_members.iter().map(|m| (m.len() * u) as u64).collect();

    let n = instance.n();
    let mut cost = Vec::with_capacity(n * groups);
    match metric {
        Metric::D => {
            for x in instance.points() {
                for m in &sink_members {
                    cost.push(scale_cost(sq_dist(x.coords(), centers[m[0]].coords()))?);
                }
            }
        }
        Metric::H(index) => {
            let nearest = sink_members
                .iter()
                .map(|m| index.nearest(&centers[m[0]]))
                .collect::<Result<Vec<_>>>()?;
            for j in 0..n {
                for &(rc, dc) in &nearest {
                    cost.push(scaled_h(index, j, rc, dc)?);
                }
            }
        }
    }

    let supplies = vec![1u64; n];
    let (flow, scaled_cost) = solve_scaled(&supplies, &caps, &cost)?;

    // copies of one sink are filled in order, u points each
    let mut filled = vec![0usize; groups];
    let mut labels = Vec::with_capacity(n);
    for row in &flow {
        let g = row
            .iter()
            .position(|&f| f == 1)
            .expect("every unit supply is routed to exactly one sink");
        let copy = filled[g] / u;
        filled[g] += 1;
        labels.push(sink_members[g][copy]);
    }

    let partition = Partition::new(labels, centers.to_vec());
    let cost_d = evaluate_cost_d(instance, &partition)?;
    let cost_h = match metric {
        Metric::D => None,
        Metric::H(_) => Some(unscale_cost(scaled_cost)),
    };
    Ok(Assignment {
        partition,
        cost: CostReport { cost_d, cost_h },
        scaled_cost,
    })
}

/// Region-level assignment under `h`: whole Voronoi regions are the sources.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionAssignment {
    /// `|S| x |S|` flow: `flow[j][i]` points of region `j` go to slot `i`.
    pub flow: FlowResult,
    pub cost_h: f64,
    pub cost_h_scaled: i64,
}

impl RegionAssignment {
    /// Expands the aggregated flow into a point-level partition. Within each
    /// region points are taken in index order; every point of a region costs
    /// the same against a given slot, so the order does not matter.
    ///
    /// Centers are laid out slot by slot: `composition[0]` copies of `s_0`,
    /// then `composition[1]` copies of `s_1`, and so on.
    pub fn to_partition(&self, index: &VoronoiIndex, composition: &[usize], u: usize) -> Partition {
        let mut centers = Vec::new();
        let mut first_copy = Vec::with_capacity(composition.len());
        for (i, &c) in composition.iter().enumerate() {
            first_copy.push(centers.len());
            centers.extend(std::iter::repeat_n(
                index.representing_points()[i].clone(),
                c,
            ));
        }
        let mut remaining = self.flow.flow.clone();
        let mut filled = vec![0usize; composition.len()];
        let labels = index
            .labels()
            .iter()
            .map(|&j| {
                let i = remaining[j]
                    .iter()
                    .position(|&f| f > 0)
                    .expect("flow covers every point of the region");
                remaining[j][i] -= 1;
                let label = first_copy[i] + filled[i] / u;
                filled[i] += 1;
                label
            })
            .collect();
        Partition::new(labels, centers)
    }
}

/// Precomputed scaled costs for repeated region-level solves against one index.
#[derive(Debug, Clone)]
pub struct RegionSolver<'a> {
    index: &'a VoronoiIndex,
    u: usize,
    scaled_between: Vec<i64>,
    scaled_voronoi: i64,
}

impl<'a> RegionSolver<'a> {
    pub fn new(index: &'a VoronoiIndex, u: usize) -> Result<Self> {
        let m = index.len();
        let mut scaled_between = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                scaled_between.push(scale_cost(index.between(a, b))?);
            }
        }
        let mut scaled_voronoi = 0i64;
        for j in 0..index.labels().len() {
            scaled_voronoi = scaled_voronoi
                .checked_add(scale_cost(index.dist_to_region(j))?)
                .ok_or(HckmError::CostOverflow)?;
        }
        Ok(RegionSolver {
            index,
            u,
            scaled_between,
            scaled_voronoi,
        })
    }

    pub fn index(&self) -> &VoronoiIndex {
        self.index
    }

    pub fn scaled_voronoi_cost(&self) -> i64 {
        self.scaled_voronoi
    }

    /// Scaled optimum of `cost_h` for the center multiset `composition`.
    /// Cheaper than [`RegionSolver::assign`]: only nonempty rows and columns
    /// enter the network and no flow table is returned.
    pub fn cost(&self, composition: &[usize]) -> Result<i64> {
        let m = self.index.len();
        self.check_len(composition)?;
        let rows: Vec<usize> = (0..m)
            .filter(|&j| self.index.per_region_count()[j] > 0)
            .collect();
        let cols: Vec<usize> = (0..m).filter(|&i| composition[i] > 0).collect();
        let supplies: Vec<u64> = rows
            .iter()
            .map(|&j| self.index.per_region_count()[j] as u64)
            .collect();
        let caps: Vec<u64> = cols
            .iter()
            .map(|&i| (composition[i] * self.u) as u64)
            .collect();
        let mut cost = Vec::with_capacity(rows.len() * cols.len());
        for &j in &rows {
            for &i in &cols {
                cost.push(self.scaled_between[j * m + i]);
            }
        }
        let (_, flow_cost) = solve_scaled(&supplies, &caps, &cost)?;
        Ok(self.scaled_voronoi + flow_cost)
    }

    pub fn assign(&self, composition: &[usize]) -> Result<RegionAssignment> {
        let m = self.index.len();
        self.check_len(composition)?;
        let supplies: Vec<u64> = self
            .index
            .per_region_count()
            .iter()
            .map(|&c| c as u64)
            .collect();
        let caps: Vec<u64> = composition.iter().map(|&c| (c * self.u) as u64).collect();
        let (flow, flow_scaled) = solve_scaled(&supplies, &caps, &self.scaled_between)?;
        let total_cost = flow
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row.iter().enumerate().map(move |(i, &f)| (j, i, f)))
            .map(|(j, i, f)| f as f64 * self.index.between(j, i))
            .sum();
        let cost_h_scaled = self.scaled_voronoi + flow_scaled;
        debug_assert_eq!(flow.len(), m);
        Ok(RegionAssignment {
            flow: FlowResult {
                flow,
                total_cost,
                scaled_cost: flow_scaled,
            },
            cost_h: unscale_cost(cost_h_scaled),
            cost_h_scaled,
        })
    }

    fn check_len(&self, composition: &[usize]) -> Result<()> {
        if composition.len() != self.index.len() {
            return Err(HckmError::InvalidParameter(format!(
                "composition has {} slots, representing set has {}",
                composition.len(),
                self.index.len()
            )));
        }
        Ok(())
    }
}

/// Region-level `h`-optimal assignment for the center multiset `composition`
/// over the representing set of `index`.
pub fn assign_regions_h(
    index: &VoronoiIndex,
    composition: &[usize],
    u: usize,
) -> Result<RegionAssignment> {
    RegionSolver::new(index, u)?.assign(composition)
}

/// Centers of a composition, slot by slot with multiplicity.
pub fn composition_centers(index: &VoronoiIndex, composition: &[usize]) -> Vec<Point> {
    composition
        .iter()
        .zip(index.representing_points())
        .flat_map(|(&c, s)| std::iter::repeat_n(s.clone(), c))
        .collect()
}
