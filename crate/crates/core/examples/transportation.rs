//! Capacitated assignment as a transportation problem.

use hckm::transport::{assign_points, Metric};
use hckm::{solve, AssignmentProblem, Instance, Point};

fn main() -> hckm::Result<()> {
    // three sources with supplies 2, 1, 1 and two sinks holding 2 each
    let problem = AssignmentProblem::new(
        vec![2, 1, 1],
        vec![2, 2],
        vec![vec![0.0, 4.0], vec![1.0, 1.0], vec![9.0, 0.0]],
    )?;
    let flow = solve(&problem)?;
    println!("flow {:?}, total cost {}", flow.flow, flow.total_cost);

    // points on a line; with capacity 1 the three points no longer fit
    let instance = Instance::from_coords(&[&[0.0], &[1.0], &[5.0]], 2, 2)?;
    let centers = vec![Point::from_slice(&[0.0]), Point::from_slice(&[4.0])];
    let a = assign_points(&instance, &centers, 2, Metric::D)?;
    println!("labels {:?}, cost_d {}", a.partition.labels, a.cost.cost_d);
    let tight = assign_points(&instance, &centers, 1, Metric::D);
    println!(
        "capacity 1 with 3 points: {}",
        tight
            .map(|_| "ok".to_string())
            .unwrap_or_else(|e| e.to_string())
    );
    Ok(())
}
