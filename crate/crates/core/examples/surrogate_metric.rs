//! The surrogate distance routed through a representing set.

use hckm::metrics::{check_extended_triangle, check_four_point};
use hckm::{dist_d, dist_h, Instance, Point, VoronoiIndex};

fn main() -> hckm::Result<()> {
    let instance =
        Instance::from_coords(&[&[0.0, 0.0], &[1.0, 0.0], &[9.0, 0.0], &[10.0, 0.0]], 2, 2)?;
    let representing = vec![
        Point::from_slice(&[0.0, 0.0]),
        Point::from_slice(&[10.0, 0.0]),
    ];
    let index = VoronoiIndex::build(&instance, representing)?;
    println!(
        "regions {:?}, voronoi cost {}",
        index.labels(),
        index.voronoi_cost()
    );

    let pts = instance.points();
    for (a, b) in [(0, 1), (1, 2), (1, 1)] {
        let (x, y) = (&pts[a], &pts[b]);
        println!(
            "d({a},{b}) = {:>6.2}   h({a},{b}) = {:>6.2}",
            dist_d(x, y)?,
            dist_h(x, y, &index)?
        );
    }

    let line = |x: f64| Point::from_slice(&[x, 0.0]);
    println!(
        "relaxed triangle holds on a tight line: {}, four-point: {}",
        check_extended_triangle(&line(0.0), &line(2.0), &line(1.0)),
        check_four_point(&line(0.0), &line(1.0), &line(2.0), &line(3.0))
    );
    Ok(())
}
