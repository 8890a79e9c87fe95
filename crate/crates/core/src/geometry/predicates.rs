use super::{rasterize, Breakwater, Layout, Point2, ScenarioGrid};

/// Default spacing, in cells, of the points sampled along breakwaters and
/// the fairway for distance queries.
pub const DEFAULT_SAMPLING_STEP: f64 = 0.25;

fn orientation(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Transversal crossing test: each segment's endpoints lie strictly on
/// opposite sides of the other. Touching, shared endpoints, collinear overlap
/// and zero-length segments never count.
pub fn segments_cross(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Crossings among all pairs of new segments, plus crossings between new
/// segments and existing structures.
pub fn count_self_intersections(layout: &Layout, existing: &[Breakwater]) -> usize {
    let segments: Vec<_> = layout.segments().collect();
    let mut count = 0;
    for (i, &(a, b)) in segments.iter().enumerate() {
        for &(c, d) in &segments[i + 1..] {
            count += usize::from(segments_cross(a, b, c, d));
        }
        for (c, d) in existing.iter().flat_map(Breakwater::segments) {
            count += usize::from(segments_cross(a, b, c, d));
        }
    }
    count
}

pub fn count_fairway_intersections(layout: &Layout, fairway: &[Point2]) -> usize {
    layout
        .segments()
        .map(|(a, b)| {
            fairway
                .windows(2)
                .filter(|f| segments_cross(a, b, f[0], f[1]))
                .count()
        })
        .sum()
}

/// Distinct rasterised layout cells that fall on land.
pub fn count_land_coverage(layout: &Layout, grid: &ScenarioGrid) -> usize {
    rasterize(layout, grid)
        .into_iter()
        .filter(|&c| grid.is_land(c))
        .count()
}

/// Points spaced at most `step` apart along a polyline, vertices included.
fn sample_polyline(vertices: &[Point2], step: f64, out: &mut Vec<Point2>) {
    if let Some(&first) = vertices.first() {
        out.push(first);
    }
    for w in vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = (a.distance(b) / step).ceil() as usize;
        out.extend((1..=n).map(|k| a.lerp(b, k as f64 / n as f64)));
    }
}

/// Minimum distance in metres between points sampled along the breakwaters
/// and points sampled along the fairway centre line.
///
/// A layout of zero-length segments samples only its attachment points, so
/// the base configuration measures from those.
pub fn min_distance_to_fairway(
    layout: &Layout,
    fairway: &[Point2],
    sampling_step: f64,
    cell_size: f64,
) -> f64 {
    let mut bw_points = Vec::new();
    for bw in &layout.breakwaters {
        sample_polyline(&bw.vertices, sampling_step, &mut bw_points);
    }
    let mut fw_points = Vec::new();
    sample_polyline(fairway, sampling_step, &mut fw_points);

    let mut best = f64::INFINITY;
    for p in &bw_points {
        for q in &fw_points {
            let d2 = (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
            if d2 < best {
                best = d2;
            }
        }
    }
    best.sqrt() * cell_size
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Material;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn layout(polylines: &[&[Point2]]) -> Layout {
        Layout {
            breakwaters: polylines
                .iter()
                .map(|v| Breakwater {
                    vertices: v.to_vec(),
                    material: Material::SolidWall,
                })
                .collect(),
        }
    }

    #[test]
    fn parallel_segments_do_not_cross() {
        let l = layout(&[&[p(0.0, 0.0), p(5.0, 0.0)], &[p(0.0, 1.0), p(5.0, 1.0)]]);
        assert_eq!(count_self_intersections(&l, &[]), 0);
    }

    #[test]
    fn x_crossing_counts_once() {
        let l = layout(&[&[p(0.0, 0.0), p(2.0, 2.0)], &[p(0.0, 2.0), p(2.0, 0.0)]]);
        assert_eq!(count_self_intersections(&l, &[]), 1);
    }

    #[test]
    fn chain_joints_and_touching_are_not_crossings() {
        let l = layout(&[&[p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 0.0)]]);
        assert_eq!(count_self_intersections(&l, &[]), 0);
        // T-junction touching an existing structure
        let existing = vec![Breakwater {
            vertices: vec![p(-1.0, 3.0), p(5.0, 3.0)],
            material: Material::Tetrapod,
        }];
        let l = layout(&[&[p(1.0, 0.0), p(1.0, 3.0)]]);
        assert_eq!(count_self_intersections(&l, &existing), 0);
        let l = layout(&[&[p(1.0, 0.0), p(1.0, 4.0)]]);
        assert_eq!(count_self_intersections(&l, &existing), 1);
    }

    #[test]
    fn fairway_crossings() {
        let fairway = [p(5.0, -10.0), p(5.0, 10.0)];
        let disjoint = layout(&[&[p(0.0, 0.0), p(4.0, 0.0)]]);
        assert_eq!(count_fairway_intersections(&disjoint, &fairway), 0);
        let crossing = layout(&[&[p(0.0, 0.0), p(8.0, 1.0)]]);
        assert_eq!(count_fairway_intersections(&crossing, &fairway), 1);
    }

    #[test]
    fn parallel_distance_is_exact() {
        let l = layout(&[&[p(0.0, 0.0), p(0.0, 10.0)]]);
        let d = min_distance_to_fairway(&l, &[p(5.0, 0.0), p(5.0, 10.0)], 0.25, 25.0);
        assert_eq!(d, 125.0);
    }

    #[test]
    fn touching_fairway_is_zero_distance() {
        let l = layout(&[&[p(0.0, 0.0), p(3.0, 4.0)]]);
        let d = min_distance_to_fairway(&l, &[p(3.0, 4.0), p(9.0, 4.0)], 0.25, 25.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn empty_layout_measures_from_attachments() {
        let l = layout(&[&[p(0.0, 0.0), p(0.0, 0.0)], &[p(10.0, 0.0), p(10.0, 0.0)]]);
        let d = min_distance_to_fairway(&l, &[p(0.0, 7.0), p(20.0, 7.0)], 0.25, 2.0);
        assert!((d - 14.0).abs() < 1e-12);
    }

    #[test]
    fn land_coverage_counts_inland_cells() {
        // columns 5.. are land
        let depth: Vec<f64> = (0..10 * 4)
            .map(|i| if i % 10 >= 5 { -1.0 } else { 5.0 })
            .collect();
        let grid = ScenarioGrid::new(10, 4, 25.0, depth).unwrap();
        let l = layout(&[&[p(0.0, 2.0), p(7.0, 2.0)]]);
        assert_eq!(count_land_coverage(&l, &grid), 3);
        let water = layout(&[&[p(0.0, 2.0), p(4.0, 2.0)]]);
        assert_eq!(count_land_coverage(&water, &grid), 0);
        let empty = layout(&[&[p(1.0, 1.0), p(1.0, 1.0)]]);
        assert_eq!(count_land_coverage(&empty, &grid), 0);
    }
}
