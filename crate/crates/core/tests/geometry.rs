use std::collections::{BTreeSet, VecDeque};

use breakwater_core::geometry::{
    convert, decode, min_distance_to_fairway, segments_cross, supercover, AttachmentPoint,
    Breakwater, Encoding, Genotype, Layout, Material, Point2,
};
use proptest::prelude::*;

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Crossing test by solving for the intersection parameters of both
/// segments. Exact for small integer coordinates.
fn crosses_by_parameters(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let (rx, ry) = (b.x - a.x, b.y - a.y);
    let (sx, sy) = (d.x - c.x, d.y - c.y);
    let denom = rx * sy - ry * sx;
    if denom == 0.0 {
        return false;
    }
    let (qx, qy) = (c.x - a.x, c.y - a.y);
    let t_num = qx * sy - qy * sx;
    let u_num = qx * ry - qy * rx;
    let inside = |num: f64| {
        if denom > 0.0 {
            0.0 < num && num < denom
        } else {
            denom < num && num < 0.0
        }
    };
    inside(t_num) && inside(u_num)
}

/// Parameter interval of `a + t (b - a)`, `t` in `[0, 1]`, inside the closed
/// box, by Liang-Barsky clipping.
fn clip(a: Point2, b: Point2, lo: (f64, f64), hi: (f64, f64)) -> Option<(f64, f64)> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (pk, qk) in [
        (-dx, a.x - lo.0),
        (dx, hi.0 - a.x),
        (-dy, a.y - lo.1),
        (dy, hi.1 - a.y),
    ] {
        if pk == 0.0 {
            if qk < 0.0 {
                return None;
            }
        } else {
            let r = qk / pk;
            if pk < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

fn square(i: i64, j: i64) -> ((f64, f64), (f64, f64)) {
    let (x, y) = (i as f64, j as f64);
    ((x - 0.5, y - 0.5), (x + 0.5, y + 0.5))
}

/// Cells whose closed square the segment touches.
fn touched(a: Point2, b: Point2) -> BTreeSet<(i64, i64)> {
    candidates(a, b)
        .filter(|&(i, j)| {
            let (lo, hi) = square(i, j);
            clip(a, b, lo, hi).is_some()
        })
        .collect()
}

/// Cells whose open interior the segment passes through.
fn entered(a: Point2, b: Point2) -> BTreeSet<(i64, i64)> {
    candidates(a, b)
        .filter(|&(i, j)| {
            let (lo, hi) = square(i, j);
            clip(a, b, lo, hi).is_some_and(|(t0, t1)| {
                let m = a.lerp(b, 0.5 * (t0 + t1));
                lo.0 < m.x && m.x < hi.0 && lo.1 < m.y && m.y < hi.1
            })
        })
        .collect()
}

fn candidates(a: Point2, b: Point2) -> impl Iterator<Item = (i64, i64)> {
    let x0 = a.x.min(b.x).floor() as i64 - 1;
    let x1 = a.x.max(b.x).ceil() as i64 + 1;
    let y0 = a.y.min(b.y).floor() as i64 - 1;
    let y1 = a.y.max(b.y).ceil() as i64 + 1;
    (x0..=x1).flat_map(move |i| (y0..=y1).map(move |j| (i, j)))
}

fn four_connected(cells: &BTreeSet<(i64, i64)>) -> bool {
    let Some(&start) = cells.iter().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((i, j)) = queue.pop_front() {
        for n in [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)] {
            if cells.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == cells.len()
}

fn segment_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if crosses_by_parameters(a, b, c, d) {
        return 0.0;
    }
    let to_segment = |q: Point2, u: Point2, v: Point2| {
        let (dx, dy) = (v.x - u.x, v.y - u.y);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((q.x - u.x) * dx + (q.y - u.y) * dy) / len2).clamp(0.0, 1.0)
        };
        q.distance(u.lerp(v, t))
    };
    to_segment(a, c, d)
        .min(to_segment(b, c, d))
        .min(to_segment(c, a, b))
        .min(to_segment(d, a, b))
}

fn int_point() -> impl Strategy<Value = Point2> {
    (-8i32..8, -8i32..8).prop_map(|(x, y)| p(f64::from(x), f64::from(y)))
}

fn float_point() -> impl Strategy<Value = Point2> {
    (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| p(x, y))
}

fn attachments() -> impl Strategy<Value = Vec<AttachmentPoint>> {
    prop::collection::vec((float_point(), -180.0..180.0f64, 1usize..4), 1..4).prop_map(|v| {
        v.into_iter()
            .map(|(position, base_angle, segments)| AttachmentPoint {
                position,
                base_angle,
                segments,
                material: Material::SolidWall,
            })
            .collect()
    })
}

fn max_vertex_error(a: &Layout, b: &Layout) -> f64 {
    a.breakwaters
        .iter()
        .zip(&b.breakwaters)
        .flat_map(|(x, y)| x.vertices.iter().zip(&y.vertices))
        .map(|(u, v)| (u.x - v.x).abs().max((u.y - v.y).abs()))
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn crossing_matches_parameter_oracle(a in int_point(), b in int_point(), c in int_point(), d in int_point()) {
        prop_assert_eq!(segments_cross(a, b, c, d), crosses_by_parameters(a, b, c, d));
        prop_assert_eq!(segments_cross(a, b, c, d), segments_cross(c, d, a, b));
    }

    #[test]
    fn generic_supercover_equals_touched_cells(a in float_point(), b in float_point()) {
        prop_assume!(a != b);
        let ours: BTreeSet<_> = supercover(a, b).into_iter().collect();
        prop_assert_eq!(ours, touched(a, b));
    }

    #[test]
    fn lattice_supercover_is_sandwiched(
        a in (-12i32..12, -12i32..12),
        b in (-12i32..12, -12i32..12),
    ) {
        // endpoints on cell centres and corners exercise every degenerate case
        let a = p(f64::from(a.0) / 2.0, f64::from(a.1) / 2.0);
        let b = p(f64::from(b.0) / 2.0, f64::from(b.1) / 2.0);
        prop_assume!(a != b);
        let ours: BTreeSet<_> = supercover(a, b).into_iter().collect();
        prop_assert!(entered(a, b).is_subset(&ours));
        prop_assert!(ours.is_subset(&touched(a, b)));
        prop_assert!(four_connected(&ours));
    }

    #[test]
    fn encodings_round_trip(
        atts in attachments(),
        genes in prop::collection::vec((0.0..30.0f64, -400.0..400.0f64, prop::bool::weighted(0.15)), 12),
    ) {
        let n: usize = atts.iter().map(|a| a.segments).sum();
        let blocks: Vec<[f64; 2]> = genes[..n]
            .iter()
            .map(|&(l, a, zero)| [if zero { 0.0 } else { l }, a])
            .collect();
        let angular = Genotype::new(Encoding::Angular, blocks);
        let cartesian = convert(&angular, Encoding::Cartesian, &atts).unwrap();
        let back = convert(&cartesian, Encoding::Angular, &atts).unwrap();
        let original = decode(&angular, &atts).unwrap();
        prop_assert!(max_vertex_error(&original, &decode(&cartesian, &atts).unwrap()) <= 1e-9);
        prop_assert!(max_vertex_error(&original, &decode(&back, &atts).unwrap()) <= 1e-9);
        let again = convert(&back, Encoding::Cartesian, &atts).unwrap();
        prop_assert!(max_vertex_error(&original, &decode(&again, &atts).unwrap()) <= 1e-9);
    }

    #[test]
    fn sampled_fairway_distance_brackets_exact_distance(
        bw in prop::collection::vec(float_point(), 1..4),
        fairway in prop::collection::vec(float_point(), 2..4),
        step in prop::sample::select(vec![0.1, 0.25, 0.5]),
    ) {
        let layout = Layout {
            breakwaters: vec![Breakwater { vertices: bw.clone(), material: Material::Tetrapod }],
        };
        let sampled = min_distance_to_fairway(&layout, &fairway, step, 1.0);
        let bw_segments: Vec<(Point2, Point2)> = if bw.len() == 1 {
            vec![(bw[0], bw[0])]
        } else {
            bw.windows(2).map(|w| (w[0], w[1])).collect()
        };
        let exact = bw_segments
            .iter()
            .flat_map(|&(a, b)| fairway.windows(2).map(move |f| segment_distance(a, b, f[0], f[1])))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(sampled >= exact - 1e-9, "sampled {} exact {}", sampled, exact);
        prop_assert!(sampled <= exact + step + 1e-9, "sampled {} exact {}", sampled, exact);
    }
}

#[test]
fn fairway_distance_scales_with_cell_size() {
    let layout = Layout {
        breakwaters: vec![Breakwater {
            vertices: vec![p(0.0, 0.0), p(0.0, 4.0)],
            material: Material::SolidWall,
        }],
    };
    let fairway = [p(3.0, -5.0), p(3.0, 5.0)];
    assert_eq!(min_distance_to_fairway(&layout, &fairway, 0.25, 1.0), 3.0);
    assert_eq!(min_distance_to_fairway(&layout, &fairway, 0.25, 25.0), 75.0);
}
