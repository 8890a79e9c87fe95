use log::warn;

use super::pareto::{dominates, nondominated_unique};

/// Hypervolume together with the number of points that were ignored because
/// they do not dominate the reference point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckedHypervolume {
    pub value: f64,
    pub excluded: usize,
}

/// Lebesgue measure of the union of boxes `[p, reference]`. Points that do
/// not dominate the reference contribute nothing and are reported with a
/// warning.
pub fn hypervolume<P: AsRef<[f64]>>(points: &[P], reference: &[f64]) -> f64 {
    let checked = hypervolume_checked(points, reference);
    if checked.excluded > 0 {
        warn!(
            "{} point(s) do not dominate the hypervolume reference point and were ignored",
            checked.excluded
        );
    }
    checked.value
}

/// [`hypervolume`] without logging.
pub fn hypervolume_checked<P: AsRef<[f64]>>(points: &[P], reference: &[f64]) -> CheckedHypervolume {
    let mut excluded = 0;
    let mut inside = Vec::with_capacity(points.len());
    for p in points {
        let p = p.as_ref();
        assert_eq!(
            p.len(),
            reference.len(),
            "point and reference dimensions differ"
        );
        if p.iter().zip(reference).all(|(x, r)| x < r) {
            inside.push(p.to_vec());
        } else if !dominates(p, reference) {
            excluded += 1;
        }
    }
    let front = nondominated_unique(&inside);
    CheckedHypervolume {
        value: volume(front, reference),
        excluded,
    }
}

/// Exact volume of a nondominated, duplicate-free set strictly inside the
/// reference box.
fn volume(mut points: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    match (points.len(), r.len()) {
        (0, _) => 0.0,
        (1, _) => box_volume(&points[0], r),
        (_, 1) => r[0] - points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        (_, 2) => sweep_2d(&mut points, r),
        _ => {
            // exclusive contributions: each point minus what the later
            // points already cover inside its own box
            points.sort_by(|a, b| b[0].total_cmp(&a[0]));
            let mut total = 0.0;
            for i in 0..points.len() {
                let p = &points[i];
                let limited: Vec<Vec<f64>> = points[i + 1..]
                    .iter()
                    .map(|q| q.iter().zip(p).map(|(a, b)| a.max(*b)).collect())
                    .collect();
                let limited = nondominated_unique(&limited);
                total += box_volume(p, r) - volume(limited, r);
            }
            total
        }
    }
}

fn box_volume(p: &[f64], r: &[f64]) -> f64 {
    p.iter().zip(r).map(|(x, r)| r - x).product()
}

fn sweep_2d(points: &mut [Vec<f64>], r: &[f64]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = r[1];
    for p in points.iter() {
        if p[1] < ceiling {
            area += (r[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}
