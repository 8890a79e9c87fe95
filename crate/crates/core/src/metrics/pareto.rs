/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

/// Indices of the points no other point dominates, in input order.
/// Duplicates are all kept.
pub fn nondominated_indices<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| dominates(q.as_ref(), points[i].as_ref()))
        })
        .collect()
}

pub fn nondominated<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<f64>> {
    nondominated_indices(points)
        .into_iter()
        .map(|i| points[i].as_ref().to_vec())
        .collect()
}

/// Nondominated points with exact duplicates removed, sorted.
pub fn nondominated_unique<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<f64>> {
    let mut front = nondominated(points);
    front.sort_by(|a, b| cmp_lex(a, b));
    front.dedup();
    front
}

pub(crate) fn cmp_lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}
