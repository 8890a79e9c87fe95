//! Supercover grid traversal.
//!
//! Works in "corner space" (`u = x + 0.5`, `v = y + 0.5`) where cell `(i, j)`
//! is the unit square `[i, i+1] x [j, j+1]`. A segment covers every cell whose
//! interior it passes through, both cells on either side when it runs along a
//! grid line, all four cells around a grid corner it passes through, and every
//! cell whose closed square contains an endpoint. The result is 4-connected,
//! so a ray traced the same way cannot slip diagonally through a rasterised
//! wall.

use super::{Cell, Layout, Point2, ScenarioGrid};

/// Steps through the cells met by `start + t * delta` for `t` in
/// `[0, t_end)`. `visit(col, row, side)` is called for every cell in travel
/// order; `side` marks the two extra cells added at an exact corner crossing.
/// Returning `false` from a non-side visit stops the walk.
fn walk<F>(u0: f64, v0: f64, du: f64, dv: f64, t_end: f64, mut visit: F)
where
    F: FnMut(i64, i64, bool) -> bool,
{
    let mut cx = u0.floor() as i64;
    let mut cy = v0.floor() as i64;
    if !visit(cx, cy, false) {
        return;
    }
    let step_x: i64 = if du > 0.0 {
        1
    } else if du < 0.0 {
        -1
    } else {
        0
    };
    let step_y: i64 = if dv > 0.0 {
        1
    } else if dv < 0.0 {
        -1
    } else {
        0
    };
    // Parameter at which the walk crosses the next vertical / horizontal line.
    let next_t = |c: i64, step: i64, origin: f64, d: f64| -> f64 {
        match step {
            1 => ((c + 1) as f64 - origin) / d,
            -1 => (c as f64 - origin) / d,
            _ => f64::INFINITY,
        }
    };
    loop {
        let tx = next_t(cx, step_x, u0, du);
        let ty = next_t(cy, step_y, v0, dv);
        let t = tx.min(ty);
        if !(t < t_end) {
            return;
        }
        if tx < ty {
            cx += step_x;
        } else if ty < tx {
            cy += step_y;
        } else {
            visit(cx + step_x, cy, true);
            visit(cx, cy + step_y, true);
            cx += step_x;
            cy += step_y;
        }
        if !visit(cx, cy, false) {
            return;
        }
    }
}

/// Unclipped supercover of a segment, in travel order without duplicates.
/// A zero-length segment covers nothing.
pub fn supercover(a: Point2, b: Point2) -> Vec<(i64, i64)> {
    if a == b {
        return Vec::new();
    }
    let (u0, v0) = (a.x + 0.5, a.y + 0.5);
    let (u1, v1) = (b.x + 0.5, b.y + 0.5);
    let (du, dv) = (u1 - u0, v1 - v0);
    let mut cells = Vec::new();
    walk(u0, v0, du, dv, 1.0, |i, j, _| {
        push_new(&mut cells, (i, j));
        true
    });

    // A segment lying exactly on a grid line touches the cells on both sides.
    let on_vertical_line = du == 0.0 && u0 == u0.floor();
    let on_horizontal_line = dv == 0.0 && v0 == v0.floor();
    if on_vertical_line || on_horizontal_line {
        let extra: Vec<_> = cells
            .iter()
            .map(|&(i, j)| {
                if on_vertical_line {
                    (i - 1, j)
                } else {
                    (i, j - 1)
                }
            })
            .collect();
        for c in extra {
            push_new(&mut cells, c);
        }
    }
    for (u, v) in [(u0, v0), (u1, v1)] {
        for i in touching(u) {
            for j in touching(v) {
                push_new(&mut cells, (i, j));
            }
        }
    }
    cells
}

/// Cells along one axis whose closed extent contains coordinate `u`.
fn touching(u: f64) -> std::ops::RangeInclusive<i64> {
    let f = u.floor() as i64;
    if u == u.floor() {
        f - 1..=f
    } else {
        f..=f
    }
}

fn push_new(cells: &mut Vec<(i64, i64)>, c: (i64, i64)) {
    if !cells.contains(&c) {
        cells.push(c);
    }
}

/// Supercover of one segment clipped to the grid.
pub fn rasterize_segment(grid: &ScenarioGrid, a: Point2, b: Point2) -> Vec<Cell> {
    supercover(a, b)
        .into_iter()
        .filter_map(|(i, j)| grid.cell_at(i, j))
        .collect()
}

/// Distinct in-grid cells covered by the layout, in segment order.
pub fn rasterize(layout: &Layout, grid: &ScenarioGrid) -> Vec<Cell> {
    let mut seen = vec![false; grid.len()];
    let mut out = Vec::new();
    for (a, b) in layout.segments() {
        for cell in rasterize_segment(grid, a, b) {
            let idx = grid.index(cell);
            if !seen[idx] {
                seen[idx] = true;
                out.push(cell);
            }
        }
    }
    out
}

/// Walks from the centre of `start` along `direction` until the ray leaves
/// the grid, calling `visit` on every in-grid cell (the start cell first).
/// The walk stops early when `visit` returns `false`.
pub fn walk_ray<F>(grid: &ScenarioGrid, start: Cell, direction: (f64, f64), mut visit: F)
where
    F: FnMut(Cell) -> bool,
{
    let u0 = start.col as f64 + 0.5;
    let v0 = start.row as f64 + 0.5;
    walk(
        u0,
        v0,
        direction.0,
        direction.1,
        f64::INFINITY,
        |i, j, side| match grid.cell_at(i, j) {
            Some(cell) => visit(cell) || side,
            None => side,
        },
    );
}
