//! Breakwater layouts on a regular grid.
//!
//! Coordinates are continuous and measured in cells: the centre of cell
//! `(col, row)` sits at `(col, row)`, so a cell covers
//! `[col - 0.5, col + 0.5) x [row - 0.5, row + 0.5)`. Angles are degrees,
//! counter-clockwise from the +x (column) axis.

mod encoding;
mod predicates;
mod raster;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use encoding::{convert, decode, Encoding, Genotype};
pub use predicates::{
    count_fairway_intersections, count_land_coverage, count_self_intersections,
    min_distance_to_fairway, segments_cross, DEFAULT_SAMPLING_STEP,
};
pub use raster::{rasterize, rasterize_segment, supercover, walk_ray};

/// Depth written for land cells.
pub const LAND_SENTINEL: f64 = -999.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
}

impl Cell {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Regular bathymetry grid. Water cells carry a depth `>= 0`; land cells
/// carry [`LAND_SENTINEL`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioGrid {
    n_cols: usize,
    n_rows: usize,
    cell_size: f64,
    depth: Vec<f64>,
    land_mask: Vec<bool>,
}

impl ScenarioGrid {
    /// Builds a grid from row-major depths. Any negative depth is land and is
    /// normalised to [`LAND_SENTINEL`].
    pub fn new(n_cols: usize, n_rows: usize, cell_size: f64, depth: Vec<f64>) -> Result<Self> {
        let mut problems = Vec::new();
        if n_cols < 2 || n_rows < 2 {
            problems.push(format!("grid must be at least 2x2, got {n_cols}x{n_rows}"));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            problems.push(format!("cell size must be positive, got {cell_size}"));
        }
        if depth.len() != n_cols * n_rows {
            problems.push(format!(
                "depth has {} values, expected {} ({n_cols}x{n_rows})",
                depth.len(),
                n_cols * n_rows
            ));
        }
        if let Some(i) = depth.iter().position(|d| !d.is_finite()) {
            problems.push(format!("depth value {i} is not finite"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let land_mask: Vec<bool> = depth.iter().map(|&d| d < 0.0).collect();
        let depth = depth
            .into_iter()
            .map(|d| if d < 0.0 { LAND_SENTINEL } else { d })
            .collect();
        Ok(Self {
            n_cols,
            n_rows,
            cell_size,
            depth,
            land_mask,
        })
    }

    /// All-water grid of constant depth.
    pub fn open_water(n_cols: usize, n_rows: usize, cell_size: f64, depth: f64) -> Result<Self> {
        Self::new(n_cols, n_rows, cell_size, vec![depth; n_cols * n_rows])
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.n_cols * self.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn depth(&self) -> &[f64] {
        &self.depth
    }

    pub fn land_mask(&self) -> &[bool] {
        &self.land_mask
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.n_cols + cell.col
    }

    pub fn is_land(&self, cell: Cell) -> bool {
        self.land_mask[self.index(cell)]
    }

    /// Cell for signed integer indices, if inside the grid.
    pub fn cell_at(&self, col: i64, row: i64) -> Option<Cell> {
        (col >= 0 && row >= 0 && (col as usize) < self.n_cols && (row as usize) < self.n_rows)
            .then(|| Cell::new(col as usize, row as usize))
    }

    /// Cell whose square contains `p`.
    pub fn cell_containing(&self, p: Point2) -> Option<Cell> {
        self.cell_at((p.x + 0.5).floor() as i64, (p.y + 0.5).floor() as i64)
    }

    /// Whether `p` lies within the hull of cell centres, where bilinear
    /// sampling is defined.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0
            && p.y >= 0.0
            && p.x <= (self.n_cols - 1) as f64
            && p.y <= (self.n_rows - 1) as f64
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.n_rows).flat_map(move |row| (0..self.n_cols).map(move |col| Cell::new(col, row)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Material {
    SolidWall,
    Tetrapod,
}

/// Fixed anchor for one new breakwater.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttachmentPoint {
    pub position: Point2,
    /// Reference heading for the first angular gene.
    #[serde(rename = "base_angle_deg")]
    pub base_angle: f64,
    /// Number of segments in the breakwater grown from this point.
    pub segments: usize,
    pub material: Material,
}

/// One polyline; the first vertex is the attachment point for new
/// breakwaters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Breakwater {
    pub vertices: Vec<Point2>,
    pub material: Material,
}

impl Breakwater {
    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(b)).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub breakwaters: Vec<Breakwater>,
}

impl Layout {
    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.breakwaters.iter().flat_map(Breakwater::segments)
    }

    pub fn segment_count(&self) -> usize {
        self.breakwaters
            .iter()
            .map(|b| b.vertices.len().saturating_sub(1))
            .sum()
    }
}

/// Wraps an angle in degrees into `[-180, 180)`.
pub fn normalize_angle(deg: f64) -> f64 {
    if (-180.0..180.0).contains(&deg) {
        return deg;
    }
    let wrapped = (deg + 180.0).rem_euclid(360.0);
    // rem_euclid may round up to exactly 360 for tiny negative inputs
    if wrapped >= 360.0 {
        -180.0
    } else {
        wrapped - 180.0
    }
}

/// Unit vector for a heading in degrees.
///
/// Reduces to the first octant before calling `sin`/`cos`, so headings that
/// mirror each other across an axis (`a` and `180 - a`, `a` and `-a`) give
/// vectors that mirror bit for bit, and multiples of 90 degrees are exact.
pub fn unit_vector(deg: f64) -> (f64, f64) {
    let a = deg.rem_euclid(360.0);
    let a = if a >= 360.0 { 0.0 } else { a };
    let quadrant = (a / 90.0).floor() as u8 % 4;
    let r = a - 90.0 * f64::from(quadrant);
    let (c, s) = if r == 45.0 {
        (
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
        )
    } else if r < 45.0 {
        let rad = r.to_radians();
        (rad.cos(), rad.sin())
    } else {
        let rad = (90.0 - r).to_radians();
        (rad.sin(), rad.cos())
    };
    match quadrant {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

/// Heading of a vector in degrees, in `[-180, 180)`.
pub fn heading(dx: f64, dy: f64) -> f64 {
    normalize_angle(dy.atan2(dx).to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_wraps_into_half_open_range() {
        assert_eq!(normalize_angle(180.0), -180.0);
        assert_eq!(normalize_angle(-180.0), -180.0);
        assert_eq!(normalize_angle(190.0), -170.0);
        assert_eq!(normalize_angle(-540.0), -180.0);
        assert_eq!(normalize_angle(359.0), -1.0);
        let tiny = normalize_angle(-1e-18);
        assert!((-180.0..180.0).contains(&tiny));
    }

    #[test]
    fn unit_vector_is_exact_on_axes() {
        assert_eq!(unit_vector(0.0), (1.0, 0.0));
        assert_eq!(unit_vector(90.0), (-0.0, 1.0));
        assert_eq!(unit_vector(180.0), (-1.0, -0.0));
        assert_eq!(unit_vector(-90.0), (0.0, -1.0));
    }

    #[test]
    fn unit_vector_mirrors_bitwise() {
        for deg in -360..=360 {
            let a = f64::from(deg);
            let (x, y) = unit_vector(a);
            let (mx, my) = unit_vector(180.0 - a);
            assert_eq!((x, y), (-mx, my), "x-mirror at {a}");
            let (nx, ny) = unit_vector(-a);
            assert_eq!((x, y), (nx, -ny), "y-mirror at {a}");
            assert!(((x * x + y * y) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_rejects_bad_shapes_listing_every_problem() {
        let err = ScenarioGrid::new(1, 1, 0.0, vec![1.0; 3]).unwrap_err();
        match err {
            Error::Validation(v) => assert_eq!(v.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_depth_is_land() {
        let g = ScenarioGrid::new(2, 2, 25.0, vec![1.0, -3.0, 0.0, LAND_SENTINEL]).unwrap();
        assert_eq!(g.land_mask(), &[false, true, false, true]);
        assert_eq!(g.depth()[1], LAND_SENTINEL);
        assert_eq!(
            g.cell_containing(Point2::new(0.6, -0.4)),
            Some(Cell::new(1, 0))
        );
        assert_eq!(g.cell_containing(Point2::new(-0.6, 0.0)), None);
    }
}
