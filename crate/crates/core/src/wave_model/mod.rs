//! Significant wave height over the scenario grid.
//!
//! [`WaveModel`] is the seam between the optimiser and the physics. The
//! built-in [`ShadowDiffusionModel`] traces a straight ray from every water
//! cell back towards the incoming waves, attenuating by the transmission
//! coefficient of each obstacle cell crossed, then smooths the field with a
//! few 3x3 averaging passes over water cells so energy leaks into the
//! geometric shadows. [`FileExchangeModel`] hands the same inputs to an
//! external program through plain-text files.

mod exchange;
mod shadow;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geometry::{Cell, Point2, ScenarioGrid, LAND_SENTINEL};
use crate::{Error, Result};

pub use exchange::FileExchangeModel;
pub use shadow::{simulate, ShadowDiffusionModel, DEFAULT_DIFFUSION_PASSES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    /// Offshore significant wave height, metres.
    #[serde(rename = "incident_height_m")]
    pub incident_height: f64,
    /// Heading the waves travel toward, degrees.
    #[serde(rename = "wave_direction_deg")]
    pub wave_direction: f64,
}

/// Obstacle cells with transmission coefficients in `[0, 1]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObstacleSet {
    cells: BTreeMap<Cell, f64>,
}

impl ObstacleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a cell; the coefficient is clamped to `[0, 1]` and a repeated
    /// cell keeps the smaller coefficient.
    pub fn insert(&mut self, cell: Cell, coefficient: f64) {
        let c = if coefficient.is_nan() {
            0.0
        } else {
            coefficient.clamp(0.0, 1.0)
        };
        self.cells
            .entry(cell)
            .and_modify(|v| *v = v.min(c))
            .or_insert(c);
    }

    pub fn extend(&mut self, cells: impl IntoIterator<Item = Cell>, coefficient: f64) {
        for cell in cells {
            self.insert(cell, coefficient);
        }
    }

    pub fn merged(&self, other: &ObstacleSet) -> ObstacleSet {
        let mut out = self.clone();
        for (&cell, &c) in &other.cells {
            out.insert(cell, c);
        }
        out
    }

    pub fn get(&self, cell: Cell) -> Option<f64> {
        self.cells.get(&cell).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, f64)> + '_ {
        self.cells.iter().map(|(&c, &v)| (c, v))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

impl FromIterator<(Cell, f64)> for ObstacleSet {
    fn from_iter<T: IntoIterator<Item = (Cell, f64)>>(iter: T) -> Self {
        let mut set = ObstacleSet::new();
        for (cell, c) in iter {
            set.insert(cell, c);
        }
        set
    }
}

/// Row-major significant wave heights in metres; land cells hold 0.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveField {
    n_cols: usize,
    n_rows: usize,
    heights: Vec<f64>,
}

impl WaveField {
    pub fn new(n_cols: usize, n_rows: usize, heights: Vec<f64>) -> Result<Self> {
        if heights.len() != n_cols * n_rows {
            return Err(Error::WaveModel(format!(
                "field has {} values, expected {n_cols}x{n_rows}",
                heights.len()
            )));
        }
        Ok(Self {
            n_cols,
            n_rows,
            heights,
        })
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn at(&self, cell: Cell) -> f64 {
        self.heights[cell.row * self.n_cols + cell.col]
    }

    pub fn mean(&self) -> f64 {
        self.heights.iter().sum::<f64>() / self.heights.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.heights.iter().copied().fold(0.0, f64::max)
    }

    /// Bilinear interpolation between the four surrounding cell centres.
    pub fn sample_at(&self, p: Point2) -> f64 {
        let clamp_base = |v: f64, n: usize| -> (usize, f64) {
            let base = (v.floor().max(0.0) as usize).min(n - 2);
            (base, v - base as f64)
        };
        let (c0, fx) = clamp_base(p.x, self.n_cols);
        let (r0, fy) = clamp_base(p.y, self.n_rows);
        let h = |c: usize, r: usize| self.heights[r * self.n_cols + c];
        let bottom = h(c0, r0) * (1.0 - fx) + h(c0 + 1, r0) * fx;
        let top = h(c0, r0 + 1) * (1.0 - fx) + h(c0 + 1, r0 + 1) * fx;
        bottom * (1.0 - fy) + top * fy
    }

    /// Plain-text matrix, one grid row per line, space separated, land cells
    /// written as [`LAND_SENTINEL`]. Values round-trip exactly.
    pub fn to_matrix_text(&self, grid: &ScenarioGrid) -> String {
        let mut out = String::new();
        for row in 0..self.n_rows {
            for col in 0..self.n_cols {
                if col > 0 {
                    out.push(' ');
                }
                let cell = Cell::new(col, row);
                let v = if grid.is_land(cell) {
                    LAND_SENTINEL
                } else {
                    self.at(cell)
                };
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses a matrix written by [`WaveField::to_matrix_text`] (or by an
    /// external model). Negative values are read as land and stored as 0.
    pub fn from_matrix_text(text: &str, n_cols: usize, n_rows: usize) -> Result<Self> {
        let rows = parse_matrix(text, "height matrix")?;
        if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::parse(
                "height matrix",
                format!("expected {n_rows} rows of {n_cols} values"),
            ));
        }
        let heights = rows
            .into_iter()
            .flatten()
            .map(|v| if v < 0.0 { 0.0 } else { v })
            .collect();
        WaveField::new(n_cols, n_rows, heights)
    }
}

/// Whitespace-separated numeric matrix; blank lines are skipped.
pub(crate) fn parse_matrix(text: &str, context: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| Error::parse(format!("{context} line {}", i + 1), e))
                })
                .collect()
        })
        .collect()
}

/// Heights at control points, in control-point order.
pub fn sample(field: &WaveField, control_points: &[Point2]) -> Vec<f64> {
    control_points.iter().map(|&p| field.sample_at(p)).collect()
}

/// Anything that can turn an obstacle set into a wave field. Implementations
/// must be deterministic: identical inputs give identical fields.
pub trait WaveModel: Send + Sync {
    fn simulate(
        &self,
        grid: &ScenarioGrid,
        obstacles: &ObstacleSet,
        boundary: &BoundaryConditions,
    ) -> Result<WaveField>;
}
