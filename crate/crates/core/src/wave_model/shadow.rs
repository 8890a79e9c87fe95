use super::{BoundaryConditions, ObstacleSet, WaveField, WaveModel};
use crate::geometry::{unit_vector, walk_ray, ScenarioGrid};
use crate::Result;

pub const DEFAULT_DIFFUSION_PASSES: usize = 3;

/// Ray shadowing followed by `diffusion_passes` rounds of 3x3 averaging.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShadowDiffusionModel {
    pub diffusion_passes: usize,
}

impl Default for ShadowDiffusionModel {
    fn default() -> Self {
        Self {
            diffusion_passes: DEFAULT_DIFFUSION_PASSES,
        }
    }
}

impl WaveModel for ShadowDiffusionModel {
    fn simulate(
        &self,
        grid: &ScenarioGrid,
        obstacles: &ObstacleSet,
        boundary: &BoundaryConditions,
    ) -> Result<WaveField> {
        Ok(simulate(grid, obstacles, boundary, self.diffusion_passes))
    }
}

pub fn simulate(
    grid: &ScenarioGrid,
    obstacles: &ObstacleSet,
    boundary: &BoundaryConditions,
    diffusion_passes: usize,
) -> WaveField {
    let land = grid.land_mask();
    let mut transmission: Vec<f64> = land.iter().map(|&l| if l { 0.0 } else { 1.0 }).collect();
    for (cell, c) in obstacles.iter() {
        let idx = grid.index(cell);
        if !land[idx] {
            transmission[idx] = c;
        }
    }

    let (wx, wy) = unit_vector(boundary.wave_direction);
    let upwave = (-wx, -wy);
    let mut heights = vec![0.0; grid.len()];
    for cell in grid.cells() {
        let idx = grid.index(cell);
        if land[idx] {
            continue;
        }
        let mut factor = 1.0;
        walk_ray(grid, cell, upwave, |c| {
            factor *= transmission[grid.index(c)];
            factor > 0.0
        });
        heights[idx] = boundary.incident_height * factor;
    }

    let (n_cols, n_rows) = (grid.n_cols(), grid.n_rows());
    let mut next = heights.clone();
    for _ in 0..diffusion_passes {
        for row in 0..n_rows {
            for col in 0..n_cols {
                let idx = row * n_cols + col;
                if land[idx] {
                    continue;
                }
                let mut sum = 0.0;
                let mut count = 0u32;
                for r in row.saturating_sub(1)..=(row + 1).min(n_rows - 1) {
                    for c in col.saturating_sub(1)..=(col + 1).min(n_cols - 1) {
                        let j = r * n_cols + c;
                        if !land[j] {
                            sum += heights[j];
                            count += 1;
                        }
                    }
                }
                next[idx] = sum / f64::from(count);
            }
        }
        std::mem::swap(&mut heights, &mut next);
    }

    WaveField {
        n_cols,
        n_rows,
        heights,
    }
}
