//! File-exchange adapter for external wave models.
//!
//! For each simulation the adapter writes into `work_dir`:
//!
//! * `grid.txt`: first line `n_cols n_rows cell_size_m`, then one line per
//!   grid row of space-separated depths (land as `-999`);
//! * `obstacles.txt`: one line per obstacle cell, `col row coefficient`;
//! * `boundary.txt`: `incident_height_m wave_direction_deg` on one line.
//!
//! It then runs `command` with `work_dir` as its working directory and reads
//! `heights.txt`: one line per grid row, space-separated significant wave
//! heights in metres. Negative values are taken as land.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use super::{BoundaryConditions, ObstacleSet, WaveField, WaveModel};
use crate::geometry::ScenarioGrid;
use crate::{Error, Result};

pub const GRID_FILE: &str = "grid.txt";
pub const OBSTACLES_FILE: &str = "obstacles.txt";
pub const BOUNDARY_FILE: &str = "boundary.txt";
pub const HEIGHTS_FILE: &str = "heights.txt";

#[derive(Clone, Debug)]
pub struct FileExchangeModel {
    pub work_dir: PathBuf,
    /// Program and arguments.
    pub command: Vec<String>,
}

impl FileExchangeModel {
    pub fn new(work_dir: impl Into<PathBuf>, command: Vec<String>) -> Self {
        Self {
            work_dir: work_dir.into(),
            command,
        }
    }

    pub fn write_inputs(
        dir: &Path,
        grid: &ScenarioGrid,
        obstacles: &ObstacleSet,
        boundary: &BoundaryConditions,
    ) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        let mut text = format!("{} {} {}\n", grid.n_cols(), grid.n_rows(), grid.cell_size());
        for row in grid.depth().chunks(grid.n_cols()) {
            let line: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            text.push_str(&line.join(" "));
            text.push('\n');
        }
        write(dir.join(GRID_FILE), &text)?;

        let mut text = String::new();
        for (cell, c) in obstacles.iter() {
            let _ = writeln!(text, "{} {} {c}", cell.col, cell.row);
        }
        write(dir.join(OBSTACLES_FILE), &text)?;

        write(
            dir.join(BOUNDARY_FILE),
            &format!("{} {}\n", boundary.incident_height, boundary.wave_direction),
        )
    }

    pub fn read_heights(dir: &Path, grid: &ScenarioGrid) -> Result<WaveField> {
        let path = dir.join(HEIGHTS_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        WaveField::from_matrix_text(&text, grid.n_cols(), grid.n_rows())
    }
}

fn write(path: PathBuf, text: &str) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(path, e))
}

impl WaveModel for FileExchangeModel {
    fn simulate(
        &self,
        grid: &ScenarioGrid,
        obstacles: &ObstacleSet,
        boundary: &BoundaryConditions,
    ) -> Result<WaveField> {
        let (program, args) = self
            .command
            .split_first()
            .ok_or_else(|| Error::WaveModel("empty external command".into()))?;
        Self::write_inputs(&self.work_dir, grid, obstacles, boundary)?;
        let heights = self.work_dir.join(HEIGHTS_FILE);
        if heights.exists() {
            std::fs::remove_file(&heights).map_err(|e| Error::io(&heights, e))?;
        }
        let status = Command::new(program)
            .args(args)
            .current_dir(&self.work_dir)
            .status()
            .map_err(|e| Error::WaveModel(format!("cannot run {program}: {e}")))?;
        if !status.success() {
            return Err(Error::WaveModel(format!("{program} exited with {status}")));
        }
        let mut field = Self::read_heights(&self.work_dir, grid)?;
        // land is zero regardless of what the external model wrote there
        let land = grid.land_mask();
        let heights: Vec<f64> = field
            .heights()
            .iter()
            .zip(land)
            .map(|(&h, &l)| if l { 0.0 } else { h })
            .collect();
        field = WaveField::new(grid.n_cols(), grid.n_rows(), heights)?;
        Ok(field)
    }
}
