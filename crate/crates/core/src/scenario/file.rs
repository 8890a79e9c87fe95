use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    compute_baseline, existing_obstacles, validate, validate_baseline, GeneLattice, InitRanges,
    MaterialTable, Scenario,
};
use crate::geometry::{AttachmentPoint, Breakwater, Point2, ScenarioGrid};
use crate::objectives::{Baseline, ScoreMapping};
use crate::wave_model::{parse_matrix, BoundaryConditions, WaveModel, DEFAULT_DIFFUSION_PASSES};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_cols: usize,
    pub n_rows: usize,
    #[serde(rename = "cell_size_m", default = "default_cell_size")]
    pub cell_size: f64,
    /// Inline depths, one array per grid row, metres; negative means land.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<Vec<Vec<f64>>>,
    /// Plain-text depth matrix relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_depth: Option<f64>,
}

fn default_cell_size() -> f64 {
    25.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveModelSpec {
    #[serde(default = "default_passes")]
    pub diffusion_passes: usize,
}

fn default_passes() -> usize {
    DEFAULT_DIFFUSION_PASSES
}

impl Default for WaveModelSpec {
    fn default() -> Self {
        Self {
            diffusion_passes: DEFAULT_DIFFUSION_PASSES,
        }
    }
}

/// On-disk scenario description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub grid: GridSpec,
    #[serde(default)]
    pub existing_structures: Vec<Breakwater>,
    pub attachments: Vec<AttachmentPoint>,
    pub control_points: Vec<Point2>,
    pub fairway: Vec<Point2>,
    pub boundary: BoundaryConditions,
    #[serde(default)]
    pub materials: MaterialTable,
    #[serde(default)]
    pub wave_model: WaveModelSpec,
    #[serde(rename = "sampling_step_cells", default = "default_step")]
    pub sampling_step: f64,
    #[serde(rename = "penalty_per_violation", default = "default_penalty")]
    pub penalty: f64,
    #[serde(default)]
    pub score_mapping: ScoreMapping,
    #[serde(default)]
    pub init: InitRanges,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<GeneLattice>,
}

fn default_step() -> f64 {
    crate::geometry::DEFAULT_SAMPLING_STEP
}

fn default_penalty() -> f64 {
    1e6
}

impl ScenarioFile {
    fn depth(&self, base_dir: Option<&Path>) -> Result<Vec<f64>> {
        let g = &self.grid;
        let sources = [
            g.depth.is_some(),
            g.depth_file.is_some(),
            g.uniform_depth.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(Error::Validation(vec![
                "grid needs exactly one of `depth`, `depth_file` or `uniform_depth`".into(),
            ]));
        }
        let rows = if let Some(d) = g.uniform_depth {
            return Ok(vec![d; g.n_cols * g.n_rows]);
        } else if let Some(rows) = &g.depth {
            rows.clone()
        } else {
            let name = g.depth_file.as_deref().expect("checked above");
            let dir = base_dir.ok_or_else(|| {
                Error::Config(format!("depth file {name} needs a scenario directory"))
            })?;
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            parse_matrix(&text, &path.display().to_string())?
        };
        if rows.len() != g.n_rows || rows.iter().any(|r| r.len() != g.n_cols) {
            return Err(Error::Validation(vec![format!(
                "depth matrix must have {} rows of {} values",
                g.n_rows, g.n_cols
            )]));
        }
        Ok(rows.into_iter().flatten().collect())
    }

    /// Validates the description and computes its baseline with `model`.
    pub fn build(self, base_dir: Option<&Path>, model: &dyn WaveModel) -> Result<Scenario> {
        let depth = self.depth(base_dir)?;
        let grid = ScenarioGrid::new(
            self.grid.n_cols,
            self.grid.n_rows,
            self.grid.cell_size,
            depth,
        )?;
        let existing = existing_obstacles(&grid, &self.existing_structures, &self.materials);
        let mut scenario = Scenario {
            name: self.name,
            description: self.description,
            grid,
            existing_structures: self.existing_structures,
            attachments: self.attachments,
            control_points: self.control_points,
            fairway: self.fairway,
            boundary: self.boundary,
            materials: self.materials,
            diffusion_passes: self.wave_model.diffusion_passes,
            sampling_step: self.sampling_step,
            penalty: self.penalty,
            score_mapping: self.score_mapping,
            init: self.init,
            lattice: self.lattice,
            baseline: Baseline {
                wave_heights: Vec::new(),
                nav_distance: 0.0,
                cost_reference: 0.0,
            },
            existing_obstacles: existing,
        };
        let problems = validate(&scenario);
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        scenario.baseline = compute_baseline(&scenario, model)?;
        validate_baseline(&scenario.baseline)?;
        Ok(scenario)
    }

    pub(super) fn from_scenario(s: &Scenario) -> Self {
        let grid = &s.grid;
        let rows = grid
            .depth()
            .chunks(grid.n_cols())
            .map(<[f64]>::to_vec)
            .collect();
        ScenarioFile {
            name: s.name.clone(),
            description: s.description.clone(),
            grid: GridSpec {
                n_cols: grid.n_cols(),
                n_rows: grid.n_rows(),
                cell_size: grid.cell_size(),
                depth: Some(rows),
                depth_file: None,
                uniform_depth: None,
            },
            existing_structures: s.existing_structures.clone(),
            attachments: s.attachments.clone(),
            control_points: s.control_points.clone(),
            fairway: s.fairway.clone(),
            boundary: s.boundary,
            materials: s.materials,
            wave_model: WaveModelSpec {
                diffusion_passes: s.diffusion_passes,
            },
            sampling_step: s.sampling_step,
            penalty: s.penalty,
            score_mapping: s.score_mapping,
            init: s.init,
            lattice: s.lattice.clone(),
        }
    }
}
