//! Harbour scenarios: grid, existing structures, attachment points, control
//! points, fairway, storm conditions and search ranges.
//!
//! Scenarios are JSON. The depth grid is either inline (`grid.depth`, one
//! array per row), a plain-text matrix referenced by `grid.depth_file`
//! (resolved against the scenario file's directory), or a constant
//! `grid.uniform_depth`. Loading validates everything, reports every
//! problem at once, and computes the base-configuration objectives with one
//! wave-model run.

mod file;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{
    min_distance_to_fairway, rasterize, AttachmentPoint, Breakwater, Cell, Genotype, Layout,
    Material, Point2, ScenarioGrid,
};
use crate::objectives::{Baseline, ScoreMapping};
use crate::wave_model::{sample, BoundaryConditions, ObstacleSet, ShadowDiffusionModel, WaveModel};
use crate::{Error, Result};

pub use file::{GridSpec, ScenarioFile};

const DEMO_HARBOUR_JSON: &str = include_str!("../../scenarios/demo_harbour.json");
const DEMO_HARBOUR_DEPTH: &str = include_str!("../../scenarios/demo_harbour_depth.txt");

/// Transmission coefficient per breakwater material.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialTable {
    pub solid_wall: f64,
    pub tetrapod: f64,
}

impl Default for MaterialTable {
    fn default() -> Self {
        Self {
            solid_wall: 0.1,
            tetrapod: 0.35,
        }
    }
}

impl MaterialTable {
    pub fn coefficient(&self, material: Material) -> f64 {
        match material {
            Material::SolidWall => self.solid_wall,
            Material::Tetrapod => self.tetrapod,
        }
    }
}

/// Sampling ranges for initial populations and bounds kept by variation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitRanges {
    /// Upper bound for angular segment lengths; Cartesian endpoints are drawn
    /// within this many cells of their attachment point.
    #[serde(rename = "max_length_cells")]
    pub max_length: f64,
    /// Initial relative angles are drawn from `[-range, range]`.
    #[serde(rename = "angle_range_deg")]
    pub angle_range: f64,
}

impl Default for InitRanges {
    fn default() -> Self {
        Self {
            max_length: 40.0,
            angle_range: 90.0,
        }
    }
}

/// Optional discretisation of angular genes: after sampling and variation
/// every length and angle snaps to the nearest listed value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneLattice {
    #[serde(rename = "lengths_cells")]
    pub lengths: Vec<f64>,
    #[serde(rename = "angles_deg")]
    pub angles: Vec<f64>,
}

impl GeneLattice {
    pub fn snap_length(&self, v: f64) -> f64 {
        nearest(&self.lengths, v, |a, b| (a - b).abs())
    }

    pub fn snap_angle(&self, v: f64) -> f64 {
        nearest(&self.angles, v, |a, b| {
            crate::geometry::normalize_angle(a - b).abs()
        })
    }

    /// Every genotype on the lattice, for exhaustive enumeration.
    pub fn enumerate(&self, blocks: usize) -> Vec<Genotype> {
        let values: Vec<[f64; 2]> = self
            .lengths
            .iter()
            .flat_map(|&l| self.angles.iter().map(move |&a| [l, a]))
            .collect();
        let mut out = vec![Vec::new()];
        for _ in 0..blocks {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<[f64; 2]>| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|b| Genotype::new(crate::geometry::Encoding::Angular, b))
            .collect()
    }
}

fn nearest(values: &[f64], v: f64, dist: impl Fn(f64, f64) -> f64) -> f64 {
    values
        .iter()
        .copied()
        .min_by(|&a, &b| dist(a, v).total_cmp(&dist(b, v)))
        .unwrap_or(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub grid: ScenarioGrid,
    pub existing_structures: Vec<Breakwater>,
    pub attachments: Vec<AttachmentPoint>,
    pub control_points: Vec<Point2>,
    pub fairway: Vec<Point2>,
    pub boundary: BoundaryConditions,
    pub materials: MaterialTable,
    pub diffusion_passes: usize,
    /// Spacing in cells of the points sampled for the fairway distance.
    pub sampling_step: f64,
    /// Added to the scalar score, and to each minimisation component, per
    /// constraint violation.
    pub penalty: f64,
    pub score_mapping: ScoreMapping,
    pub init: InitRanges,
    pub lattice: Option<GeneLattice>,
    pub baseline: Baseline,
    existing_obstacles: ObstacleSet,
}

impl Scenario {
    /// Reads, validates and baselines a scenario with the built-in wave
    /// model.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
        let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
        let model = ShadowDiffusionModel {
            diffusion_passes: file.wave_model.diffusion_passes,
        };
        file.build(Some(base_dir), &model)
    }

    /// Parses scenario JSON whose grid is inline or uniform.
    pub fn from_json(json: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(json).map_err(|e| Error::parse("scenario", e))?;
        let model = ShadowDiffusionModel {
            diffusion_passes: file.wave_model.diffusion_passes,
        };
        file.build(None, &model)
    }

    /// The shipped synthetic harbour: three attachment points with two
    /// segments each, three control points. Illustrative only.
    pub fn demo_harbour() -> Self {
        let mut file: ScenarioFile =
            serde_json::from_str(DEMO_HARBOUR_JSON).expect("shipped scenario parses");
        let rows = crate::wave_model::parse_matrix(DEMO_HARBOUR_DEPTH, "demo_harbour depth")
            .expect("shipped depth parses");
        file.grid.depth = Some(rows);
        file.grid.depth_file = None;
        let model = ShadowDiffusionModel {
            diffusion_passes: file.wave_model.diffusion_passes,
        };
        file.build(None, &model).expect("shipped scenario is valid")
    }

    /// Serialisable form with the depth grid inlined, so a result directory
    /// carries everything needed to reproduce a run.
    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile::from_scenario(self)
    }

    /// Recomputes the baseline with a different wave model.
    pub fn rebaseline(&mut self, model: &dyn WaveModel) -> Result<()> {
        self.baseline = compute_baseline(self, model)?;
        validate_baseline(&self.baseline)
    }

    pub fn model(&self) -> ShadowDiffusionModel {
        ShadowDiffusionModel {
            diffusion_passes: self.diffusion_passes,
        }
    }

    pub fn total_segments(&self) -> usize {
        self.attachments.iter().map(|a| a.segments).sum()
    }

    /// Obstacle cells of the existing structures.
    pub fn existing_obstacles(&self) -> &ObstacleSet {
        &self.existing_obstacles
    }

    /// Layout with every new segment at zero length.
    pub fn base_layout(&self) -> Layout {
        Layout {
            breakwaters: self
                .attachments
                .iter()
                .map(|a| Breakwater {
                    vertices: vec![a.position; a.segments + 1],
                    material: a.material,
                })
                .collect(),
        }
    }
}

fn existing_obstacles(
    grid: &ScenarioGrid,
    structures: &[Breakwater],
    materials: &MaterialTable,
) -> ObstacleSet {
    let mut set = ObstacleSet::new();
    for bw in structures {
        let single = Layout {
            breakwaters: vec![bw.clone()],
        };
        set.extend(rasterize(&single, grid), materials.coefficient(bw.material));
    }
    set
}

fn compute_baseline(scenario: &Scenario, model: &dyn WaveModel) -> Result<Baseline> {
    let field = model.simulate(
        &scenario.grid,
        &scenario.existing_obstacles,
        &scenario.boundary,
    )?;
    let existing_length: f64 = scenario
        .existing_structures
        .iter()
        .map(Breakwater::length)
        .sum();
    Ok(Baseline {
        wave_heights: sample(&field, &scenario.control_points),
        nav_distance: min_distance_to_fairway(
            &scenario.base_layout(),
            &scenario.fairway,
            scenario.sampling_step,
            scenario.grid.cell_size(),
        ),
        cost_reference: existing_length * scenario.grid.cell_size(),
    })
}

fn validate_baseline(baseline: &Baseline) -> Result<()> {
    let mut problems = Vec::new();
    for (i, &h) in baseline.wave_heights.iter().enumerate() {
        if !(h > 0.0) {
            problems.push(format!(
                "control point {i} has baseline wave height {h}; relative objectives need it positive"
            ));
        }
    }
    if !(baseline.nav_distance > 0.0) {
        problems.push("attachment points touch the fairway: baseline fairway distance is 0".into());
    }
    if !(baseline.cost_reference > 0.0) {
        problems.push("existing structures have zero length: no cost reference".into());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(problems))
    }
}

/// Structural checks that do not need the wave model.
fn validate(scenario: &Scenario) -> Vec<String> {
    let grid = &scenario.grid;
    let mut problems = Vec::new();

    if scenario.attachments.is_empty() {
        problems.push("scenario has no attachment points".into());
    }
    for (i, att) in scenario.attachments.iter().enumerate() {
        let p = att.position;
        if !grid.contains(p) {
            problems.push(format!(
                "attachment {i} at ({}, {}) is outside the grid",
                p.x, p.y
            ));
            continue;
        }
        if att.segments == 0 {
            problems.push(format!("attachment {i} has no segments"));
        }
        if !att.base_angle.is_finite() {
            problems.push(format!("attachment {i} has a non-finite base angle"));
        }
        let cell = grid.cell_containing(p).expect("inside grid");
        if grid.is_land(cell) {
            problems.push(format!("attachment {i} at ({}, {}) is on land", p.x, p.y));
        } else if !near_coast_or_structure(scenario, p, cell) {
            problems.push(format!(
                "attachment {i} at ({}, {}) is neither next to the coast nor on an existing structure",
                p.x, p.y
            ));
        }
    }

    if scenario.control_points.is_empty() {
        problems.push("scenario has no control points".into());
    }
    for (i, &p) in scenario.control_points.iter().enumerate() {
        if !grid.contains(p) {
            problems.push(format!(
                "control point {i} at ({}, {}) is outside the grid",
                p.x, p.y
            ));
        } else if grid.is_land(grid.cell_containing(p).expect("inside grid")) {
            problems.push(format!(
                "control point {i} at ({}, {}) is on land",
                p.x, p.y
            ));
        }
    }

    if scenario.fairway.len() < 2 {
        problems.push("fairway needs at least two vertices".into());
    }
    for (i, bw) in scenario.existing_structures.iter().enumerate() {
        if bw.vertices.len() < 2 {
            problems.push(format!(
                "existing structure {i} needs at least two vertices"
            ));
        }
    }
    let b = &scenario.boundary;
    if !(b.incident_height > 0.0 && b.incident_height.is_finite()) {
        problems.push(format!(
            "incident wave height must be positive, got {}",
            b.incident_height
        ));
    }
    if !b.wave_direction.is_finite() {
        problems.push("wave direction is not finite".into());
    }
    for (name, c) in [
        ("solid_wall", scenario.materials.solid_wall),
        ("tetrapod", scenario.materials.tetrapod),
    ] {
        if !(0.0..=1.0).contains(&c) {
            problems.push(format!(
                "{name} transmission coefficient {c} is outside [0, 1]"
            ));
        }
    }
    if !(scenario.sampling_step > 0.0) {
        problems.push(format!(
            "sampling step must be positive, got {}",
            scenario.sampling_step
        ));
    }
    if !(scenario.penalty >= 0.0) {
        problems.push(format!(
            "penalty must be non-negative, got {}",
            scenario.penalty
        ));
    }
    if !(scenario.init.max_length > 0.0) {
        problems.push(format!(
            "max segment length must be positive, got {}",
            scenario.init.max_length
        ));
    }
    if !(scenario.init.angle_range >= 0.0 && scenario.init.angle_range <= 180.0) {
        problems.push(format!(
            "angle range must be in [0, 180], got {}",
            scenario.init.angle_range
        ));
    }
    if let Some(lattice) = &scenario.lattice {
        if lattice.lengths.is_empty() || lattice.angles.is_empty() {
            problems.push("gene lattice needs at least one length and one angle".into());
        }
        if lattice.lengths.iter().any(|&l| !(l >= 0.0)) {
            problems.push("gene lattice lengths must be non-negative".into());
        }
    }
    problems
}

fn near_coast_or_structure(scenario: &Scenario, p: Point2, cell: Cell) -> bool {
    let grid = &scenario.grid;
    let coast = (-1..=1).any(|dr| {
        (-1..=1).any(|dc| {
            grid.cell_at(cell.col as i64 + dc, cell.row as i64 + dr)
                .is_some_and(|c| grid.is_land(c))
        })
    });
    coast
        || scenario
            .existing_structures
            .iter()
            .any(|bw| distance_to_polyline(p, &bw.vertices) <= 1.0)
}

fn distance_to_polyline(p: Point2, vertices: &[Point2]) -> f64 {
    vertices
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let len2 = dx * dx + dy * dy;
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
            };
            p.distance(a.lerp(b, t))
        })
        .fold(f64::INFINITY, f64::min)
}
