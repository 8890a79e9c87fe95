//! Objective and constraint evaluation.
//!
//! Raw objectives are construction cost, distance from the new breakwaters to
//! the fairway and wave height at each control point. They are compared
//! against the base configuration (no new breakwaters) as percentage changes,
//! and those relative values feed both the multi-objective search and the
//! scalar score used by differential evolution.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    count_fairway_intersections, count_land_coverage, count_self_intersections, decode,
    min_distance_to_fairway, rasterize, Genotype, Layout,
};
use crate::scenario::Scenario;
use crate::wave_model::{sample, ObstacleSet, WaveModel};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// Total new breakwater length in metres.
    pub cost: f64,
    /// Smallest breakwater-to-fairway distance in metres.
    pub nav_distance: f64,
    /// Significant wave height at each control point, metres.
    pub wave_heights: Vec<f64>,
    pub self_intersections: usize,
    pub fairway_intersections: usize,
    pub land_coverage: usize,
    /// False when a constraint violation skipped the wave model and the
    /// heights were copied from the baseline.
    pub simulated: bool,
}

impl ObjectiveVector {
    pub fn violations(&self) -> usize {
        self.self_intersections + self.fairway_intersections + self.land_coverage
    }

    pub fn is_feasible(&self) -> bool {
        self.violations() == 0
    }

    pub fn mean_wave_height(&self) -> f64 {
        mean(&self.wave_heights)
    }
}

/// Percentage change against the base configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeObjectiveVector {
    pub rel_cost: f64,
    pub rel_wave_heights: Vec<f64>,
    pub rel_nav: f64,
}

/// Objective values of the base configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub wave_heights: Vec<f64>,
    pub nav_distance: f64,
    /// Cost denominator: length of the existing structures in metres. The
    /// base configuration itself has zero new cost.
    pub cost_reference: f64,
}

/// Which relative terms enter the scalar convolution's numerator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMapping {
    /// `100 + mean(wave) + nav`: the averaged term is the wave-height vector.
    #[default]
    WaveVector,
    /// `100 + nav + wave_1`: objectives numbered cost, navigation, then one
    /// wave height per control point.
    TableOrder,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleObjective {
    pub value: f64,
    /// The cost denominator was within 1e-6 of zero and was clamped.
    pub clamped: bool,
}

/// Minimum |denominator| of the scalar convolution.
pub const DENOMINATOR_GUARD: f64 = 1e-6;

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Sum of segment lengths times the grid step.
pub fn cost(layout: &Layout, cell_size: f64) -> f64 {
    layout
        .segments()
        .map(|(a, b)| ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt())
        .sum::<f64>()
        * cell_size
}

/// Decodes and scores a genotype. Layouts violating any constraint skip the
/// wave model and report the baseline heights.
pub fn evaluate(
    genotype: &Genotype,
    scenario: &Scenario,
    model: &dyn WaveModel,
) -> Result<ObjectiveVector> {
    let layout = decode(genotype, &scenario.attachments)?;
    evaluate_layout(&layout, scenario, model)
}

pub fn evaluate_layout(
    layout: &Layout,
    scenario: &Scenario,
    model: &dyn WaveModel,
) -> Result<ObjectiveVector> {
    let grid = &scenario.grid;
    let self_intersections = count_self_intersections(layout, &scenario.existing_structures);
    let fairway_intersections = count_fairway_intersections(layout, &scenario.fairway);
    let land_coverage = count_land_coverage(layout, grid);
    let feasible = self_intersections + fairway_intersections + land_coverage == 0;

    let wave_heights = if feasible {
        let field = model.simulate(
            grid,
            &layout_obstacles(layout, scenario),
            &scenario.boundary,
        )?;
        sample(&field, &scenario.control_points)
    } else {
        scenario.baseline.wave_heights.clone()
    };

    Ok(ObjectiveVector {
        cost: cost(layout, grid.cell_size()),
        nav_distance: min_distance_to_fairway(
            layout,
            &scenario.fairway,
            scenario.sampling_step,
            grid.cell_size(),
        ),
        wave_heights,
        self_intersections,
        fairway_intersections,
        land_coverage,
        simulated: feasible,
    })
}

/// Existing structures plus the rasterised new layout.
pub fn layout_obstacles(layout: &Layout, scenario: &Scenario) -> ObstacleSet {
    let mut obstacles = scenario.existing_obstacles().clone();
    for bw in &layout.breakwaters {
        let coefficient = scenario.materials.coefficient(bw.material);
        let single = Layout {
            breakwaters: vec![bw.clone()],
        };
        obstacles.extend(rasterize(&single, &scenario.grid), coefficient);
    }
    obstacles
}

fn relative(new: f64, old: f64) -> f64 {
    (new - old) / old * 100.0
}

pub fn relativize(raw: &ObjectiveVector, baseline: &Baseline) -> RelativeObjectiveVector {
    RelativeObjectiveVector {
        // the base configuration adds nothing, so the increase is the new cost itself
        rel_cost: raw.cost / baseline.cost_reference * 100.0,
        rel_wave_heights: raw
            .wave_heights
            .iter()
            .zip(&baseline.wave_heights)
            .map(|(&h, &h0)| relative(h, h0))
            .collect(),
        rel_nav: relative(raw.nav_distance, baseline.nav_distance),
    }
}

/// Scalar convolution `(100 + wave + nav) / (100 - cost)` over relative
/// objectives, plus `penalty` per constraint violation. Lower is better.
pub fn single_objective(
    rel: &RelativeObjectiveVector,
    violations: usize,
    penalty: f64,
    mapping: ScoreMapping,
) -> SingleObjective {
    let numerator = match mapping {
        ScoreMapping::WaveVector => 100.0 + mean(&rel.rel_wave_heights) + rel.rel_nav,
        ScoreMapping::TableOrder => {
            100.0 + rel.rel_nav + rel.rel_wave_heights.first().copied().unwrap_or(0.0)
        }
    };
    let mut denominator = 100.0 - rel.rel_cost;
    let clamped = denominator.abs() < DENOMINATOR_GUARD;
    if clamped {
        warn!("cost term of the scalar score is {denominator}, clamping the denominator");
        denominator = if denominator < 0.0 {
            -DENOMINATOR_GUARD
        } else {
            DENOMINATOR_GUARD
        };
    }
    SingleObjective {
        value: numerator / denominator + penalty * violations as f64,
        clamped,
    }
}

/// Objective vector in minimisation form: relative cost, negated relative
/// fairway distance, relative wave heights. Each violation adds `penalty` to
/// every component, so any feasible vector dominates any infeasible one.
pub fn minimization_vector(
    rel: &RelativeObjectiveVector,
    violations: usize,
    penalty: f64,
) -> Vec<f64> {
    let shift = penalty * violations as f64;
    std::iter::once(rel.rel_cost)
        .chain(std::iter::once(-rel.rel_nav))
        .chain(rel.rel_wave_heights.iter().copied())
        .map(|v| v + shift)
        .collect()
}
