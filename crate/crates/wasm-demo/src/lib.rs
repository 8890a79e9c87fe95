//! Browser bindings for the breakwater optimiser.
//!
//! Every entry point takes and returns JSON strings so the page needs no
//! generated bindings beyond plain functions. The `*_json` functions hold the
//! logic and also run natively, which is how they are tested.

use std::sync::OnceLock;

use breakwater_core::evolution::{run_spea2, BreakwaterProblem, EAConfig, Problem};
use breakwater_core::experiment::pareto_members;
use breakwater_core::geometry::{convert, decode, Encoding, Genotype};
use breakwater_core::metrics::{front_snapshots, reduce_to_2d, reference_point_for};
use breakwater_core::objectives::layout_obstacles;
use breakwater_core::scenario::Scenario;
use breakwater_core::wave_model::WaveModel;
use serde::{Deserialize, Serialize};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn scenario() -> &'static Scenario {
    static SCENARIO: OnceLock<Scenario> = OnceLock::new();
    SCENARIO.get_or_init(Scenario::demo_harbour)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Grid, land mask, structures, attachment points, control points, fairway
/// and baseline of the built-in scenario.
pub fn scenario_json() -> String {
    let s = scenario();
    let land: Vec<u8> = s.grid.land_mask().iter().map(|&l| u8::from(l)).collect();
    json!({
        "name": s.name,
        "n_cols": s.grid.n_cols(),
        "n_rows": s.grid.n_rows(),
        "cell_size_m": s.grid.cell_size(),
        "land": land,
        "existing_structures": s.existing_structures,
        "attachments": s.attachments,
        "control_points": s.control_points,
        "fairway": s.fairway,
        "baseline": s.baseline,
        "max_length_cells": s.init.max_length,
    })
    .to_string()
}

/// Angular genes: `[length, angle, length, angle, ...]` in cells and degrees.
#[derive(Deserialize)]
struct LayoutRequest {
    genes: Vec<f64>,
}

/// Decodes the angular genes, simulates the layout and returns its polylines,
/// objectives, score and wave field (row-major, land as `null`).
pub fn simulate_json(request: &str) -> Result<String, String> {
    let s = scenario();
    let req: LayoutRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if req.genes.len() != 2 * s.total_segments() {
        return Err(format!(
            "expected {} genes, got {}",
            2 * s.total_segments(),
            req.genes.len()
        ));
    }
    let genotype = Genotype::new(
        Encoding::Angular,
        req.genes.chunks(2).map(|c| [c[0], c[1]]).collect(),
    );
    let model = s.model();
    let evaluation = BreakwaterProblem::new(s, &model)
        .evaluate(&genotype)
        .map_err(|e| e.to_string())?;
    let layout = decode(&genotype, &s.attachments).map_err(|e| e.to_string())?;
    let field = model
        .simulate(&s.grid, &layout_obstacles(&layout, s), &s.boundary)
        .map_err(|e| e.to_string())?;
    let heights: Vec<Option<f64>> = field
        .heights()
        .iter()
        .zip(s.grid.land_mask())
        .map(|(&h, &land)| (!land).then_some(h))
        .collect();
    to_json(&json!({
        "layout": layout,
        "objectives": evaluation.objectives,
        "relative": evaluation.relative,
        "score": evaluation.score,
        "heights": heights,
    }))
}

#[derive(Deserialize)]
struct OptimizeRequest {
    seed: u64,
    generations: usize,
    population: usize,
    #[serde(default)]
    greedy: bool,
    #[serde(default = "angular")]
    encoding: Encoding,
}

fn angular() -> Encoding {
    Encoding::Angular
}

/// Runs SPEA2 and returns the two-dimensional front (cost, mean height) of
/// the final Pareto set with each member's angular genes, plus the
/// hypervolume of the cumulative front per generation.
pub fn optimize_json(request: &str) -> Result<String, String> {
    let s = scenario();
    let req: OptimizeRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let config = EAConfig {
        population_size: req.population,
        archive_size: req.population,
        generations: req.generations,
        greedy: req.greedy,
        encoding: req.encoding,
        seed: req.seed,
        ..EAConfig::default()
    };
    let model = s.model();
    let problem = BreakwaterProblem::new(s, &model);
    let history = run_spea2(&config, &problem).map_err(|e| e.to_string())?;
    let members = pareto_members(&history, s).map_err(|e| e.to_string())?;
    let objectives: Vec<_> = members.iter().map(|m| m.objectives.clone()).collect();
    let front: Vec<_> = reduce_to_2d(&objectives)
        .into_iter()
        .zip(&members)
        .map(|(p, m)| {
            let genes: Vec<f64> = convert(&m.genotype, Encoding::Angular, &s.attachments)
                .map(|g| g.blocks.into_iter().flatten().collect())
                .unwrap_or_default();
            json!({ "cost_m": p[0], "mean_height_m": p[1], "score": m.score, "genes": genes })
        })
        .collect();
    let curve: Vec<_> = reference_point_for(&[&history], None)
        .map(|r| {
            front_snapshots(&history, &r, None)
                .into_iter()
                .map(|snap| json!({ "model_runs": snap.model_runs, "hypervolume": snap.hypervolume }))
                .collect()
        })
        .unwrap_or_default();
    to_json(&json!({ "front": front, "hypervolume": curve }))
}

#[wasm_bindgen(js_name = scenarioInfo)]
pub fn scenario_info() -> String {
    scenario_json()
}

#[wasm_bindgen(js_name = simulateLayout)]
pub fn simulate_layout(request: &str) -> Result<String, JsError> {
    simulate_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn optimize(request: &str) -> Result<String, JsError> {
    optimize_json(request).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_genes_reproduce_the_baseline() {
        let s = scenario();
        let genes = vec![0.0; 2 * s.total_segments()];
        let out: serde_json::Value =
            serde_json::from_str(&simulate_json(&json!({ "genes": genes }).to_string()).unwrap())
                .unwrap();
        assert_eq!(out["score"], 1.0);
        let heights = out["objectives"]["wave_heights"].as_array().unwrap();
        for (h, b) in heights.iter().zip(&s.baseline.wave_heights) {
            assert_eq!(h.as_f64().unwrap(), *b);
        }
    }

    #[test]
    fn wrong_gene_count_is_rejected() {
        assert!(simulate_json(r#"{"genes":[1.0]}"#).is_err());
    }

    #[test]
    fn small_optimisation_returns_front_and_curve() {
        let out: serde_json::Value = serde_json::from_str(
            &optimize_json(r#"{"seed":1,"generations":3,"population":8}"#).unwrap(),
        )
        .unwrap();
        assert!(!out["front"].as_array().unwrap().is_empty());
        assert_eq!(out["hypervolume"].as_array().unwrap().len(), 3);
        assert_eq!(out["front"][0]["genes"].as_array().unwrap().len(), 12);
    }
}
