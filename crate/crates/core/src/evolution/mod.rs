//! Evolutionary search over breakwater genotypes.
//!
//! Two loops share the same operators and history format:
//! [`run_spea2`] (multi-objective, archive based, optionally with the greedy
//! segment mask) and [`run_de`] (differential evolution on the scalar
//! score). Both spend exactly `population_size` evaluations per generation,
//! evaluate a generation's individuals in parallel and draw every random
//! number from one seeded generator owned by the loop, so a seed fully
//! determines a run.

mod de;
mod operators;
mod spea2;

use serde::{Deserialize, Serialize};

use crate::geometry::{
    count_fairway_intersections, count_land_coverage, count_self_intersections, decode, Encoding,
    Genotype,
};
use crate::objectives::{
    evaluate, minimization_vector, relativize, single_objective, ObjectiveVector,
    RelativeObjectiveVector,
};
use crate::scenario::Scenario;
use crate::wave_model::WaveModel;
use crate::{Error, Result};

pub use de::{de_trial, run_de};
pub use operators::{
    crossover, crossover_at, init_population, mutate, repair, sample_genotype, GreedyMask,
};
pub use spea2::{
    binary_tournament, environmental_selection, run_spea2, spea2_fitness, Spea2Fitness,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Spea2,
    De,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Spea2 => "spea2",
            Algorithm::De => "de",
        })
    }
}

/// How differential evolution builds its trial vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeVariant {
    /// DE/rand/1/bin.
    #[default]
    RandOneBin,
    /// Tournament-selected mate, block crossover and Gaussian mutation, as
    /// in the genetic operators used by SPEA2.
    GeneticOperators,
}

/// Per-gene-type standard deviations of the Gaussian mutation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationSigma {
    /// Angular segment lengths, cells.
    #[serde(rename = "length_cells")]
    pub length: f64,
    /// Angular relative angles, degrees.
    #[serde(rename = "angle_deg")]
    pub angle: f64,
    /// Cartesian coordinates, cells.
    #[serde(rename = "cartesian_cells")]
    pub cartesian: f64,
}

impl Default for MutationSigma {
    fn default() -> Self {
        Self {
            length: 2.0,
            angle: 15.0,
            cartesian: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EAConfig {
    pub population_size: usize,
    pub archive_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    pub mutation_sigma: MutationSigma,
    pub greedy: bool,
    /// Generations spent on each segment before the greedy mask shifts.
    pub generations_per_segment: usize,
    pub encoding: Encoding,
    pub seed: u64,
    /// Samples drawn per initial individual while looking for a feasible
    /// layout; the last sample is kept if none is.
    pub init_attempts: usize,
    /// Differential weight of DE/rand/1.
    pub de_weight: f64,
    pub de_variant: DeVariant,
}

impl Default for EAConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            archive_size: 30,
            generations: 30,
            crossover_rate: 0.8,
            mutation_rate: 0.2,
            mutation_sigma: MutationSigma::default(),
            greedy: false,
            generations_per_segment: 1,
            encoding: Encoding::Angular,
            seed: 1,
            init_attempts: 50,
            de_weight: 0.5,
            de_variant: DeVariant::RandOneBin,
        }
    }
}

impl EAConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.population_size < 2 {
            problems.push(format!(
                "population size must be at least 2, got {}",
                self.population_size
            ));
        }
        if self.archive_size < 2 {
            problems.push(format!(
                "archive size must be at least 2, got {}",
                self.archive_size
            ));
        }
        for (name, rate) in [
            ("crossover rate", self.crossover_rate),
            ("mutation rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                problems.push(format!("{name} must be in [0, 1], got {rate}"));
            }
        }
        let s = &self.mutation_sigma;
        for (name, sigma) in [
            ("length", s.length),
            ("angle", s.angle),
            ("cartesian", s.cartesian),
        ] {
            if !(sigma > 0.0 && sigma.is_finite()) {
                problems.push(format!(
                    "{name} mutation sigma must be positive, got {sigma}"
                ));
            }
        }
        if self.generations_per_segment == 0 {
            problems.push("generations per segment must be at least 1".into());
        }
        if self.init_attempts == 0 {
            problems.push("init attempts must be at least 1".into());
        }
        if !(self.de_weight >= 0.0 && self.de_weight.is_finite()) {
            problems.push(format!(
                "DE weight must be non-negative, got {}",
                self.de_weight
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Scores of one genotype.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub objectives: ObjectiveVector,
    pub relative: RelativeObjectiveVector,
    /// Minimisation-form vector compared by dominance.
    pub objective_space: Vec<f64>,
    /// Scalar convolution plus penalties.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genotype: Genotype,
    #[serde(flatten)]
    pub evaluation: Evaluation,
    /// SPEA2 fitness for multi-objective runs, the scalar score for DE.
    pub fitness: f64,
}

impl Individual {
    pub fn new(genotype: Genotype, evaluation: Evaluation) -> Self {
        let fitness = evaluation.score;
        Self {
            genotype,
            evaluation,
            fitness,
        }
    }

    pub fn objective_space(&self) -> &[f64] {
        &self.evaluation.objective_space
    }

    pub fn is_feasible(&self) -> bool {
        self.evaluation.objectives.is_feasible()
    }
}

/// What the loops optimise.
pub trait Problem: Sync {
    fn scenario(&self) -> &Scenario;

    fn evaluate(&self, genotype: &Genotype) -> Result<Evaluation>;

    /// Constraint violations of the decoded layout, without the wave model.
    fn violations(&self, genotype: &Genotype) -> Result<usize> {
        let s = self.scenario();
        let layout = decode(genotype, &s.attachments)?;
        Ok(count_self_intersections(&layout, &s.existing_structures)
            + count_fairway_intersections(&layout, &s.fairway)
            + count_land_coverage(&layout, &s.grid))
    }
}

/// The breakwater layout problem of a scenario under a wave model.
pub struct BreakwaterProblem<'a> {
    pub scenario: &'a Scenario,
    pub model: &'a dyn WaveModel,
}

impl<'a> BreakwaterProblem<'a> {
    pub fn new(scenario: &'a Scenario, model: &'a dyn WaveModel) -> Self {
        Self { scenario, model }
    }
}

impl Problem for BreakwaterProblem<'_> {
    fn scenario(&self) -> &Scenario {
        self.scenario
    }

    fn evaluate(&self, genotype: &Genotype) -> Result<Evaluation> {
        let s = self.scenario;
        let objectives = evaluate(genotype, s, self.model)?;
        Ok(evaluation_from(objectives, s))
    }
}

/// Derives the relative, minimisation and scalar forms of raw objectives.
pub fn evaluation_from(objectives: ObjectiveVector, scenario: &Scenario) -> Evaluation {
    let relative = relativize(&objectives, &scenario.baseline);
    let violations = objectives.violations();
    let score = single_objective(
        &relative,
        violations,
        scenario.penalty,
        scenario.score_mapping,
    )
    .value;
    let objective_space = minimization_vector(&relative, violations, scenario.penalty);
    Evaluation {
        objectives,
        relative,
        objective_space,
        score,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Cumulative evaluations (wave-model invocations) after this generation.
    pub model_runs: usize,
    /// Segment the greedy mask allowed to change when this generation was
    /// bred.
    pub active_segment: Option<usize>,
    /// Individuals evaluated in this generation.
    pub evaluated: Vec<Individual>,
    /// SPEA2 archive, or the surviving DE population.
    pub archive: Vec<Individual>,
    /// Lowest scalar score in `archive`.
    pub best_score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveHistory {
    pub algorithm: Algorithm,
    pub config: EAConfig,
    pub records: Vec<GenerationRecord>,
    /// Offspring compared against their primary parent under the greedy mask.
    pub mask_checks: usize,
    /// Offspring that changed genes outside the active segment.
    pub mask_violations: usize,
}

impl ArchiveHistory {
    pub fn final_record(&self) -> Option<&GenerationRecord> {
        self.records.last()
    }

    pub fn model_runs(&self) -> usize {
        self.records.last().map_or(0, |r| r.model_runs)
    }

    /// Every evaluated individual, generation by generation.
    pub fn evaluated(&self) -> impl Iterator<Item = &Individual> {
        self.records.iter().flat_map(|r| r.evaluated.iter())
    }
}

pub fn run(
    algorithm: Algorithm,
    config: &EAConfig,
    problem: &dyn Problem,
) -> Result<ArchiveHistory> {
    match algorithm {
        Algorithm::Spea2 => run_spea2(config, problem),
        Algorithm::De => run_de(config, problem),
    }
}

/// Evaluates genotypes, in parallel when the `parallel` feature is on.
/// Failures carry the generation and the individual's index.
pub(crate) fn evaluate_all(
    problem: &dyn Problem,
    genotypes: Vec<Genotype>,
    generation: usize,
) -> Result<Vec<Individual>> {
    let eval = |(index, g): (usize, Genotype)| {
        problem
            .evaluate(&g)
            .map(|e| Individual::new(g, e))
            .map_err(|source| Error::Evaluation {
                generation,
                index,
                source: Box::new(source),
            })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        genotypes.into_par_iter().enumerate().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        genotypes.into_iter().enumerate().map(eval).collect()
    }
}

pub(crate) fn best_score(individuals: &[Individual]) -> f64 {
    individuals
        .iter()
        .map(|i| i.evaluation.score)
        .fold(f64::INFINITY, f64::min)
}
