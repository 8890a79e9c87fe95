use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{crossover, init_population, mutate, repair, GreedyMask};
use super::spea2::binary_tournament;
use super::{
    best_score, evaluate_all, Algorithm, ArchiveHistory, DeVariant, EAConfig, GenerationRecord,
    Individual, Problem,
};
use crate::geometry::{normalize_angle, Encoding, Genotype};
use crate::{Error, Result};

/// DE/rand/1/bin trial vector for `target`. Only genes allowed by `mask`
/// take part; one of them always comes from the donor. Angle differences
/// are wrapped before scaling. The result is not repaired.
#[allow(clippy::too_many_arguments)]
pub fn de_trial<R: Rng + ?Sized>(
    target: &Genotype,
    r1: &Genotype,
    r2: &Genotype,
    r3: &Genotype,
    weight: f64,
    crossover_rate: f64,
    mask: Option<&GreedyMask>,
    rng: &mut R,
) -> Genotype {
    let eligible: Vec<usize> = match mask {
        Some(m) => m.genes().collect(),
        None => (0..target.gene_count()).collect(),
    };
    let forced = eligible[rng.random_range(0..eligible.len())];
    let mut trial = target.clone();
    for j in eligible {
        let take = rng.random::<f64>() < crossover_rate || j == forced;
        if take {
            let diff = r2.gene(j) - r3.gene(j);
            let diff = if target.encoding == Encoding::Angular && j % 2 == 1 {
                normalize_angle(diff)
            } else {
                diff
            };
            *trial.gene_mut(j) = r1.gene(j) + weight * diff;
        }
    }
    trial
}

/// Three distinct indices different from `i`.
fn pick_three<R: Rng + ?Sized>(n: usize, i: usize, rng: &mut R) -> [usize; 3] {
    let mut out = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let c = rng.random_range(0..n);
            if c != i && !out[..k].contains(&c) {
                out[k] = c;
                break;
            }
        }
    }
    out
}

/// Differential evolution on the scalar score. Each trial replaces its
/// target when it scores lower; ties are decided by a coin flip.
pub fn run_de(config: &EAConfig, problem: &dyn Problem) -> Result<ArchiveHistory> {
    config.validate()?;
    if config.de_variant == DeVariant::RandOneBin && config.population_size < 4 {
        return Err(Error::Validation(vec![format!(
            "DE/rand/1 needs a population of at least 4, got {}",
            config.population_size
        )]));
    }
    let scenario = problem.scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut mask = config
        .greedy
        .then(|| GreedyMask::new(scenario.total_segments(), config.generations_per_segment));
    let initial = init_population(config, problem, &mut rng)?;
    let mut population = evaluate_all(problem, initial, 0)?;
    let mut model_runs = population.len();
    let mut history = ArchiveHistory {
        algorithm: Algorithm::De,
        config: config.clone(),
        records: vec![GenerationRecord {
            generation: 0,
            model_runs,
            active_segment: None,
            best_score: best_score(&population),
            evaluated: population.clone(),
            archive: population.clone(),
        }],
        mask_checks: 0,
        mask_violations: 0,
    };

    for generation in 1..config.generations.max(1) {
        let n = population.len();
        let scores: Vec<f64> = population.iter().map(|i| i.evaluation.score).collect();
        let mut trials = Vec::with_capacity(n);
        for i in 0..n {
            let target = &population[i].genotype;
            let trial = match config.de_variant {
                DeVariant::RandOneBin => {
                    let [a, b, c] = pick_three(n, i, &mut rng);
                    let mut t = de_trial(
                        target,
                        &population[a].genotype,
                        &population[b].genotype,
                        &population[c].genotype,
                        config.de_weight,
                        config.crossover_rate,
                        mask.as_ref(),
                        &mut rng,
                    );
                    repair(&mut t, scenario);
                    t
                }
                DeVariant::GeneticOperators => {
                    let mate = &population[binary_tournament(&scores, &mut rng)].genotype;
                    let (c, _) =
                        crossover(target, mate, config.crossover_rate, mask.as_ref(), &mut rng);
                    mutate(&c, config, mask.as_ref(), scenario, &mut rng)
                }
            };
            if let Some(m) = &mask {
                history.mask_checks += 1;
                if !m.respects(target, &trial) {
                    history.mask_violations += 1;
                }
            }
            trials.push(trial);
        }
        let bred_with = mask.as_ref().map(GreedyMask::active);
        if let Some(m) = &mut mask {
            m.shift_right();
        }

        let evaluated = evaluate_all(problem, trials, generation)?;
        model_runs += evaluated.len();
        population = population
            .into_iter()
            .zip(evaluated.iter().cloned())
            .map(|(old, new): (Individual, Individual)| {
                let (a, b) = (new.evaluation.score, old.evaluation.score);
                if a < b || (a == b && rng.random_bool(0.5)) {
                    new
                } else {
                    old
                }
            })
            .collect();
        debug!("de generation {generation}: {model_runs} model runs");
        history.records.push(GenerationRecord {
            generation,
            model_runs,
            active_segment: bred_with,
            best_score: best_score(&population),
            evaluated,
            archive: population.clone(),
        });
    }
    Ok(history)
}
