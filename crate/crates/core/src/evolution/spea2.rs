use log::debug;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{crossover, init_population, mutate, GreedyMask};
use super::{
    best_score, evaluate_all, Algorithm, ArchiveHistory, EAConfig, GenerationRecord, Individual,
    Problem,
};
use crate::metrics::dominates;
use crate::Result;

/// SPEA2 fitness terms of one individual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spea2Fitness {
    /// Number of individuals this one dominates.
    pub strength: usize,
    /// Sum of the strengths of its dominators; zero iff nondominated.
    pub raw: usize,
    /// `1 / (sigma_k + 2)` with `sigma_k` the distance to the k-th nearest
    /// neighbour, `k = floor(sqrt(n))`.
    pub density: f64,
    pub fitness: f64,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn distance_matrix<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| distance(a.as_ref(), b.as_ref()))
                .collect()
        })
        .collect()
}

pub fn spea2_fitness<P: AsRef<[f64]>>(points: &[P]) -> Vec<Spea2Fitness> {
    let n = points.len();
    let dom: Vec<Vec<bool>> = points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| dominates(a.as_ref(), b.as_ref()))
                .collect()
        })
        .collect();
    let strength: Vec<usize> = dom
        .iter()
        .map(|row| row.iter().filter(|&&d| d).count())
        .collect();
    let dist = distance_matrix(points);
    let k = (n as f64).sqrt().floor() as usize;
    (0..n)
        .map(|i| {
            let raw = (0..n).filter(|&j| dom[j][i]).map(|j| strength[j]).sum();
            let mut others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist[i][j]).collect();
            others.sort_by(f64::total_cmp);
            let sigma = match others.len() {
                0 => 0.0,
                len => others[k.clamp(1, len) - 1],
            };
            let density = 1.0 / (sigma + 2.0);
            Spea2Fitness {
                strength: strength[i],
                raw,
                density,
                fitness: raw as f64 + density,
            }
        })
        .collect()
}

/// Chooses the next archive from `points` (archive and population together).
/// All nondominated points are kept; if there are too many, the one with the
/// lexicographically smallest sorted neighbour distances is removed
/// repeatedly (ties broken at random), and if there are too few, the best
/// dominated points by fitness fill the gap. Returns indices into `points`.
pub fn environmental_selection<P: AsRef<[f64]>, R: Rng + ?Sized>(
    points: &[P],
    fitness: &[Spea2Fitness],
    archive_size: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut selected: Vec<usize> = (0..points.len()).filter(|&i| fitness[i].raw == 0).collect();
    if selected.len() < archive_size {
        let mut dominated: Vec<usize> = (0..points.len()).filter(|&i| fitness[i].raw > 0).collect();
        dominated.shuffle(rng);
        dominated.sort_by(|&a, &b| fitness[a].fitness.total_cmp(&fitness[b].fitness));
        selected.extend(dominated.into_iter().take(archive_size - selected.len()));
    } else if selected.len() > archive_size {
        truncate(points, &mut selected, archive_size, rng);
    }
    selected
}

fn truncate<P: AsRef<[f64]>, R: Rng + ?Sized>(
    points: &[P],
    alive: &mut Vec<usize>,
    size: usize,
    rng: &mut R,
) {
    let dist = distance_matrix(points);
    while alive.len() > size {
        let neighbours: Vec<Vec<f64>> = alive
            .iter()
            .map(|&i| {
                let mut d: Vec<f64> = alive
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| dist[i][j])
                    .collect();
                d.sort_by(f64::total_cmp);
                d
            })
            .collect();
        let mut closest = vec![0];
        for pos in 1..alive.len() {
            match crate::metrics::cmp_lex(&neighbours[pos], &neighbours[closest[0]]) {
                std::cmp::Ordering::Less => closest = vec![pos],
                std::cmp::Ordering::Equal => closest.push(pos),
                std::cmp::Ordering::Greater => {}
            }
        }
        let victim = closest[rng.random_range(0..closest.len())];
        alive.remove(victim);
    }
}

/// Index of the fitter of two uniformly drawn individuals; equal fitness is
/// decided by a coin flip.
pub fn binary_tournament<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> usize {
    let a = rng.random_range(0..fitness.len());
    let b = rng.random_range(0..fitness.len());
    if fitness[a] < fitness[b] {
        a
    } else if fitness[b] < fitness[a] {
        b
    } else if rng.random_bool(0.5) {
        a
    } else {
        b
    }
}

pub fn run_spea2(config: &EAConfig, problem: &dyn Problem) -> Result<ArchiveHistory> {
    config.validate()?;
    let scenario = problem.scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut mask = config
        .greedy
        .then(|| GreedyMask::new(scenario.total_segments(), config.generations_per_segment));
    let mut genotypes = init_population(config, problem, &mut rng)?;
    let mut archive: Vec<Individual> = Vec::new();
    let mut history = ArchiveHistory {
        algorithm: Algorithm::Spea2,
        config: config.clone(),
        records: Vec::new(),
        mask_checks: 0,
        mask_violations: 0,
    };
    let generations = config.generations.max(1);
    let mut model_runs = 0;
    let mut bred_with = None;

    for generation in 0..generations {
        let population = evaluate_all(problem, std::mem::take(&mut genotypes), generation)?;
        model_runs += population.len();

        let mut union: Vec<Individual> = archive
            .into_iter()
            .chain(population.iter().cloned())
            .collect();
        let spaces: Vec<&[f64]> = union.iter().map(Individual::objective_space).collect();
        let fitness = spea2_fitness(&spaces);
        let chosen = environmental_selection(&spaces, &fitness, config.archive_size, &mut rng);
        for (ind, f) in union.iter_mut().zip(&fitness) {
            ind.fitness = f.fitness;
        }
        let offset = union.len() - population.len();
        let evaluated: Vec<Individual> = union[offset..].to_vec();
        archive = chosen.iter().map(|&i| union[i].clone()).collect();
        debug!(
            "spea2 generation {generation}: {model_runs} model runs, archive {}",
            archive.len()
        );
        history.records.push(GenerationRecord {
            generation,
            model_runs,
            active_segment: bred_with,
            best_score: best_score(&archive),
            evaluated,
            archive: archive.clone(),
        });
        if generation + 1 == generations {
            break;
        }

        let values: Vec<f64> = union.iter().map(|i| i.fitness).collect();
        let mut offspring = Vec::with_capacity(config.population_size);
        while offspring.len() < config.population_size {
            let p1 = &union[binary_tournament(&values, &mut rng)].genotype;
            let p2 = &union[binary_tournament(&values, &mut rng)].genotype;
            let (c1, c2) = crossover(p1, p2, config.crossover_rate, mask.as_ref(), &mut rng);
            for (parent, child) in [(p1, c1), (p2, c2)] {
                if offspring.len() == config.population_size {
                    break;
                }
                let child = mutate(&child, config, mask.as_ref(), scenario, &mut rng);
                if let Some(m) = &mask {
                    history.mask_checks += 1;
                    if !m.respects(parent, &child) {
                        history.mask_violations += 1;
                    }
                }
                offspring.push(child);
            }
        }
        bred_with = mask.as_ref().map(GreedyMask::active);
        if let Some(m) = &mut mask {
            m.shift_right();
        }
        genotypes = offspring;
    }
    Ok(history)
}
