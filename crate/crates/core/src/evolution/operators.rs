use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{EAConfig, Problem};
use crate::geometry::{normalize_angle, Encoding, Genotype};
use crate::scenario::Scenario;
use crate::Result;

/// Restricts variation to one segment at a time, cycling through the
/// segments of all breakwaters in genotype order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyMask {
    segments: usize,
    generations_per_segment: usize,
    step: usize,
}

impl GreedyMask {
    pub fn new(segments: usize, generations_per_segment: usize) -> Self {
        assert!(segments > 0, "greedy mask needs at least one segment");
        Self {
            segments,
            generations_per_segment: generations_per_segment.max(1),
            step: 0,
        }
    }

    pub fn active(&self) -> usize {
        (self.step / self.generations_per_segment) % self.segments
    }

    /// Gene indices of the active segment.
    pub fn genes(&self) -> Range<usize> {
        let a = self.active();
        2 * a..2 * a + 2
    }

    pub fn allows(&self, gene: usize) -> bool {
        self.genes().contains(&gene)
    }

    /// Called once per generation.
    pub fn shift_right(&mut self) {
        self.step += 1;
    }

    /// Whether `child` differs from `parent` only inside the active segment.
    pub fn respects(&self, parent: &Genotype, child: &Genotype) -> bool {
        (0..parent.gene_count())
            .filter(|&j| !self.allows(j))
            .all(|j| parent.gene(j).to_bits() == child.gene(j).to_bits())
    }
}

/// Attachment index of every block.
fn block_owners(scenario: &Scenario) -> Vec<usize> {
    scenario
        .attachments
        .iter()
        .enumerate()
        .flat_map(|(i, a)| std::iter::repeat_n(i, a.segments))
        .collect()
}

/// Draws a genotype uniformly from the initial ranges. Angular lengths come
/// from `[0, L]` and relative angles from `[-range, range]`; Cartesian
/// endpoints from the box of half-width `L` around the block's attachment
/// point, clipped to the grid.
pub fn sample_genotype<R: Rng + ?Sized>(
    scenario: &Scenario,
    encoding: Encoding,
    rng: &mut R,
) -> Genotype {
    let l = scenario.init.max_length;
    let range = scenario.init.angle_range;
    let blocks = block_owners(scenario)
        .into_iter()
        .map(|owner| match encoding {
            Encoding::Angular => [rng.random_range(0.0..=l), rng.random_range(-range..=range)],
            Encoding::Cartesian => {
                let p = scenario.attachments[owner].position;
                [
                    rng.random_range(p.x - l..=p.x + l),
                    rng.random_range(p.y - l..=p.y + l),
                ]
            }
        })
        .collect();
    let mut g = Genotype::new(encoding, blocks);
    repair(&mut g, scenario);
    g
}

/// Brings every gene back into its domain. Angular lengths are clamped to
/// `[0, L]` and angles wrapped into `[-180, 180)`, both then snapped to the
/// scenario lattice if there is one. Cartesian coordinates are clamped to the
/// sampling box of their attachment point and to the grid. Idempotent.
pub fn repair(genotype: &mut Genotype, scenario: &Scenario) {
    let l = scenario.init.max_length;
    let lattice = scenario.lattice.as_ref();
    let x_max = (scenario.grid.n_cols() - 1) as f64;
    let y_max = (scenario.grid.n_rows() - 1) as f64;
    let encoding = genotype.encoding;
    for (block, owner) in genotype.blocks.iter_mut().zip(block_owners(scenario)) {
        match encoding {
            Encoding::Angular => {
                let mut len = block[0].clamp(0.0, l);
                let mut angle = normalize_angle(block[1]);
                if let Some(lat) = lattice {
                    len = lat.snap_length(len);
                    angle = lat.snap_angle(angle);
                }
                *block = [len, angle];
            }
            Encoding::Cartesian => {
                let p = scenario.attachments[owner].position;
                block[0] = block[0].clamp((p.x - l).max(0.0), (p.x + l).min(x_max));
                block[1] = block[1].clamp((p.y - l).max(0.0), (p.y + l).min(y_max));
            }
        }
    }
}

/// Samples `config.population_size` genotypes, redrawing each up to
/// `config.init_attempts` times until its layout is feasible.
pub fn init_population<R: Rng + ?Sized>(
    config: &EAConfig,
    problem: &dyn Problem,
    rng: &mut R,
) -> Result<Vec<Genotype>> {
    let scenario = problem.scenario();
    let mut population = Vec::with_capacity(config.population_size);
    for _ in 0..config.population_size {
        let mut g = sample_genotype(scenario, config.encoding, rng);
        for _ in 1..config.init_attempts {
            if problem.violations(&g)? == 0 {
                break;
            }
            g = sample_genotype(scenario, config.encoding, rng);
        }
        population.push(g);
    }
    Ok(population)
}

/// One-point crossover between blocks: both children keep the first `point`
/// blocks of one parent and the rest of the other.
pub fn crossover_at(a: &Genotype, b: &Genotype, point: usize) -> (Genotype, Genotype) {
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    for i in point.min(a.blocks.len())..a.blocks.len() {
        std::mem::swap(&mut c1.blocks[i], &mut c2.blocks[i]);
    }
    (c1, c2)
}

/// Recombines two parents with probability `rate`. Unmasked, the cut point
/// falls between two blocks so whole segments are exchanged; under a greedy
/// mask only the active block is swapped.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genotype,
    b: &Genotype,
    rate: f64,
    mask: Option<&GreedyMask>,
    rng: &mut R,
) -> (Genotype, Genotype) {
    if !rng.random_bool(rate) {
        return (a.clone(), b.clone());
    }
    match mask {
        Some(m) => {
            let mut c1 = a.clone();
            let mut c2 = b.clone();
            let i = m.active();
            std::mem::swap(&mut c1.blocks[i], &mut c2.blocks[i]);
            (c1, c2)
        }
        None if a.blocks.len() < 2 => (a.clone(), b.clone()),
        None => {
            let point = rng.random_range(1..a.blocks.len());
            crossover_at(a, b, point)
        }
    }
}

fn sigma(config: &EAConfig, encoding: Encoding, gene: usize) -> f64 {
    let s = &config.mutation_sigma;
    match (encoding, gene % 2) {
        (Encoding::Cartesian, _) => s.cartesian,
        (Encoding::Angular, 0) => s.length,
        (Encoding::Angular, _) => s.angle,
    }
}

/// Adds Gaussian noise to each eligible gene with probability
/// `config.mutation_rate`, then repairs the genotype.
pub fn mutate<R: Rng + ?Sized>(
    genotype: &Genotype,
    config: &EAConfig,
    mask: Option<&GreedyMask>,
    scenario: &Scenario,
    rng: &mut R,
) -> Genotype {
    let mut g = genotype.clone();
    let (genes, rate) = match mask {
        Some(m) => {
            let active = m.genes();
            let scale = g.gene_count() as f64 / active.len() as f64;
            (active, (config.mutation_rate * scale).min(1.0))
        }
        None => (0..g.gene_count(), config.mutation_rate),
    };
    for j in genes {
        if rng.random_bool(rate) {
            let noise = Normal::new(0.0, sigma(config, g.encoding, j))
                .expect("sigma validated positive")
                .sample(rng);
            *g.gene_mut(j) += noise;
        }
    }
    repair(&mut g, scenario);
    g
}
