//! Genetic search over integer-indexed domains.
//!
//! The engine ([`run_integer_ga`]) knows nothing about mappings: a genome is
//! one index per slot into caller-defined candidate lists, bred with
//! tournament selection, uniform crossover, single-slot mutation and elitism.
//! [`ga_best`] instantiates it for one layer's map space, with a repair step
//! that shrinks tile genes until the tile fits the buffer, so every evaluated
//! individual is a legal mapping.
//!
//! Everything is driven by a ChaCha stream cipher seeded explicitly, so runs
//! are reproducible bit-for-bit on any platform.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::accel::AcceleratorSpec;
use crate::cost::{evaluate, CostReport, EnergyParams, Objective};
use crate::mapping::{fits_buffer, footprint, Mapping};
use crate::mapspace::SearchDomains;
use crate::workload::{Dim, DimVals, Layer};

/// Search-budget and operator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    /// Individuals per generation.
    pub population: usize,
    /// Number of generations, counting the initial random one.
    pub generations: usize,
    /// Probability that a child mixes in a second parent (uniform crossover).
    pub crossover_rate: f64,
    /// Probability that a child gets one gene re-rolled.
    pub mutation_rate: f64,
    /// Best individuals copied unchanged (and not re-evaluated).
    pub elite: usize,
    /// Individuals drawn per tournament pick.
    pub tournament: usize,
}

impl Default for GaConfig {
    fn default() -> GaConfig {
        GaConfig {
            population: 100,
            generations: 100,
            crossover_rate: 0.5,
            mutation_rate: 0.5,
            elite: 5,
            tournament: 2,
        }
    }
}

/// Invalid [`GaConfig`] parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaConfigError {
    ZeroPopulation,
    ZeroGenerations,
    EliteTooLarge,
    ZeroTournament,
    BadRate,
}

impl core::fmt::Display for GaConfigError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GaConfigError::ZeroPopulation => f.write_str("population must be at least 1"),
            GaConfigError::ZeroGenerations => f.write_str("generations must be at least 1"),
            GaConfigError::EliteTooLarge => f.write_str("elite must be smaller than population"),
            GaConfigError::ZeroTournament => f.write_str("tournament must be at least 1"),
            GaConfigError::BadRate => f.write_str("rates must lie in [0, 1]"),
        }
    }
}

impl GaConfig {
    /// Checks the parameters are usable.
    pub fn validate(&self) -> Result<(), GaConfigError> {
        if self.population == 0 {
            return Err(GaConfigError::ZeroPopulation);
        }
        if self.generations == 0 {
            return Err(GaConfigError::ZeroGenerations);
        }
        if self.elite >= self.population {
            return Err(GaConfigError::EliteTooLarge);
        }
        if self.tournament == 0 {
            return Err(GaConfigError::ZeroTournament);
        }
        for rate in [self.crossover_rate, self.mutation_rate] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(GaConfigError::BadRate);
            }
        }
        Ok(())
    }

    /// Exact number of fitness evaluations a run performs: the initial
    /// population plus, per later generation, everything but the elites.
    pub fn budget(&self) -> u64 {
        self.population as u64
            + (self.generations as u64 - 1) * (self.population - self.elite) as u64
    }
}

/// Raw engine result.
#[derive(Debug, Clone, PartialEq)]
pub struct GaRun {
    /// Best genome seen across all generations.
    pub best_genome: Vec<usize>,
    /// Its fitness value.
    pub best_value: f64,
    /// Best value after each generation; never increases.
    pub history: Vec<f64>,
    /// Fitness evaluations performed; equals [`GaConfig::budget`].
    pub evaluations: u64,
}

#[derive(Clone)]
struct Individual {
    genome: Vec<usize>,
    value: f64,
}

fn better(a: &Individual, b: &Individual) -> bool {
    a.value < b.value || (a.value == b.value && a.genome < b.genome)
}

/// Minimizes `fitness` over genomes with `sizes[i]` choices per slot.
///
/// `repair` may adjust a freshly bred genome before evaluation (it must keep
/// every index within its domain). Lower fitness is better; ties are broken
/// by genome order so results are reproducible.
pub fn run_integer_ga(
    sizes: &[usize],
    config: &GaConfig,
    seed: u64,
    repair: &dyn Fn(&mut [usize], &mut ChaCha12Rng),
    fitness: &mut dyn FnMut(&[usize]) -> f64,
) -> GaRun {
    debug_assert_eq!(config.validate(), Ok(()));
    debug_assert!(sizes.iter().all(|&s| s >= 1));
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut evaluations = 0u64;
    let mut spawn = |rng: &mut ChaCha12Rng, evaluations: &mut u64, genome: Vec<usize>| {
        let mut genome = genome;
        repair(&mut genome, rng);
        *evaluations += 1;
        let value = fitness(&genome);
        Individual { genome, value }
    };

    let mut population: Vec<Individual> = (0..config.population)
        .map(|_| {
            let genome = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
            spawn(&mut rng, &mut evaluations, genome)
        })
        .collect();

    let mut best = population
        .iter()
        .fold(None::<Individual>, |acc, ind| match acc {
            Some(b) if better(&b, ind) => Some(b),
            _ => Some(ind.clone()),
        })
        .expect("population is nonempty");
    let mut history = Vec::with_capacity(config.generations);
    history.push(best.value);

    for _ in 1..config.generations {
        // Elites survive unchanged, keeping their cached values.
        let mut ranked: Vec<usize> = (0..population.len()).collect();
        ranked.sort_by(|&a, &b| {
            if better(&population[a], &population[b]) {
                core::cmp::Ordering::Less
            } else if better(&population[b], &population[a]) {
                core::cmp::Ordering::Greater
            } else {
                core::cmp::Ordering::Equal
            }
        });
        let mut next: Vec<Individual> = ranked[..config.elite]
            .iter()
            .map(|&i| population[i].clone())
            .collect();

        let tournament = |rng: &mut ChaCha12Rng, population: &[Individual]| -> Vec<usize> {
            let mut pick = rng.gen_range(0..population.len());
            for _ in 1..config.tournament {
                let other = rng.gen_range(0..population.len());
                if better(&population[other], &population[pick]) {
                    pick = other;
                }
            }
            population[pick].genome.clone()
        };

        while next.len() < config.population {
            let mut child = tournament(&mut rng, &population);
            if rng.gen::<f64>() < config.crossover_rate {
                let other = tournament(&mut rng, &population);
                for (slot, gene) in child.iter_mut().zip(other) {
                    if rng.gen::<bool>() {
                        *slot = gene;
                    }
                }
            }
            if rng.gen::<f64>() < config.mutation_rate {
                let slot = rng.gen_range(0..sizes.len());
                child[slot] = rng.gen_range(0..sizes[slot]);
            }
            next.push(spawn(&mut rng, &mut evaluations, child));
        }
        population = next;

        for ind in &population {
            if better(ind, &best) {
                best = ind.clone();
            }
        }
        history.push(best.value);
    }

    GaRun {
        best_genome: best.genome,
        best_value: best.value,
        history,
        evaluations,
    }
}

/// Result of a genetic map-space search for one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GaSearchOutcome {
    /// Best legal mapping found.
    pub best: Mapping,
    /// Its objective value.
    pub best_value: f64,
    /// Its full cost report.
    pub report: CostReport,
    /// Best value after each generation; never increases.
    pub history: Vec<f64>,
    /// Fitness evaluations performed.
    pub evaluations: u64,
}

/// Genome layout: six tile indices, then order, parallel pair, shape.
fn genome_sizes(domains: &SearchDomains) -> [usize; 9] {
    [
        domains.tile_lists[0].len(),
        domains.tile_lists[1].len(),
        domains.tile_lists[2].len(),
        domains.tile_lists[3].len(),
        domains.tile_lists[4].len(),
        domains.tile_lists[5].len(),
        domains.orders.len(),
        domains.pairs.len(),
        domains.shapes.len(),
    ]
}

fn decode(domains: &SearchDomains, genome: &[usize]) -> Mapping {
    let mut tiles = DimVals::splat(1);
    for (i, d) in Dim::ALL.into_iter().enumerate() {
        tiles[d] = domains.tile_lists[i][genome[i]];
    }
    Mapping {
        tiles,
        order: domains.orders[genome[6]],
        parallel: domains.pairs[genome[7]],
        shape: domains.shapes[genome[8]],
    }
}

fn tiles_fit(layer: &Layer, accel: &AcceleratorSpec, domains: &SearchDomains, genome: &[usize]) -> bool {
    let mut tiles = DimVals::splat(1);
    for (i, d) in Dim::ALL.into_iter().enumerate() {
        tiles[d] = domains.tile_lists[i][genome[i]];
    }
    match footprint(layer, &tiles) {
        Ok(fp) => fits_buffer(fp, accel.buffer.size, &accel.buffer.partitioning).is_ok(),
        Err(_) => false,
    }
}

/// Shrinks tile genes until the tile fits the buffer, stepping through the
/// dimensions in a freshly shuffled order so repairs don't always squash the
/// same dimension.
fn repair_tiles(
    layer: &Layer,
    accel: &AcceleratorSpec,
    domains: &SearchDomains,
    genome: &mut [usize],
    rng: &mut ChaCha12Rng,
) {
    if tiles_fit(layer, accel, domains, genome) {
        return;
    }
    let mut dims: [usize; 6] = [0, 1, 2, 3, 4, 5];
    dims.shuffle(rng);
    let mut cursor = 0;
    while !tiles_fit(layer, accel, domains, genome) {
        let mut stepped = false;
        for _ in 0..6 {
            let d = dims[cursor % 6];
            cursor += 1;
            if genome[d] > 0 {
                genome[d] -= 1;
                stepped = true;
                break;
            }
        }
        if !stepped {
            // Every tile gene is already at its smallest candidate; with
            // validated specs that tuple always fits.
            debug_assert!(tiles_fit(layer, accel, domains, genome));
            return;
        }
    }
}

/// Runs the genetic search over the feasible map space of `layer` on `accel`.
///
/// Returns `None` if no tile tuple fits the buffer (only possible when the
/// tile axis is pinned to a baseline that a hard-partitioned buffer cannot
/// hold). The same seed always returns the same outcome.
pub fn ga_best(
    layer: &Layer,
    accel: &AcceleratorSpec,
    objective: Objective,
    energy: &EnergyParams,
    config: &GaConfig,
    seed: u64,
) -> Option<GaSearchOutcome> {
    let domains = SearchDomains::feasible(layer, accel);
    if domains.tile_count(layer, accel) == 0 {
        return None;
    }
    let sizes = genome_sizes(&domains);
    let mut fitness = |genome: &[usize]| {
        let m = decode(&domains, genome);
        objective.value(&evaluate(layer, accel, &m, energy))
    };
    let repair = |genome: &mut [usize], rng: &mut ChaCha12Rng| {
        repair_tiles(layer, accel, &domains, genome, rng);
    };
    let run = run_integer_ga(&sizes, config, seed, &repair, &mut fitness);
    let best = decode(&domains, &run.best_genome);
    let report = evaluate(layer, accel, &best, energy);
    Some(GaSearchOutcome {
        best,
        best_value: run.best_value,
        report,
        history: run.history,
        evaluations: run.evaluations,
    })
}

/// Draws one uniformly random genome, repairs it, and returns the resulting
/// legal mapping. Useful for sampling map spaces.
pub fn random_mapping(
    layer: &Layer,
    accel: &AcceleratorSpec,
    seed: u64,
) -> Option<Mapping> {
    let domains = SearchDomains::feasible(layer, accel);
    if domains.tile_count(layer, accel) == 0 {
        return None;
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let sizes = genome_sizes(&domains);
    let mut genome: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
    repair_tiles(layer, accel, &domains, &mut genome, &mut rng);
    Some(decode(&domains, &genome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mapping::is_legal;
    use crate::oracle::exhaustive_best;

    fn small_config() -> GaConfig {
        GaConfig {
            population: 20,
            generations: 10,
            elite: 2,
            ..GaConfig::default()
        }
    }

    #[test]
    fn config_budget_is_exact() {
        let c = small_config();
        assert_eq!(c.budget(), 20 + 9 * 18);
        assert_eq!(GaConfig::default().budget(), 100 + 99 * 95);
        assert!(GaConfig::default().budget() <= 10_000);
    }

    #[test]
    fn config_rejects_nonsense() {
        let mut c = GaConfig::default();
        c.elite = c.population;
        assert_eq!(c.validate(), Err(GaConfigError::EliteTooLarge));
        let mut c = GaConfig::default();
        c.mutation_rate = 1.5;
        assert_eq!(c.validate(), Err(GaConfigError::BadRate));
    }

    #[test]
    fn same_seed_reproduces_the_run_exactly() {
        let layer = Layer::conv2d("c", [4, 2, 6, 1, 3, 1], 1);
        let accel = fixtures::tiny_accel_fullflex();
        let ep = EnergyParams::default();
        let a = ga_best(&layer, &accel, Objective::Edp, &ep, &small_config(), 7).unwrap();
        let b = ga_best(&layer, &accel, Objective::Edp, &ep, &small_config(), 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, small_config().budget());
        assert_eq!(a.history.len(), small_config().generations);
    }

    #[test]
    fn history_never_increases() {
        let layer = Layer::conv2d("c", [4, 2, 6, 1, 3, 1], 1);
        let accel = fixtures::tiny_accel_fullflex();
        let out = ga_best(
            &layer,
            &accel,
            Objective::Energy,
            &EnergyParams::default(),
            &small_config(),
            3,
        )
        .unwrap();
        for pair in out.history.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        assert_eq!(out.best_value, *out.history.last().unwrap());
    }

    #[test]
    fn every_sampled_mapping_is_legal() {
        let layer = Layer::conv2d("c", [4, 2, 6, 1, 3, 1], 1);
        for accel in [
            fixtures::tiny_accel_fullflex(),
            fixtures::tiny_accel_fullflex_tile(),
            fixtures::tiny_accel_partflex_tile_hard(),
            fixtures::tiny_accel_partflex_order(),
            fixtures::tiny_accel_inflex(),
        ] {
            for seed in 0..50 {
                let m = random_mapping(&layer, &accel, seed).unwrap();
                assert_eq!(is_legal(&layer, &accel, &m), Ok(()), "{}", accel.name);
            }
        }
    }

    #[test]
    fn ga_finds_the_optimum_of_a_small_space() {
        // 48 tile tuples, nothing else free: the GA must hit the exhaustive
        // optimum with a tiny budget.
        let layer = Layer::conv2d("c", [4, 2, 6, 1, 3, 1], 1);
        let accel = fixtures::tiny_accel_fullflex_tile();
        let ep = EnergyParams::default();
        let truth = exhaustive_best(&layer, &accel, Objective::Edp, &ep).unwrap();
        let ga = ga_best(&layer, &accel, Objective::Edp, &ep, &small_config(), 11).unwrap();
        assert_eq!(ga.best_value, truth.best_value);
    }

    #[test]
    fn pinned_machines_return_the_baseline_immediately() {
        let layer = Layer::conv2d("c", [4, 2, 6, 1, 3, 1], 1);
        let accel = fixtures::tiny_accel_inflex();
        let config = GaConfig {
            population: 4,
            generations: 2,
            elite: 1,
            ..GaConfig::default()
        };
        let out = ga_best(
            &layer,
            &accel,
            Objective::Runtime,
            &EnergyParams::default(),
            &config,
            0,
        )
        .unwrap();
        assert_eq!(out.best, crate::mapping::clamp_baseline(&layer, &accel));
    }
}
