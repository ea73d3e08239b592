use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::operators::{mutate, uniform_crossover};
use super::{EAConfig, Halt, Individual, Search};
use crate::instance::ProblemInstance;

/// `ceil(20·n·log2 n)`, at least 20 so a single-peak instance still has a
/// population to breed.
pub fn idealized_population_size(n: usize) -> usize {
    let n_f = n as f64;
    ((20.0 * n_f * n_f.log2()).ceil() as usize).max(20)
}

/// Groups member indices by nearest peak: `groups[k]` holds the members in
/// the basin of peak `k + 1`. Members equidistant from several peaks join
/// one of them uniformly at random.
pub fn partition_by_nearest_peak<R: Rng + ?Sized>(
    pop: &[Individual],
    inst: &ProblemInstance,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); inst.n()];
    for (i, ind) in pop.iter().enumerate() {
        let nearest = inst
            .nearest_peak_indices(&ind.genome)
            .expect("population genomes match instance length");
        let k = if nearest.len() == 1 {
            nearest[0]
        } else {
            nearest[rng.random_range(0..nearest.len())]
        };
        groups[k - 1].push(i);
    }
    groups
}

fn tournament<R: Rng + ?Sized>(pop: &[Individual], group: &[usize], size: usize, rng: &mut R) -> usize {
    let mut best = group[rng.random_range(0..group.len())];
    let mut ties = 1u32;
    for _ in 1..size {
        let c = group[rng.random_range(0..group.len())];
        match pop[c].fitness.partial_cmp(&pop[best].fitness) {
            Some(Ordering::Greater) => {
                best = c;
                ties = 1;
            }
            Some(Ordering::Equal) => {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best = c;
                }
            }
            _ => {}
        }
    }
    best
}

/// One generation of the idealized niching GA.
///
/// The population is clustered by true nearest peak and every cluster
/// evolves on its own: `floor(m/2)` offspring from binary tournaments,
/// uniform crossover and bit-flip mutation replace the worst `floor(m/2)`
/// members of a cluster of size `m`.
pub fn idealized_step(
    pop: &mut [Individual],
    search: &mut Search<'_>,
    config: &EAConfig,
) -> Result<(), Halt> {
    let inst = search.instance();
    let groups = partition_by_nearest_peak(pop, inst, &mut search.rng);
    for mut group in groups {
        let brood = group.len() / 2;
        if brood == 0 {
            continue;
        }
        let mut offspring = Vec::with_capacity(brood);
        for _ in 0..brood {
            let a = tournament(pop, &group, config.tournament_size, &mut search.rng);
            let b = tournament(pop, &group, config.tournament_size, &mut search.rng);
            let mut child = if search.rng.random::<f64>() < config.crossover_rate {
                uniform_crossover(&pop[a].genome, &pop[b].genome, &mut search.rng).0
            } else {
                pop[a].genome.clone()
            };
            mutate(&mut child, config.mutation_rate, &mut search.rng);
            let fitness = if child == pop[a].genome {
                pop[a].fitness
            } else if child == pop[b].genome {
                pop[b].fitness
            } else {
                search.evaluate(&child)?
            };
            offspring.push(Individual {
                genome: child,
                fitness,
            });
        }
        // worst first; equal fitness in random order
        group.shuffle(&mut search.rng);
        group.sort_by(|&x, &y| pop[x].fitness.total_cmp(&pop[y].fitness));
        for (slot, child) in group.into_iter().zip(offspring) {
            pop[slot] = child;
        }
    }
    Ok(())
}
