use rand::Rng;

use super::operators::{mutate, uniform_crossover};
use super::{EAConfig, Halt, Individual, Search, MATE_MIN_DISTANCE};
use crate::bitstring::BitString;

/// Restricted tournament selection: two random parents, crossover and
/// mutation, and each child competes with the most similar of `w` scanned
/// members, replacing it only when strictly fitter.
pub fn rts_step(pop: &mut [Individual], search: &mut Search<'_>, config: &EAConfig) -> Result<(), Halt> {
    let size = pop.len();
    let a = search.rng.random_range(0..size);
    let b = (a + search.rng.random_range(1..size)) % size;
    let (pa, pb) = (pop[a].clone(), pop[b].clone());
    breed_and_compete(pop, search, config, &pa, Some(&pb))
}

/// RTS with mating restriction: the mate is the most similar scanned member
/// at Hamming distance at least 2. Without a qualifying mate the parent is
/// only mutated. With a zero crossover rate this is exactly [`rts_step`].
pub fn rts_mr_step(
    pop: &mut [Individual],
    search: &mut Search<'_>,
    config: &EAConfig,
) -> Result<(), Halt> {
    if config.crossover_rate == 0.0 {
        return rts_step(pop, search, config);
    }
    let a = search.rng.random_range(0..pop.len());
    let pa = pop[a].clone();
    let mate = search
        .most_similar(pop, &pa.genome, config.window_size, MATE_MIN_DISTANCE)
        .expect("window validated against population size");
    match mate {
        Some(b) => {
            let pb = pop[b].clone();
            breed_and_compete(pop, search, config, &pa, Some(&pb))
        }
        None => breed_and_compete(pop, search, config, &pa, None),
    }
}

fn breed_and_compete(
    pop: &mut [Individual],
    search: &mut Search<'_>,
    config: &EAConfig,
    pa: &Individual,
    pb: Option<&Individual>,
) -> Result<(), Halt> {
    let mut children: Vec<BitString> = match pb {
        Some(pb) => {
            if search.rng.random::<f64>() < config.crossover_rate {
                let (c1, c2) = uniform_crossover(&pa.genome, &pb.genome, &mut search.rng);
                vec![c1, c2]
            } else {
                vec![pa.genome.clone(), pb.genome.clone()]
            }
        }
        None => vec![pa.genome.clone()],
    };
    for child in &mut children {
        mutate(child, config.mutation_rate, &mut search.rng);
    }

    for child in children {
        let inherited = if child == pa.genome {
            Some(pa.fitness)
        } else {
            pb.filter(|p| p.genome == child).map(|p| p.fitness)
        };
        let rival = search
            .most_similar(pop, &child, config.window_size, 0)
            .expect("window validated against population size")
            .expect("zero distance floor always qualifies");
        if pop[rival].genome == child {
            continue;
        }
        let fitness = match inherited {
            Some(f) => f,
            None => search.evaluate(&child)?,
        };
        if fitness > pop[rival].fitness {
            pop[rival] = Individual {
                genome: child,
                fitness,
            };
        }
    }
    Ok(())
}
