use rand::Rng;

use super::operators::mutate;
use super::{EAConfig, Halt, Individual, Search};

/// (μ;1+1)-EA: a random member is mutated and the mutant takes its slot only
/// when strictly fitter. An unchanged mutant costs nothing.
pub fn mu_1p1_step(
    pop: &mut [Individual],
    search: &mut Search<'_>,
    config: &EAConfig,
) -> Result<(), Halt> {
    let a = search.rng.random_range(0..pop.len());
    let mut child = pop[a].genome.clone();
    if mutate(&mut child, config.mutation_rate, &mut search.rng) == 0 {
        return Ok(());
    }
    let fitness = search.evaluate(&child)?;
    if fitness > pop[a].fitness {
        pop[a] = Individual {
            genome: child,
            fitness,
        };
    }
    Ok(())
}
