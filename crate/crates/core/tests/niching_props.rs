use peakbench::niching::{
    idealized_population_size, partition_by_nearest_peak, run_ea, step, Algorithm, EAConfig,
    Individual, Search,
};
use peakbench::{BitString, Goal, HeightMode, ProblemInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALL: [Algorithm; 4] = [
    Algorithm::Rts,
    Algorithm::RtsMr,
    Algorithm::Mu1p1,
    Algorithm::Idealized,
];

fn config(alg: Algorithm, size: usize, pc: f64, pm: f64, w: usize) -> EAConfig {
    EAConfig {
        algorithm: alg,
        population_size: size,
        crossover_rate: pc,
        mutation_rate: pm,
        window_size: w,
        tournament_size: 2,
    }
}

/// Steps a fresh population `steps` times without a goal, returning the
/// population and the evaluations spent after initialization.
fn evolve(
    inst: &ProblemInstance,
    cfg: &EAConfig,
    steps: usize,
    seed: u64,
    mut check: impl FnMut(&[Individual], &[Individual]),
) -> (Vec<Individual>, u64) {
    let mut search = Search::new(inst, seed, None, None);
    let mut pop = search.random_population(cfg.population_size).unwrap();
    let init = search.evals();
    assert_eq!(init, cfg.population_size as u64);
    for _ in 0..steps {
        let before = pop.clone();
        step(&mut pop, &mut search, cfg).unwrap();
        assert_eq!(pop.len(), cfg.population_size);
        check(&before, &pop);
    }
    (pop, search.evals() - init)
}

#[test]
fn unchanged_children_cost_nothing() {
    // Without variation every child copies a parent. It either lands on an
    // identical rival and is skipped, or inherits the parent's fitness.
    let inst = ProblemInstance::generate(50, 4, HeightMode::Linear, 1).unwrap();
    for alg in ALL {
        for w in [1, 3, 16] {
            let mut cfg = config(alg, 16, 0.0, 1e-300, w);
            if alg == Algorithm::Idealized {
                cfg.crossover_rate = 0.0;
            }
            let (_, spent) = evolve(&inst, &cfg, 500, 2, |_, _| {});
            assert_eq!(spent, 0, "{alg} w={w}");
        }
    }
}

#[test]
fn identical_parents_under_crossover_cost_nothing() {
    let inst = ProblemInstance::generate(50, 4, HeightMode::Equal, 1).unwrap();
    let mut search = Search::new(&inst, 3, None, None);
    let genome = BitString::random(50, &mut search.rng);
    let fitness = search.evaluate(&genome).unwrap();
    let mut pop = vec![Individual { genome, fitness }; 8];
    for alg in [Algorithm::Rts, Algorithm::Idealized] {
        let cfg = config(alg, 8, 1.0, 1e-300, 8);
        for _ in 0..200 {
            step(&mut pop, &mut search, &cfg).unwrap();
        }
    }
    assert_eq!(search.evals(), 1);
}

#[test]
fn every_new_genome_costs_one_evaluation() {
    // Flipping every bit of a member of a fresh random population yields a
    // genome that differs from both parents and has no copy in it.
    let inst = ProblemInstance::generate(100, 5, HeightMode::Equal, 4).unwrap();
    for (alg, per_step) in [(Algorithm::Rts, 2), (Algorithm::RtsMr, 2), (Algorithm::Mu1p1, 1)] {
        let cfg = config(alg, 30, 0.0, 1.0, 10);
        for seed in 0..200 {
            let (_, spent) = evolve(&inst, &cfg, 1, seed, |_, _| {});
            assert_eq!(spent, per_step, "{alg}");
        }
    }
}

#[test]
fn mutation_only_ea_charges_only_changed_mutants() {
    // A mutant differs from its parent with probability 1 - (1 - 1/L)^L.
    let inst = ProblemInstance::generate(100, 5, HeightMode::Equal, 6).unwrap();
    let cfg = config(Algorithm::Mu1p1, 40, 0.0, 0.01, 40);
    let steps = 40_000;
    let (_, spent) = evolve(&inst, &cfg, steps, 7, |_, _| {});
    let expected = 1.0 - 0.99f64.powi(100);
    let share = spent as f64 / steps as f64;
    assert!((share - expected).abs() < 0.01, "{share} vs {expected}");
}

#[test]
fn replacement_requires_strict_improvement() {
    let inst = ProblemInstance::generate(60, 6, HeightMode::Linear, 8).unwrap();
    for alg in [Algorithm::Rts, Algorithm::RtsMr, Algorithm::Mu1p1] {
        let cfg = config(alg, 24, 0.8, 1.0 / 60.0, 12);
        evolve(&inst, &cfg, 3000, 9, |before, after| {
            for (b, a) in before.iter().zip(after) {
                if a.genome != b.genome {
                    assert!(a.fitness > b.fitness, "{alg}");
                }
            }
        });
    }
}

#[test]
fn flat_landscape_never_changes_population() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let peaks = vec![BitString::random(40, &mut rng), BitString::random(40, &mut rng)];
    let inst = ProblemInstance::from_peaks(peaks, vec![0.0, 0.0], HeightMode::Equal).unwrap();
    for alg in [Algorithm::Rts, Algorithm::RtsMr, Algorithm::Mu1p1] {
        let cfg = config(alg, 20, 0.5, 0.05, 8);
        let mut search = Search::new(&inst, 11, None, None);
        let mut pop = search.random_population(20).unwrap();
        let start = pop.clone();
        for _ in 0..2000 {
            step(&mut pop, &mut search, &cfg).unwrap();
        }
        assert_eq!(pop, start, "{alg}");
    }
}

#[test]
fn stored_fitness_is_the_evaluated_fitness() {
    let inst = ProblemInstance::generate(60, 6, HeightMode::Equal, 12).unwrap();
    for alg in ALL {
        let cfg = config(alg, 40, 0.8, 1.0 / 60.0, 24);
        let (pop, _) = evolve(&inst, &cfg, 200, 13, |_, _| {});
        for ind in pop {
            assert_eq!(ind.fitness, inst.fitness_lowest_tie(&ind.genome).unwrap(), "{alg}");
        }
    }
}

#[test]
fn mating_restriction_without_crossover_is_rts() {
    let inst = ProblemInstance::generate(100, 10, HeightMode::Equal, 14).unwrap();
    for seed in 0..5 {
        let rts = EAConfig::for_instance(Algorithm::Rts, 60, 0.0, &inst);
        let mr = EAConfig::for_instance(Algorithm::RtsMr, 60, 0.0, &inst);
        let a = run_ea(&inst, &rts, Goal::AllPeaks, 200_000, seed).unwrap();
        let b = run_ea(&inst, &mr, Goal::AllPeaks, 200_000, seed).unwrap();
        assert_eq!(a.evals, b.evals);
        assert_eq!(a.restarts_or_generations, b.restarts_or_generations);
        assert_eq!(a.peaks_found, b.peaks_found);
        assert_eq!(a.success, b.success);
    }
}

#[test]
fn clusters_follow_nearest_peaks() {
    let inst = ProblemInstance::generate(16, 5, HeightMode::Equal, 15).unwrap();
    let mut search = Search::new(&inst, 16, None, None);
    let pop = search.random_population(500).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let groups = partition_by_nearest_peak(&pop, &inst, &mut rng);
    assert_eq!(groups.len(), 5);
    let mut members: Vec<usize> = groups.iter().flatten().copied().collect();
    members.sort_unstable();
    assert_eq!(members, (0..500).collect::<Vec<_>>());
    for (k, group) in groups.iter().enumerate() {
        for &i in group {
            let nearest = inst.nearest_peak_indices(&pop[i].genome).unwrap();
            assert!(nearest.contains(&(k + 1)));
        }
    }
}

#[test]
fn idealized_generation_breeds_half_of_each_cluster() {
    // At most floor(m/2) new evaluations per cluster of size m.
    let inst = ProblemInstance::generate(40, 3, HeightMode::Equal, 18).unwrap();
    let size = idealized_population_size(3);
    let cfg = EAConfig::for_instance(Algorithm::Idealized, size, 0.8, &inst);
    let mut search = Search::new(&inst, 19, None, None);
    let mut pop = search.random_population(size).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..10 {
        let sizes: Vec<usize> = partition_by_nearest_peak(&pop, &inst, &mut rng)
            .iter()
            .map(Vec::len)
            .collect();
        let before = search.evals();
        step(&mut pop, &mut search, &cfg).unwrap();
        let offspring: usize = sizes.iter().map(|m| m / 2).sum();
        assert!(search.evals() - before <= offspring as u64);
        assert_eq!(pop.len(), size);
    }
}

#[test]
fn goal_halts_at_the_discovering_evaluation() {
    let inst = ProblemInstance::generate(30, 2, HeightMode::Equal, 20).unwrap();
    for alg in ALL {
        let cfg = EAConfig::for_instance(alg, 40, 0.5, &inst);
        for seed in 0..10 {
            let rec = run_ea(&inst, &cfg, Goal::AllPeaks, 1_000_000, seed).unwrap();
            assert!(rec.success, "{alg} seed {seed}");
            assert_eq!(rec.peaks_found.len(), 2);
            // replaying with a budget one short must miss the goal
            let short = run_ea(&inst, &cfg, Goal::AllPeaks, rec.evals - 1, seed).unwrap();
            assert!(!short.success, "{alg} seed {seed}");
            assert_eq!(short.evals, rec.evals - 1);
        }
    }
}

#[test]
fn budget_is_never_exceeded() {
    let inst = ProblemInstance::generate(100, 40, HeightMode::Equal, 21).unwrap();
    for alg in ALL {
        let cfg = EAConfig::for_instance(alg, 50, 0.8, &inst);
        for budget in [50, 51, 997, 20_000] {
            let rec = run_ea(&inst, &cfg, Goal::AllPeaks, budget, 3).unwrap();
            assert!(!rec.success);
            assert_eq!(rec.evals, budget, "{alg}");
            assert!(rec.budget_consistent());
        }
        assert!(run_ea(&inst, &cfg, Goal::AllPeaks, 49, 3).is_err());
    }
}
