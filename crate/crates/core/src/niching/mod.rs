//! Steady-state niching EAs (restricted tournament selection with and
//! without mating restriction, and the (μ;1+1)-EA) plus an idealized niching
//! GA that clusters its population by true nearest peak.
//!
//! All algorithms skip evaluations that carry no information: offspring
//! identical to a parent inherit its stored fitness, and a child identical to
//! the member it would compete with is discarded unevaluated.

mod idealized;
mod mu;
pub mod operators;
mod rts;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::instance::{EvalCounter, Goal, ProblemInstance};
use crate::record::RunRecord;

pub use idealized::{idealized_population_size, idealized_step, partition_by_nearest_peak};
pub use mu::mu_1p1_step;
pub use rts::{rts_mr_step, rts_step};

/// Minimum Hamming distance between mates under mating restriction.
pub const MATE_MIN_DISTANCE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rts,
    RtsMr,
    #[serde(rename = "mu_1p1")]
    Mu1p1,
    Idealized,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Rts => "rts",
            Algorithm::RtsMr => "rts_mr",
            Algorithm::Mu1p1 => "mu_1p1",
            Algorithm::Idealized => "idealized",
        }
    }

    /// Record identifier at crossover rate `pc`. The mutation-only EA
    /// ignores `pc`.
    pub fn label(self, pc: f64) -> String {
        match self {
            Algorithm::Mu1p1 => self.to_string(),
            _ => format!("{self}_pc{pc}"),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rts" => Ok(Algorithm::Rts),
            "rts_mr" | "rts-mr" => Ok(Algorithm::RtsMr),
            "mu_1p1" | "mu1p1" | "mu-1p1" => Ok(Algorithm::Mu1p1),
            "idealized" => Ok(Algorithm::Idealized),
            other => Err(Error::param(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EAConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Members scanned for similarity (RTS, RTS-MR).
    pub window_size: usize,
    /// Tournament size (idealized only).
    pub tournament_size: usize,
}

impl EAConfig {
    /// Defaults for an instance: mutation `1/L`, window `min(4n, N)`,
    /// binary tournaments.
    pub fn for_instance(
        algorithm: Algorithm,
        population_size: usize,
        crossover_rate: f64,
        inst: &ProblemInstance,
    ) -> Self {
        EAConfig {
            algorithm,
            population_size,
            crossover_rate,
            mutation_rate: 1.0 / inst.length() as f64,
            window_size: (4 * inst.n()).min(population_size),
            tournament_size: 2,
        }
    }

    /// Stable label, e.g. `rts_mr_pc0.5`.
    pub fn label(&self) -> String {
        self.algorithm.label(self.crossover_rate)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.population_size;
        if n < 2 {
            return Err(Error::Config(format!("population size {n} must be at least 2")));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::Config(format!(
                "crossover rate {} outside [0, 1]",
                self.crossover_rate
            )));
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate <= 1.0) {
            return Err(Error::Config(format!(
                "mutation rate {} outside (0, 1]",
                self.mutation_rate
            )));
        }
        if matches!(self.algorithm, Algorithm::Rts | Algorithm::RtsMr)
            && (self.window_size == 0 || self.window_size > n)
        {
            return Err(Error::Config(format!(
                "window size {} must be in 1..={n}",
                self.window_size
            )));
        }
        if self.algorithm == Algorithm::Idealized && self.tournament_size == 0 {
            return Err(Error::Config("tournament size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: BitString,
    /// Value returned by the evaluation that produced this genome.
    pub fitness: f64,
}

/// Why a run stopped mid-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    GoalReached,
    BudgetExhausted,
}

/// Per-run search state: the instance, the run's random stream, its
/// evaluation counter and the set of peaks reached so far.
///
/// Every evaluation goes through [`Search::evaluate`], which notes any peak
/// the evaluated genome sits on and halts as soon as the goal holds.
pub struct Search<'a> {
    inst: &'a ProblemInstance,
    pub rng: ChaCha8Rng,
    pub counter: EvalCounter,
    goal: Option<Goal>,
    found: BTreeSet<usize>,
    perm: Vec<usize>,
}

impl<'a> Search<'a> {
    pub fn new(inst: &'a ProblemInstance, seed: u64, budget: Option<u64>, goal: Option<Goal>) -> Self {
        Search {
            inst,
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: budget.map_or_else(EvalCounter::unlimited, EvalCounter::with_budget),
            goal,
            found: BTreeSet::new(),
            perm: Vec::new(),
        }
    }

    pub fn instance(&self) -> &'a ProblemInstance {
        self.inst
    }

    pub fn found(&self) -> &BTreeSet<usize> {
        &self.found
    }

    pub fn evals(&self) -> u64 {
        self.counter.count()
    }

    pub fn evaluate(&mut self, x: &BitString) -> Result<f64, Halt> {
        let e = self
            .inst
            .assess(x, &mut self.rng, &mut self.counter)
            .map_err(|_| Halt::BudgetExhausted)?;
        if e.distance == 0 {
            self.found.extend(self.inst.peaks_at(x));
            if let Some(goal) = self.goal {
                if self.inst.goal_reached(&self.found, goal) {
                    return Err(Halt::GoalReached);
                }
            }
        }
        Ok(e.fitness)
    }

    /// [`most_similar_scan`] using this run's stream.
    pub fn most_similar(
        &mut self,
        pop: &[Individual],
        target: &BitString,
        w: usize,
        min_dist: usize,
    ) -> Result<Option<usize>> {
        scan_window(pop, target, w, &mut self.rng, min_dist, &mut self.perm)
    }

    /// `size` uniformly random individuals, each evaluated once.
    pub fn random_population(&mut self, size: usize) -> Result<Vec<Individual>, Halt> {
        let len = self.inst.length();
        (0..size)
            .map(|_| {
                let genome = BitString::random(len, &mut self.rng);
                let fitness = self.evaluate(&genome)?;
                Ok(Individual { genome, fitness })
            })
            .collect()
    }
}

/// Scans `w` members drawn without replacement and returns the index of the
/// one closest to `target` among those at distance at least `min_dist`.
/// Ties are broken uniformly at random; `None` if nothing qualifies.
pub fn most_similar_scan<R: Rng + ?Sized>(
    pop: &[Individual],
    target: &BitString,
    w: usize,
    rng: &mut R,
    min_dist: usize,
) -> Result<Option<usize>> {
    let mut perm = Vec::new();
    scan_window(pop, target, w, rng, min_dist, &mut perm)
}

/// [`most_similar_scan`] drawing the window by a partial Fisher-Yates
/// shuffle of `perm`, which is kept as a permutation of `0..pop.len()`
/// between calls. A window covering the whole population is scanned in
/// place.
fn scan_window<R: Rng + ?Sized>(
    pop: &[Individual],
    target: &BitString,
    w: usize,
    rng: &mut R,
    min_dist: usize,
    perm: &mut Vec<usize>,
) -> Result<Option<usize>> {
    let size = pop.len();
    if w > size {
        return Err(Error::param(format!("window {w} larger than population {size}")));
    }
    let mut best: Option<usize> = None;
    let mut best_dist = usize::MAX;
    let mut ties = 0u32;
    let mut consider = |i: usize, rng: &mut R| {
        let d = pop[i].genome.hamming_distance(target);
        if d < min_dist || d > best_dist {
            return;
        }
        if d < best_dist {
            best_dist = d;
            best = Some(i);
            ties = 1;
        } else {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best = Some(i);
            }
        }
    };
    if w == size {
        for i in 0..size {
            consider(i, rng);
        }
    } else {
        if perm.len() != size {
            *perm = (0..size).collect();
        }
        for k in 0..w {
            let j = rng.random_range(k..size);
            perm.swap(k, j);
            consider(perm[k], rng);
        }
    }
    Ok(best)
}

/// Advances `pop` by one step (one generation for the idealized GA).
pub fn step(pop: &mut Vec<Individual>, search: &mut Search<'_>, config: &EAConfig) -> Result<(), Halt> {
    match config.algorithm {
        Algorithm::Rts => rts_step(pop, search, config),
        Algorithm::RtsMr => rts_mr_step(pop, search, config),
        Algorithm::Mu1p1 => mu_1p1_step(pop, search, config),
        Algorithm::Idealized => idealized_step(pop, search, config),
    }
}

/// Runs an EA from a uniformly random population until `goal` holds or
/// `budget` evaluations are spent. Initialization counts against the budget.
pub fn run_ea(
    inst: &ProblemInstance,
    config: &EAConfig,
    goal: Goal,
    budget: u64,
    run_seed: u64,
) -> Result<RunRecord> {
    config.validate()?;
    if budget < config.population_size as u64 {
        return Err(Error::Config(format!(
            "budget {budget} cannot evaluate an initial population of {}",
            config.population_size
        )));
    }
    let mut search = Search::new(inst, run_seed, Some(budget), Some(goal));
    let mut steps = 0u64;
    let halt = match search.random_population(config.population_size) {
        Err(h) => h,
        Ok(mut pop) => loop {
            steps += 1;
            if let Err(h) = step(&mut pop, &mut search, config) {
                break h;
            }
        },
    };
    Ok(RunRecord {
        algorithm_id: config.label(),
        instance: inst.reference(),
        goal,
        run_index: 0,
        run_seed,
        evals: search.evals(),
        restarts_or_generations: steps,
        success: halt == Halt::GoalReached,
        peaks_found: search.found.clone(),
        budget,
        population_size: Some(config.population_size),
    })
}
