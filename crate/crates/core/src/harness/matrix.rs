use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seed::{derive_seed, instance_id, stable_id};
use super::spec::{AlgorithmSpec, ExperimentSpec};
use super::stats::CellKey;
use crate::error::{Error, Result};
use crate::hillclimb::ms_nahc;
use crate::instance::{Goal, ProblemInstance};
use crate::niching::run_ea;
use crate::record::RunRecord;
use crate::sizing::{bisect_traced, BisectionConfig, TrialSummary};

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "PEAKBENCH_WORKERS";

/// Worker count from [`WORKERS_ENV`]; `None` when unset, empty or zero.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|w| (w > 0).then_some(w))
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}={v:?} is not a worker count"))),
    }
}

/// One algorithm run. `population_size` is required for EAs.
pub fn run_once(
    inst: &ProblemInstance,
    alg: &AlgorithmSpec,
    goal: Goal,
    budget: u64,
    population_size: Option<usize>,
    run_seed: u64,
) -> Result<RunRecord> {
    match population_size {
        _ if alg.algorithm.ea().is_none() => ms_nahc(inst, goal, budget, run_seed),
        Some(size) => {
            let config = alg.ea_config(inst, size).expect("EA algorithm");
            run_ea(inst, &config, goal, budget, run_seed)
        }
        None => Err(Error::Config(format!("{} needs a population size", alg.label()))),
    }
}

/// Outcome of one bisection repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingOutcome {
    #[serde(flatten)]
    pub cell: CellKey,
    pub repetition: usize,
    /// `None` when no size up to the ceiling passed.
    pub population_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub trace: Vec<TrialSummary>,
}

/// A run that could not be executed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    #[serde(flatten)]
    pub cell: CellKey,
    pub run_index: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatrixOutput {
    /// Cells in canonical order: instances, then algorithms, then goals.
    pub cells: Vec<CellKey>,
    /// Ordered by cell, then run index.
    pub records: Vec<RunRecord>,
    pub sizing: Vec<SizingOutcome>,
    pub failures: Vec<RunFailure>,
}

struct Cell<'a> {
    key: CellKey,
    inst: &'a ProblemInstance,
    inst_id: u64,
    alg: &'a AlgorithmSpec,
    goal: Goal,
}

impl Cell<'_> {
    fn stream(&self) -> String {
        format!("{}/{}", self.key.algorithm, self.goal)
    }
}

enum Job {
    Run { cell: usize, run_index: u64 },
    Sizing { cell: usize, repetition: usize },
}

enum JobResult {
    Run(Result<RunRecord, RunFailure>),
    Sizing(Vec<RunRecord>, SizingOutcome),
}

/// Seed of run `run_index` in the bisection trial at `size` of the given
/// repetition.
fn sizing_seed(master: u64, cell: &Cell<'_>, repetition: usize, size: usize, run_index: u64) -> u64 {
    let stream = stable_id(&format!("{}/rep{repetition}/N{size}", cell.stream()));
    derive_seed(master, cell.inst_id, stream, run_index)
}

fn execute(spec: &ExperimentSpec, cells: &[Cell<'_>], bisection: &BisectionConfig, job: &Job) -> JobResult {
    match *job {
        Job::Run { cell, run_index } => {
            let c = &cells[cell];
            let seed = derive_seed(spec.master_seed, c.inst_id, stable_id(&c.stream()), run_index);
            let size = c.alg.fixed_population_size(c.inst);
            let out = run_once(c.inst, c.alg, c.goal, spec.budget, size, seed)
                .map(|mut r| {
                    r.run_index = run_index;
                    r
                })
                .map_err(|e| RunFailure {
                    cell: c.key.clone(),
                    run_index,
                    message: e.to_string(),
                });
            JobResult::Run(out)
        }
        Job::Sizing { cell, repetition } => {
            let c = &cells[cell];
            let mut trace = Vec::new();
            let sized = bisect_traced(
                bisection,
                |size, i| {
                    let seed = sizing_seed(spec.master_seed, c, repetition, size, i);
                    run_once(c.inst, c.alg, c.goal, spec.budget, Some(size), seed).map(|mut r| {
                        r.run_index = i;
                        r
                    })
                },
                &mut trace,
            );
            let base = (repetition * bisection.runs_per_trial) as u64;
            let (runs, size, error) = match sized {
                Ok((size, runs)) => (runs, Some(size), None),
                Err(e) => (Vec::new(), None, Some(e.to_string())),
            };
            let runs = runs
                .into_iter()
                .map(|mut r| {
                    r.run_index += base;
                    r
                })
                .collect();
            JobResult::Sizing(
                runs,
                SizingOutcome {
                    cell: c.key.clone(),
                    repetition,
                    population_size: size,
                    error,
                    trace,
                },
            )
        }
    }
}

/// Runs every cell of `spec` on the worker count from [`WORKERS_ENV`] (all
/// cores when unset).
pub fn run_matrix(spec: &ExperimentSpec) -> Result<MatrixOutput> {
    run_matrix_with(spec, workers_from_env()?)
}

/// Runs every cell of `spec` on `workers` threads. The output does not
/// depend on the worker count.
pub fn run_matrix_with(spec: &ExperimentSpec, workers: Option<usize>) -> Result<MatrixOutput> {
    spec.validate()?;
    let instances = spec
        .instances
        .iter()
        .map(|r| r.generate())
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    for (inst_ref, inst) in spec.instances.iter().zip(&instances) {
        for alg in &spec.algorithms {
            for &goal in &spec.goals {
                cells.push(Cell {
                    key: CellKey {
                        instance: *inst_ref,
                        algorithm: alg.label(),
                        goal,
                    },
                    inst,
                    inst_id: instance_id(inst_ref),
                    alg,
                    goal,
                });
            }
        }
    }

    let mut bisection = spec.bisection_config();
    // a population larger than the budget cannot be initialized
    bisection.ceiling = bisection
        .ceiling
        .min(usize::try_from(spec.budget).unwrap_or(usize::MAX))
        .max(bisection.initial_size);

    let mut jobs = Vec::new();
    for (i, c) in cells.iter().enumerate() {
        if c.alg.needs_sizing() {
            jobs.extend((0..spec.repetitions).map(|repetition| Job::Sizing { cell: i, repetition }));
        } else {
            jobs.extend((0..spec.runs as u64).map(|run_index| Job::Run { cell: i, run_index }));
        }
    }

    let work = || -> Vec<JobResult> {
        jobs.par_iter()
            .map(|job| execute(spec, &cells, &bisection, job))
            .collect()
    };
    let results = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?
            .install(work),
        None => work(),
    };

    let mut out = MatrixOutput {
        cells: cells.iter().map(|c| c.key.clone()).collect(),
        ..MatrixOutput::default()
    };
    for r in results {
        match r {
            JobResult::Run(Ok(rec)) => out.records.push(rec),
            JobResult::Run(Err(f)) => out.failures.push(f),
            JobResult::Sizing(runs, outcome) => {
                out.records.extend(runs);
                out.sizing.push(outcome);
            }
        }
    }
    Ok(out)
}
