//! Minimal population size by doubling and bisection.
//!
//! Starting from an initial size, the population is doubled until a trial of
//! independent runs meets the success criterion. The bracket `(N/2, N]` is
//! then narrowed by bisection until its relative width falls under a
//! threshold. The runs of the trial that last set the upper end are returned
//! as the measurement sample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::RunRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BisectionConfig {
    pub initial_size: usize,
    pub runs_per_trial: usize,
    pub successes_required: usize,
    /// Stop once `(high - low) / high` is at most this.
    pub relative_threshold: f64,
    pub eval_budget: u64,
    pub repetitions: usize,
    /// Largest population size the doubling phase may try.
    pub ceiling: usize,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            initial_size: 4,
            runs_per_trial: 100,
            successes_required: 100,
            relative_threshold: 0.1,
            eval_budget: 5_000_000,
            repetitions: 30,
            ceiling: 1 << 20,
        }
    }
}

impl BisectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_size < 2 {
            return Err(Error::Config(format!(
                "initial population size {} must be at least 2",
                self.initial_size
            )));
        }
        if self.runs_per_trial == 0 || self.successes_required == 0 {
            return Err(Error::Config("trials need at least one run and one success".into()));
        }
        if self.successes_required > self.runs_per_trial {
            return Err(Error::Config(format!(
                "{} successes required from {} runs",
                self.successes_required, self.runs_per_trial
            )));
        }
        if !(self.relative_threshold > 0.0 && self.relative_threshold < 1.0) {
            return Err(Error::Config(format!(
                "relative threshold {} outside (0, 1)",
                self.relative_threshold
            )));
        }
        if self.eval_budget == 0 || self.repetitions == 0 {
            return Err(Error::Config("budget and repetitions must be positive".into()));
        }
        if self.ceiling < self.initial_size {
            return Err(Error::Config(format!(
                "ceiling {} below initial size {}",
                self.ceiling, self.initial_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Doubling,
    Bisection,
}

/// One row of the bracket trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub phase: Phase,
    pub population_size: usize,
    pub passed: bool,
    pub runs_executed: usize,
    pub successes: usize,
    /// Bracket after this trial; `low` is 0 during doubling.
    pub low: usize,
    pub high: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub population_size: usize,
    pub passed: bool,
    pub runs: Vec<RunRecord>,
}

impl Trial {
    pub fn successes(&self) -> usize {
        self.runs.iter().filter(|r| r.success).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bisection {
    pub population_size: usize,
    pub measurement_runs: Vec<RunRecord>,
    pub trace: Vec<TrialSummary>,
}

/// Runs up to `runs_per_trial` runs at `size`; `run(size, i)` performs the
/// `i`-th run and is expected to derive its own seed from both arguments.
///
/// Stops early once the remaining runs can no longer reach
/// `successes_required`.
pub fn trial<F>(size: usize, cfg: &BisectionConfig, run: &mut F) -> Result<Trial>
where
    F: FnMut(usize, u64) -> Result<RunRecord>,
{
    if size < 2 {
        return Err(Error::param(format!("population size {size} must be at least 2")));
    }
    let allowed_failures = cfg.runs_per_trial - cfg.successes_required;
    let mut runs = Vec::with_capacity(cfg.runs_per_trial);
    let mut failures = 0;
    for i in 0..cfg.runs_per_trial {
        let rec = run(size, i as u64)?;
        if !rec.success {
            failures += 1;
        }
        runs.push(rec);
        if failures > allowed_failures {
            return Ok(Trial {
                population_size: size,
                passed: false,
                runs,
            });
        }
    }
    Ok(Trial {
        population_size: size,
        passed: true,
        runs,
    })
}

/// Smallest population size meeting the success criterion, up to the
/// bisection tolerance. Fails with [`Error::Infeasible`] when doubling
/// passes the ceiling.
pub fn bisect<F>(cfg: &BisectionConfig, run: F) -> Result<Bisection>
where
    F: FnMut(usize, u64) -> Result<RunRecord>,
{
    let mut trace = Vec::new();
    let (population_size, measurement_runs) = bisect_traced(cfg, run, &mut trace)?;
    Ok(Bisection {
        population_size,
        measurement_runs,
        trace,
    })
}

/// [`bisect`] appending one row per trial to `trace`, which is kept when
/// sizing fails.
pub fn bisect_traced<F>(
    cfg: &BisectionConfig,
    mut run: F,
    trace: &mut Vec<TrialSummary>,
) -> Result<(usize, Vec<RunRecord>)>
where
    F: FnMut(usize, u64) -> Result<RunRecord>,
{
    cfg.validate()?;
    let summary = |t: &Trial, phase, low, high| TrialSummary {
        phase,
        population_size: t.population_size,
        passed: t.passed,
        runs_executed: t.runs.len(),
        successes: t.successes(),
        low,
        high,
    };

    let mut size = cfg.initial_size;
    let passing = loop {
        let t = trial(size, cfg, &mut run)?;
        let high = t.passed.then_some(size);
        trace.push(summary(&t, Phase::Doubling, 0, high));
        if t.passed {
            break t;
        }
        match size.checked_mul(2) {
            Some(next) if next <= cfg.ceiling => size = next,
            _ => return Err(Error::Infeasible { ceiling: cfg.ceiling }),
        }
    };
    if size == cfg.initial_size {
        return Ok((size, passing.runs));
    }

    let (mut low, mut high) = (size / 2, size);
    let mut measurement = passing.runs;
    while high - low > 1 && (high - low) as f64 / high as f64 > cfg.relative_threshold {
        let mid = (low + high).div_ceil(2);
        let t = trial(mid, cfg, &mut run)?;
        if t.passed {
            high = mid;
        } else {
            low = mid;
        }
        trace.push(summary(&t, Phase::Bisection, low, Some(high)));
        if t.passed {
            measurement = t.runs;
        }
    }
    Ok((high, measurement))
}
