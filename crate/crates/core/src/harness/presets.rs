//! Named experiment presets.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::seed::{derive_seed, stable_id};
use super::spec::{AlgorithmKind, AlgorithmSpec, ExperimentSpec, SizingSettings, SPEC_FORMAT_VERSION};
use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::instance::{Goal, HeightMode, InstanceRef, ProblemInstance};
use crate::theory::{self, DistanceMode};

pub const PEAK_COUNTS: [usize; 5] = [20, 40, 80, 160, 320];
pub const STRING_LENGTH: usize = 100;
pub const EVAL_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    Table1,
    Table2,
    Table3,
    FigUnequalBest,
    FigEqualAll,
    FigIdealized,
}

impl PresetName {
    pub const ALL: [PresetName; 6] = [
        PresetName::Table1,
        PresetName::Table2,
        PresetName::Table3,
        PresetName::FigUnequalBest,
        PresetName::FigEqualAll,
        PresetName::FigIdealized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Table1 => "table1",
            PresetName::Table2 => "table2",
            PresetName::Table3 => "table3",
            PresetName::FigUnequalBest => "fig-unequal-best",
            PresetName::FigEqualAll => "fig-equal-all",
            PresetName::FigIdealized => "fig-idealized",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown preset {s:?}")))
    }
}

/// Knobs shared by all presets. Unset fields take the preset's default.
#[derive(Debug, Clone, Default)]
pub struct PresetOptions {
    pub master_seed: u64,
    pub peak_counts: Option<Vec<usize>>,
    pub runs: Option<usize>,
    pub budget: Option<u64>,
    pub repetitions: Option<usize>,
    /// Runs per bisection trial; all of them must succeed.
    pub runs_per_trial: Option<usize>,
}

/// Generator seed of the `n`-peak instance with the given height mode.
/// Presets sharing a master seed share instances.
pub fn preset_instance(master: u64, n: usize, mode: HeightMode) -> InstanceRef {
    InstanceRef {
        length: STRING_LENGTH,
        n,
        height_mode: mode,
        seed: derive_seed(master, stable_id("instance"), stable_id(&format!("n{n}-{mode}")), 0),
    }
}

/// The niching EAs and crossover rates compared against MS-NAHC.
pub fn niching_lineup() -> Vec<AlgorithmSpec> {
    let mut algs = vec![AlgorithmSpec::ms_nahc()];
    for pc in [0.0, 0.5, 0.8] {
        algs.push(AlgorithmSpec::ea(AlgorithmKind::Rts, pc));
    }
    for pc in [0.5, 0.8] {
        algs.push(AlgorithmSpec::ea(AlgorithmKind::RtsMr, pc));
    }
    algs.push(AlgorithmSpec {
        algorithm: AlgorithmKind::Mu1p1,
        crossover_rate: None,
        population_size: None,
    });
    algs
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Matrix(ExperimentSpec),
    Distances(DistanceStudy),
}

pub fn preset(name: PresetName, opts: &PresetOptions) -> Preset {
    let counts = |default: &[usize]| opts.peak_counts.clone().unwrap_or_else(|| default.to_vec());
    let instances = |mode, ns: Vec<usize>| -> Vec<InstanceRef> {
        ns.into_iter()
            .map(|n| preset_instance(opts.master_seed, n, mode))
            .collect()
    };
    let matrix = |name: PresetName, instances, algorithms, goals, runs| {
        let per_trial = opts.runs_per_trial.unwrap_or(30);
        Preset::Matrix(ExperimentSpec {
            format_version: SPEC_FORMAT_VERSION,
            name: name.to_string(),
            instances,
            algorithms,
            goals,
            runs: opts.runs.unwrap_or(runs),
            budget: opts.budget.unwrap_or(EVAL_BUDGET),
            master_seed: opts.master_seed,
            repetitions: opts.repetitions.unwrap_or(1),
            sizing: SizingSettings {
                runs_per_trial: per_trial,
                successes_required: per_trial,
                ..SizingSettings::default()
            },
        })
    };
    match name {
        PresetName::Table1 => matrix(
            name,
            instances(HeightMode::Equal, counts(&PEAK_COUNTS)),
            vec![AlgorithmSpec::ms_nahc()],
            vec![Goal::Peak1, Goal::AllPeaks],
            100,
        ),
        PresetName::Table3 => matrix(
            name,
            instances(HeightMode::Linear, counts(&PEAK_COUNTS)),
            vec![AlgorithmSpec::ms_nahc()],
            vec![Goal::BestPeak, Goal::AllPeaks],
            100,
        ),
        PresetName::FigUnequalBest => matrix(
            name,
            instances(HeightMode::Linear, counts(&[20])),
            niching_lineup(),
            vec![Goal::BestPeak],
            30,
        ),
        PresetName::FigEqualAll => matrix(
            name,
            instances(HeightMode::Equal, counts(&[20])),
            niching_lineup(),
            vec![Goal::AllPeaks],
            30,
        ),
        PresetName::FigIdealized => matrix(
            name,
            instances(HeightMode::Equal, counts(&PEAK_COUNTS)),
            vec![
                AlgorithmSpec::ms_nahc(),
                AlgorithmSpec {
                    algorithm: AlgorithmKind::Idealized,
                    crossover_rate: None,
                    population_size: None,
                },
            ],
            vec![Goal::AllPeaks],
            100,
        ),
        PresetName::Table2 => Preset::Distances(DistanceStudy {
            length: STRING_LENGTH,
            peak_counts: counts(&PEAK_COUNTS),
            instances_per_count: opts.repetitions.unwrap_or(10),
            samples_per_instance: opts.runs.unwrap_or(1000),
            master_seed: opts.master_seed,
        }),
    }
}

/// Distance from a random string to its nearest peak, predicted and
/// sampled, for several peak counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStudy {
    #[serde(rename = "L")]
    pub length: usize,
    pub peak_counts: Vec<usize>,
    pub instances_per_count: usize,
    pub samples_per_instance: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    #[serde(rename = "L")]
    pub length: usize,
    pub n: usize,
    /// Normal score of the sample minimum.
    pub blom_score: f64,
    pub predicted_distance: f64,
    pub sampled_distance: f64,
    pub samples: usize,
}

pub fn run_distance_study(study: &DistanceStudy) -> Result<Vec<DistanceRow>> {
    if study.instances_per_count == 0 || study.samples_per_instance == 0 {
        return Err(Error::Config("distance study needs instances and samples".into()));
    }
    study
        .peak_counts
        .iter()
        .map(|&n| {
            let mut total = 0usize;
            for k in 0..study.instances_per_count {
                let inst_seed =
                    derive_seed(study.master_seed, stable_id("distance"), n as u64, k as u64);
                let inst = ProblemInstance::generate(study.length, n, HeightMode::Equal, inst_seed)?;
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(inst_seed, 0, 0, 0));
                for _ in 0..study.samples_per_instance {
                    let x = BitString::random(study.length, &mut rng);
                    total += inst.nearest_distance(&x)?;
                }
            }
            let samples = study.instances_per_count * study.samples_per_instance;
            Ok(DistanceRow {
                length: study.length,
                n,
                blom_score: theory::blom_score(1, n)?,
                predicted_distance: theory::expected_start_distance(
                    study.length,
                    n,
                    DistanceMode::OrderStatistic,
                )?,
                sampled_distance: total as f64 / samples as f64,
                samples,
            })
        })
        .collect()
}
