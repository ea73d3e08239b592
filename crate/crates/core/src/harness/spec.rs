use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hillclimb::MS_NAHC_ID;
use crate::instance::{Goal, InstanceRef, ProblemInstance};
use crate::niching::{idealized_population_size, Algorithm, EAConfig};
use crate::sizing::BisectionConfig;

pub const SPEC_FORMAT_VERSION: u32 = 1;

/// Crossover rate of the idealized GA unless overridden.
pub const IDEALIZED_CROSSOVER_RATE: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    MsNahc,
    Rts,
    RtsMr,
    #[serde(rename = "mu_1p1")]
    Mu1p1,
    Idealized,
}

impl AlgorithmKind {
    pub fn ea(self) -> Option<Algorithm> {
        match self {
            AlgorithmKind::MsNahc => None,
            AlgorithmKind::Rts => Some(Algorithm::Rts),
            AlgorithmKind::RtsMr => Some(Algorithm::RtsMr),
            AlgorithmKind::Mu1p1 => Some(Algorithm::Mu1p1),
            AlgorithmKind::Idealized => Some(Algorithm::Idealized),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self.ea() {
            None => MS_NAHC_ID,
            Some(a) => a.as_str(),
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ms_nahc" | "ms-nahc" => Ok(AlgorithmKind::MsNahc),
            other => Ok(match other.parse::<Algorithm>()? {
                Algorithm::Rts => AlgorithmKind::Rts,
                Algorithm::RtsMr => AlgorithmKind::RtsMr,
                Algorithm::Mu1p1 => AlgorithmKind::Mu1p1,
                Algorithm::Idealized => AlgorithmKind::Idealized,
            }),
        }
    }
}

/// One algorithm column of an experiment.
///
/// EAs without a fixed `population_size` are sized per cell by bisection,
/// except the idealized GA whose size follows from the peak count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub algorithm: AlgorithmKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossover_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
}

impl AlgorithmSpec {
    pub fn ms_nahc() -> Self {
        AlgorithmSpec {
            algorithm: AlgorithmKind::MsNahc,
            crossover_rate: None,
            population_size: None,
        }
    }

    pub fn ea(algorithm: AlgorithmKind, crossover_rate: f64) -> Self {
        AlgorithmSpec {
            algorithm,
            crossover_rate: Some(crossover_rate),
            population_size: None,
        }
    }

    pub fn crossover_rate(&self) -> f64 {
        self.crossover_rate.unwrap_or(match self.algorithm {
            AlgorithmKind::Idealized => IDEALIZED_CROSSOVER_RATE,
            _ => 0.0,
        })
    }

    /// Whether population sizes for this column come from bisection.
    pub fn needs_sizing(&self) -> bool {
        self.population_size.is_none()
            && matches!(
                self.algorithm,
                AlgorithmKind::Rts | AlgorithmKind::RtsMr | AlgorithmKind::Mu1p1
            )
    }

    /// Population size on `inst` when it does not need bisection.
    pub fn fixed_population_size(&self, inst: &ProblemInstance) -> Option<usize> {
        match (self.population_size, self.algorithm) {
            (Some(size), _) => Some(size),
            (None, AlgorithmKind::Idealized) => Some(idealized_population_size(inst.n())),
            _ => None,
        }
    }

    /// EA configuration at population `size`; `None` for MS-NAHC.
    pub fn ea_config(&self, inst: &ProblemInstance, size: usize) -> Option<EAConfig> {
        let alg = self.algorithm.ea()?;
        Some(EAConfig::for_instance(alg, size, self.crossover_rate(), inst))
    }

    /// Identifier written to records, e.g. `ms_nahc` or `rts_mr_pc0.5`.
    pub fn label(&self) -> String {
        match self.algorithm.ea() {
            None => MS_NAHC_ID.to_string(),
            Some(alg) => alg.label(self.crossover_rate()),
        }
    }

    fn validate(&self, budget: u64) -> Result<()> {
        if self.algorithm == AlgorithmKind::MsNahc {
            if self.crossover_rate.is_some() || self.population_size.is_some() {
                return Err(Error::Config(
                    "ms_nahc takes neither a crossover rate nor a population size".into(),
                ));
            }
            return Ok(());
        }
        let pc = self.crossover_rate();
        if !(0.0..=1.0).contains(&pc) {
            return Err(Error::Config(format!("crossover rate {pc} outside [0, 1]")));
        }
        if let Some(size) = self.population_size {
            if size < 2 || size as u64 > budget {
                return Err(Error::Config(format!(
                    "population size {size} must be in 2..={budget}"
                )));
            }
        }
        Ok(())
    }
}

/// Bisection settings of an experiment; the budget and repetition count
/// come from the enclosing spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SizingSettings {
    pub initial_size: usize,
    pub runs_per_trial: usize,
    pub successes_required: usize,
    pub relative_threshold: f64,
    pub ceiling: usize,
}

impl Default for SizingSettings {
    fn default() -> Self {
        let d = BisectionConfig::default();
        SizingSettings {
            initial_size: d.initial_size,
            runs_per_trial: d.runs_per_trial,
            successes_required: d.successes_required,
            relative_threshold: d.relative_threshold,
            ceiling: d.ceiling,
        }
    }
}

fn one() -> usize {
    1
}

/// A full experiment: every (instance, algorithm, goal) cell is run `runs`
/// times, or sized by bisection `repetitions` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub format_version: u32,
    #[serde(default)]
    pub name: String,
    pub instances: Vec<InstanceRef>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub goals: Vec<Goal>,
    pub runs: usize,
    pub budget: u64,
    pub master_seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub sizing: SizingSettings,
}

impl ExperimentSpec {
    pub fn bisection_config(&self) -> BisectionConfig {
        let s = &self.sizing;
        BisectionConfig {
            initial_size: s.initial_size,
            runs_per_trial: s.runs_per_trial,
            successes_required: s.successes_required,
            relative_threshold: s.relative_threshold,
            eval_budget: self.budget,
            repetitions: self.repetitions,
            ceiling: s.ceiling,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != SPEC_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported experiment format version {}",
                self.format_version
            )));
        }
        if self.instances.is_empty() || self.algorithms.is_empty() || self.goals.is_empty() {
            return Err(Error::Config(
                "experiment needs at least one instance, algorithm and goal".into(),
            ));
        }
        if self.runs == 0 || self.budget == 0 || self.repetitions == 0 {
            return Err(Error::Config("runs, budget and repetitions must be positive".into()));
        }
        for inst in &self.instances {
            if inst.length == 0 || inst.n == 0 {
                return Err(Error::Config(format!(
                    "instance L={} n={} is empty",
                    inst.length, inst.n
                )));
            }
        }
        for alg in &self.algorithms {
            alg.validate(self.budget)?;
        }
        if self.algorithms.iter().any(AlgorithmSpec::needs_sizing) {
            self.bisection_config().validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment spec serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::HeightMode;

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            format_version: SPEC_FORMAT_VERSION,
            name: "t".into(),
            instances: vec![InstanceRef {
                length: 20,
                n: 2,
                height_mode: HeightMode::Equal,
                seed: 3,
            }],
            algorithms: vec![AlgorithmSpec::ms_nahc(), AlgorithmSpec::ea(AlgorithmKind::RtsMr, 0.5)],
            goals: vec![Goal::AllPeaks],
            runs: 3,
            budget: 10_000,
            master_seed: 9,
            repetitions: 1,
            sizing: SizingSettings::default(),
        }
    }

    #[test]
    fn json_round_trip() {
        let s = spec();
        assert_eq!(ExperimentSpec::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn labels() {
        let s = spec();
        assert_eq!(s.algorithms[0].label(), "ms_nahc");
        assert_eq!(s.algorithms[1].label(), "rts_mr_pc0.5");
        assert_eq!(AlgorithmSpec::ea(AlgorithmKind::Mu1p1, 0.0).label(), "mu_1p1");
    }

    #[test]
    fn rejects_invalid_specs() {
        let mut s = spec();
        s.goals.clear();
        assert!(s.validate().is_err());
        let mut s = spec();
        s.format_version = 2;
        assert!(matches!(s.validate(), Err(Error::Format(_))));
        let mut s = spec();
        s.algorithms[0].population_size = Some(10);
        assert!(s.validate().is_err());
        let mut s = spec();
        s.algorithms[1].population_size = Some(20_000);
        assert!(s.validate().is_err());
    }
}
