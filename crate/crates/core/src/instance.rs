//! The multimodal problem generator.
//!
//! An instance is `n` random peak locations of `L` bits each, with heights
//! either all 1.0 or linearly spread over [0.5, 1.0] in index order. The
//! fitness of a string is its agreement with the nearest peak, as a fraction
//! of `L`, scaled by that peak's height; ties on distance are broken
//! uniformly at random.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::{Error, Result};

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightMode {
    Equal,
    Linear,
}

impl HeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            HeightMode::Equal => "equal",
            HeightMode::Linear => "linear",
        }
    }

    /// Height of peak `index` (1-based) out of `n`.
    pub fn height(self, index: usize, n: usize) -> f64 {
        match self {
            HeightMode::Equal => 1.0,
            HeightMode::Linear if n == 1 => 1.0,
            HeightMode::Linear => 0.5 + 0.5 * (index - 1) as f64 / (n - 1) as f64,
        }
    }
}

impl fmt::Display for HeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(HeightMode::Equal),
            "linear" | "unequal" => Ok(HeightMode::Linear),
            other => Err(Error::param(format!("unknown height mode {other:?}"))),
        }
    }
}

/// Stopping goals for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Goal {
    #[serde(rename = "peak_1")]
    Peak1,
    #[serde(rename = "best_peak")]
    BestPeak,
    #[serde(rename = "all_peaks")]
    AllPeaks,
}

impl Goal {
    pub fn as_str(self) -> &'static str {
        match self {
            Goal::Peak1 => "peak_1",
            Goal::BestPeak => "best_peak",
            Goal::AllPeaks => "all_peaks",
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Goal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peak_1" | "peak1" => Ok(Goal::Peak1),
            "best_peak" | "best" => Ok(Goal::BestPeak),
            "all_peaks" | "all" => Ok(Goal::AllPeaks),
            other => Err(Error::param(format!("unknown goal {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub location: BitString,
    pub height: f64,
    /// 1-based.
    pub index: usize,
}

/// Identifies an instance by its generator inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceRef {
    #[serde(rename = "L")]
    pub length: usize,
    pub n: usize,
    pub height_mode: HeightMode,
    pub seed: u64,
}

impl InstanceRef {
    pub fn generate(&self) -> Result<ProblemInstance> {
        ProblemInstance::generate(self.length, self.n, self.height_mode, self.seed)
    }
}

/// Monotone count of fitness evaluations, optionally capped by a budget.
///
/// Only [`ProblemInstance::evaluate`] advances it.
#[derive(Debug, Clone, Default)]
pub struct EvalCounter {
    count: u64,
    budget: Option<u64>,
}

impl EvalCounter {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_budget(budget: u64) -> Self {
        EvalCounter {
            count: 0,
            budget: Some(budget),
        }
    }

    #[inline]
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn is_exhausted(&self) -> bool {
        self.budget.is_some_and(|b| self.count >= b)
    }

    #[inline]
    fn charge(&mut self) -> Result<()> {
        match self.budget {
            Some(budget) if self.count >= budget => Err(Error::BudgetExhausted { budget }),
            _ => {
                self.count += 1;
                Ok(())
            }
        }
    }
}

/// Outcome of one fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    /// Hamming distance to the nearest peak.
    pub distance: usize,
    /// The nearest peak the tie-break settled on (1-based).
    pub peak: usize,
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    length: usize,
    peaks: Vec<Peak>,
    height_mode: HeightMode,
    generator_seed: u64,
    best_height: f64,
}

impl ProblemInstance {
    /// Draws `n` peaks of `length` fair bits each from a ChaCha8 stream
    /// seeded with `seed`, peak 1 first.
    pub fn generate(length: usize, n: usize, height_mode: HeightMode, seed: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::param("string length L must be at least 1"));
        }
        if n == 0 {
            return Err(Error::param("number of peaks n must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let peaks = (1..=n)
            .map(|index| Peak {
                location: BitString::random(length, &mut rng),
                height: height_mode.height(index, n),
                index,
            })
            .collect();
        Ok(Self::from_parts(length, peaks, height_mode, seed))
    }

    /// Builds an instance from explicit peaks. Heights are taken as given.
    pub fn from_peaks(
        locations: Vec<BitString>,
        heights: Vec<f64>,
        height_mode: HeightMode,
    ) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::param("an instance needs at least one peak"));
        }
        if locations.len() != heights.len() {
            return Err(Error::param("peak and height counts differ"));
        }
        let length = locations[0].len();
        if length == 0 || locations.iter().any(|p| p.len() != length) {
            return Err(Error::param("peaks must share one non-zero length"));
        }
        if let Some(h) = heights.iter().find(|h| !(0.0..=1.0).contains(*h)) {
            return Err(Error::param(format!("peak height {h} outside [0, 1]")));
        }
        let peaks = locations
            .into_iter()
            .zip(heights)
            .enumerate()
            .map(|(i, (location, height))| Peak {
                location,
                height,
                index: i + 1,
            })
            .collect();
        Ok(Self::from_parts(length, peaks, height_mode, 0))
    }

    fn from_parts(length: usize, peaks: Vec<Peak>, height_mode: HeightMode, seed: u64) -> Self {
        let best_height = peaks.iter().map(|p| p.height).fold(f64::MIN, f64::max);
        ProblemInstance {
            length,
            peaks,
            height_mode,
            generator_seed: seed,
            best_height,
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn n(&self) -> usize {
        self.peaks.len()
    }

    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    /// Peak with 1-based `index`.
    pub fn peak(&self, index: usize) -> &Peak {
        &self.peaks[index - 1]
    }

    pub fn height_mode(&self) -> HeightMode {
        self.height_mode
    }

    pub fn generator_seed(&self) -> u64 {
        self.generator_seed
    }

    pub fn reference(&self) -> InstanceRef {
        InstanceRef {
            length: self.length,
            n: self.n(),
            height_mode: self.height_mode,
            seed: self.generator_seed,
        }
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.length {
            return Err(Error::param(format!(
                "string of length {} evaluated on an instance of length {}",
                x.len(),
                self.length
            )));
        }
        Ok(())
    }

    /// All 1-based peak indices at minimal Hamming distance from `x`, ascending.
    pub fn nearest_peak_indices(&self, x: &BitString) -> Result<Vec<usize>> {
        self.check_len(x)?;
        let mut best = usize::MAX;
        let mut out = Vec::new();
        for p in &self.peaks {
            let d = p.location.hamming_distance(x);
            if d < best {
                best = d;
                out.clear();
            }
            if d == best {
                out.push(p.index);
            }
        }
        Ok(out)
    }

    /// Minimal Hamming distance from `x` to any peak.
    pub fn nearest_distance(&self, x: &BitString) -> Result<usize> {
        self.check_len(x)?;
        Ok(self.min_distance(x))
    }

    fn min_distance(&self, x: &BitString) -> usize {
        self.peaks
            .iter()
            .map(|p| p.location.hamming_distance(x))
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Fitness of `x` measured against one specific peak. Costs no evaluation.
    pub fn fitness_against(&self, x: &BitString, index: usize) -> f64 {
        let p = self.peak(index);
        let d = p.location.hamming_distance(x);
        (self.length - d) as f64 / self.length as f64 * p.height
    }

    /// Fitness with ties resolved to the lowest nearest index. Costs no
    /// evaluation; for checks that must not depend on the tie-break stream.
    pub fn fitness_lowest_tie(&self, x: &BitString) -> Result<f64> {
        let nearest = self.nearest_peak_indices(x)?;
        Ok(self.fitness_against(x, nearest[0]))
    }

    /// Evaluates `x`, charging exactly one evaluation to `counter`.
    pub fn evaluate<R: Rng + ?Sized>(
        &self,
        x: &BitString,
        rng: &mut R,
        counter: &mut EvalCounter,
    ) -> Result<f64> {
        self.assess(x, rng, counter).map(|e| e.fitness)
    }

    /// Like [`evaluate`](Self::evaluate) but also reports the distance and
    /// the peak the tie-break selected.
    pub fn assess<R: Rng + ?Sized>(
        &self,
        x: &BitString,
        rng: &mut R,
        counter: &mut EvalCounter,
    ) -> Result<Evaluation> {
        self.check_len(x)?;
        counter.charge()?;

        let mut best = usize::MAX;
        let mut ties = 0usize;
        let mut chosen = 0usize;
        let mut mixed_heights = false;
        for (i, p) in self.peaks.iter().enumerate() {
            let d = p.location.hamming_distance(x);
            if d < best {
                best = d;
                ties = 1;
                chosen = i;
                mixed_heights = false;
            } else if d == best {
                ties += 1;
                if p.height != self.peaks[chosen].height {
                    mixed_heights = true;
                }
            }
        }
        // A draw is only needed when the tied peaks disagree on height;
        // otherwise every choice yields the same fitness.
        if ties > 1 && mixed_heights {
            let k = rng.random_range(0..ties);
            chosen = self
                .peaks
                .iter()
                .enumerate()
                .filter(|(_, p)| p.location.hamming_distance(x) == best)
                .nth(k)
                .map(|(i, _)| i)
                .expect("tie set has k-th member");
        }
        let height = self.peaks[chosen].height;
        Ok(Evaluation {
            fitness: (self.length - best) as f64 / self.length as f64 * height,
            distance: best,
            peak: chosen + 1,
        })
    }

    /// Indices of every peak located exactly at `x` (ground truth, zero cost).
    pub fn peaks_at(&self, x: &BitString) -> impl Iterator<Item = usize> + '_ {
        let x = x.clone();
        self.peaks
            .iter()
            .filter(move |p| p.location == x)
            .map(|p| p.index)
    }

    /// Whether `found` satisfies `goal`. Costs no evaluation.
    pub fn goal_reached(&self, found: &BTreeSet<usize>, goal: Goal) -> bool {
        match goal {
            Goal::Peak1 => found.contains(&1),
            Goal::BestPeak => found
                .iter()
                .any(|&i| i >= 1 && i <= self.n() && self.peak(i).height == self.best_height),
            Goal::AllPeaks => (1..=self.n()).all(|i| found.contains(&i)),
        }
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            format_version: INSTANCE_FORMAT_VERSION,
            length: self.length,
            n: self.n(),
            height_mode: self.height_mode,
            generator_seed: self.generator_seed,
            peaks: self
                .peaks
                .iter()
                .map(|p| PeakRecord {
                    bits: p.location.to_string(),
                    height: p.height,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        if file.format_version != INSTANCE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported instance format_version {}",
                file.format_version
            )));
        }
        if file.peaks.len() != file.n {
            return Err(Error::Format(format!(
                "declared n = {} but {} peaks listed",
                file.n,
                file.peaks.len()
            )));
        }
        let mut locations = Vec::with_capacity(file.n);
        let mut heights = Vec::with_capacity(file.n);
        for (i, p) in file.peaks.into_iter().enumerate() {
            if p.bits.len() != file.length {
                return Err(Error::Format(format!(
                    "peak {} has {} bits, expected {}",
                    i + 1,
                    p.bits.len(),
                    file.length
                )));
            }
            locations.push(p.bits.parse()?);
            heights.push(p.height);
        }
        let mut inst = Self::from_peaks(locations, heights, file.height_mode)?;
        inst.generator_seed = file.generator_seed;
        Ok(inst)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// On-disk instance document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    #[serde(rename = "L")]
    pub length: usize,
    pub n: usize,
    pub height_mode: HeightMode,
    pub generator_seed: u64,
    pub peaks: Vec<PeakRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRecord {
    pub bits: String,
    pub height: f64,
}
