use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};

use crate::instance::{Goal, InstanceRef};
use crate::record::RunRecord;

/// Grouping key of a run: which instance, algorithm and goal it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub instance: InstanceRef,
    pub algorithm: String,
    pub goal: Goal,
}

/// What summarization needs from a run.
pub trait Observation {
    fn cell(&self) -> CellKey;
    fn evals(&self) -> u64;
    fn success(&self) -> bool;
    fn restarts_or_generations(&self) -> u64;
}

impl Observation for RunRecord {
    fn cell(&self) -> CellKey {
        CellKey {
            instance: self.instance,
            algorithm: self.algorithm_id.clone(),
            goal: self.goal,
        }
    }

    fn evals(&self) -> u64 {
        self.evals
    }

    fn success(&self) -> bool {
        self.success
    }

    fn restarts_or_generations(&self) -> u64 {
        self.restarts_or_generations
    }
}

/// Rounds to six significant digits on output.
fn six_digits<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(round_significant(*x, 6)),
        None => s.serialize_none(),
    }
}

fn six_digits_plain<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_significant(*v, 6))
}

pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Per-cell statistics of the evaluations spent by successful runs.
///
/// Failed runs only enter through `runs` and `success_rate`. The order
/// statistics are `None` when no run succeeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    #[serde(flatten)]
    pub cell: CellKey,
    pub runs: usize,
    /// Number of successful runs the statistics are computed over.
    pub count: usize,
    #[serde(serialize_with = "six_digits_plain")]
    pub success_rate: f64,
    #[serde(serialize_with = "six_digits")]
    pub mean: Option<f64>,
    #[serde(serialize_with = "six_digits")]
    pub min: Option<f64>,
    #[serde(serialize_with = "six_digits")]
    pub q1: Option<f64>,
    #[serde(serialize_with = "six_digits")]
    pub median: Option<f64>,
    #[serde(serialize_with = "six_digits")]
    pub q3: Option<f64>,
    #[serde(serialize_with = "six_digits")]
    pub max: Option<f64>,
    /// Mean NAHC calls or EA steps over successful runs.
    #[serde(serialize_with = "six_digits")]
    pub mean_restarts: Option<f64>,
}

/// Quantile `p` of ascending `sorted` by linear interpolation between the
/// closest ranks: position `(len - 1)·p`, zero-based.
pub fn quantile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> Option<f64> {
    let n = xs.len();
    (n > 0).then(|| xs.sum::<f64>() / n as f64)
}

fn stats_for<O: Observation>(cell: CellKey, group: &[&O]) -> SummaryStats {
    let wins: Vec<&&O> = group.iter().filter(|o| o.success()).collect();
    let mut evals: Vec<f64> = wins.iter().map(|o| o.evals() as f64).collect();
    evals.sort_by(f64::total_cmp);
    SummaryStats {
        cell,
        runs: group.len(),
        count: wins.len(),
        success_rate: if group.is_empty() {
            0.0
        } else {
            wins.len() as f64 / group.len() as f64
        },
        mean: mean(evals.iter().copied()),
        min: evals.first().copied(),
        q1: quantile(&evals, 0.25),
        median: quantile(&evals, 0.5),
        q3: quantile(&evals, 0.75),
        max: evals.last().copied(),
        mean_restarts: mean(wins.iter().map(|o| o.restarts_or_generations() as f64)),
    }
}

/// One summary per cell, in order of each cell's first record.
pub fn summarize<O: Observation>(records: &[O]) -> Vec<SummaryStats> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<CellKey, Vec<&O>> = BTreeMap::new();
    for r in records {
        let key = r.cell();
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let group = groups.remove(&key).unwrap_or_default();
            stats_for(key, &group)
        })
        .collect()
}

/// Summaries for exactly `cells`, in that order; cells without records
/// get an empty summary.
pub fn summarize_cells<O: Observation>(records: &[O], cells: &[CellKey]) -> Vec<SummaryStats> {
    let mut groups: BTreeMap<CellKey, Vec<&O>> = BTreeMap::new();
    for r in records {
        groups.entry(r.cell()).or_default().push(r);
    }
    cells
        .iter()
        .map(|key| stats_for(key.clone(), groups.get(key).map_or(&[][..], |g| g)))
        .collect()
}
