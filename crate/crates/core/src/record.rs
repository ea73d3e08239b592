use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::instance::{Goal, InstanceRef};

/// Outcome of one algorithm run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm_id: String,
    pub instance: InstanceRef,
    pub goal: Goal,
    /// Position of the run within its experiment cell.
    pub run_index: u64,
    pub run_seed: u64,
    pub evals: u64,
    /// NAHC calls for the multistart climber, steps or generations for EAs.
    pub restarts_or_generations: u64,
    pub success: bool,
    pub peaks_found: BTreeSet<usize>,
    pub budget: u64,
    /// Population size for EA runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
}

impl RunRecord {
    /// `success` implies the budget was respected; failure implies it was spent.
    pub fn budget_consistent(&self) -> bool {
        if self.success {
            self.evals <= self.budget
        } else {
            self.evals >= self.budget
        }
    }
}
