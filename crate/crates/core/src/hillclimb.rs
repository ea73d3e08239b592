//! Next-ascent hillclimbing and its multistart wrapper.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::instance::{EvalCounter, Goal, ProblemInstance};
use crate::record::RunRecord;

pub const MS_NAHC_ID: &str = "ms_nahc";

/// A completed climb.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimbResult {
    pub start: BitString,
    pub hilltop: BitString,
    pub hilltop_fitness: f64,
    pub evals_used: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClimbOutcome {
    Completed(ClimbResult),
    /// The budget ran out mid-climb; the evaluations spent still count.
    Truncated { current: BitString, evals_used: u64 },
}

impl ClimbOutcome {
    pub fn evals_used(&self) -> u64 {
        match self {
            ClimbOutcome::Completed(r) => r.evals_used,
            ClimbOutcome::Truncated { evals_used, .. } => *evals_used,
        }
    }

    pub fn completed(self) -> Option<ClimbResult> {
        match self {
            ClimbOutcome::Completed(r) => Some(r),
            ClimbOutcome::Truncated { .. } => None,
        }
    }
}

/// One NAHC climb from a uniformly random start.
pub fn nahc<R: Rng + ?Sized>(
    inst: &ProblemInstance,
    rng: &mut R,
    counter: &mut EvalCounter,
) -> ClimbOutcome {
    let start = BitString::random(inst.length(), rng);
    climb(inst, start, rng, counter)
}

/// One NAHC climb from `start`.
pub fn nahc_from<R: Rng + ?Sized>(
    inst: &ProblemInstance,
    start: BitString,
    rng: &mut R,
    counter: &mut EvalCounter,
) -> Result<ClimbOutcome> {
    if start.len() != inst.length() {
        return Err(Error::param(format!(
            "start of length {} on an instance of length {}",
            start.len(),
            inst.length()
        )));
    }
    Ok(climb(inst, start, rng, counter))
}

fn climb<R: Rng + ?Sized>(
    inst: &ProblemInstance,
    start: BitString,
    rng: &mut R,
    counter: &mut EvalCounter,
) -> ClimbOutcome {
    let len = inst.length();
    let before = counter.count();
    let mut x = start.clone();

    let truncated = |x: BitString, counter: &EvalCounter| ClimbOutcome::Truncated {
        current: x,
        evals_used: counter.count() - before,
    };

    let mut fx = match inst.evaluate(&x, rng, counter) {
        Ok(f) => f,
        Err(_) => return truncated(x, counter),
    };

    // `order` is a permutation of bit positions; each scan runs a fresh
    // partial Fisher-Yates over its first `m` slots. The bit that leads back
    // to the previous current solution is parked in the last slot.
    let mut order: Vec<usize> = (0..len).collect();
    let mut prev_bit: Option<usize> = None;
    loop {
        let m = match prev_bit {
            Some(bit) => {
                let pos = order.iter().position(|&b| b == bit).expect("bit in permutation");
                order.swap(pos, len - 1);
                len - 1
            }
            None => len,
        };
        let mut moved = false;
        for i in 0..m {
            let j = rng.random_range(i..m);
            order.swap(i, j);
            let bit = order[i];
            x.flip(bit);
            match inst.evaluate(&x, rng, counter) {
                Ok(fs) if fs > fx => {
                    fx = fs;
                    prev_bit = Some(bit);
                    moved = true;
                    break;
                }
                Ok(_) => x.flip(bit),
                Err(_) => {
                    x.flip(bit);
                    return truncated(x, counter);
                }
            }
        }
        if !moved {
            return ClimbOutcome::Completed(ClimbResult {
                start,
                hilltop: x,
                hilltop_fitness: fx,
                evals_used: counter.count() - before,
            });
        }
    }
}

/// Multistart NAHC: climbs from fresh random starts until `goal` holds or
/// `budget` evaluations are spent. A climb's hilltop is matched against the
/// true peak locations at no evaluation cost.
pub fn ms_nahc(inst: &ProblemInstance, goal: Goal, budget: u64, run_seed: u64) -> Result<RunRecord> {
    if budget == 0 {
        return Err(Error::param("budget must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    let mut counter = EvalCounter::with_budget(budget);
    let mut found = BTreeSet::new();
    let mut calls = 0u64;
    let success = loop {
        calls += 1;
        match nahc(inst, &mut rng, &mut counter) {
            ClimbOutcome::Completed(r) => {
                found.extend(inst.peaks_at(&r.hilltop));
                if inst.goal_reached(&found, goal) {
                    break true;
                }
            }
            ClimbOutcome::Truncated { .. } => break false,
        }
    };
    Ok(RunRecord {
        algorithm_id: MS_NAHC_ID.to_string(),
        instance: inst.reference(),
        goal,
        run_index: 0,
        run_seed,
        evals: counter.count(),
        restarts_or_generations: calls,
        success,
        peaks_found: found,
        budget,
        population_size: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::HeightMode;

    fn single_peak(bits: &str) -> ProblemInstance {
        ProblemInstance::from_peaks(vec![bits.parse().unwrap()], vec![1.0], HeightMode::Equal)
            .unwrap()
    }

    #[test]
    fn start_on_hilltop_costs_one_full_scan() {
        let inst = ProblemInstance::generate(100, 1, HeightMode::Equal, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counter = EvalCounter::unlimited();
        let out = nahc_from(&inst, inst.peak(1).location.clone(), &mut rng, &mut counter)
            .unwrap()
            .completed()
            .unwrap();
        assert_eq!(out.evals_used, 101);
        assert_eq!(out.hilltop, inst.peak(1).location);
    }

    #[test]
    fn one_bit_away_on_four_bits() {
        // Start 0111 under peak 1111: the improving flip sits at a uniform
        // position among 4 neighbours (1 + 1..=4 evals), then 3 confirmation
        // evaluations exclude the way back. Totals are uniform on 5..=8.
        let inst = single_peak("1111");
        let mut seen = [0usize; 9];
        for seed in 0..4000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counter = EvalCounter::unlimited();
            let r = nahc_from(&inst, "0111".parse().unwrap(), &mut rng, &mut counter)
                .unwrap()
                .completed()
                .unwrap();
            assert_eq!(r.hilltop.to_string(), "1111");
            assert_eq!(r.evals_used, counter.count());
            seen[r.evals_used as usize] += 1;
        }
        assert_eq!(seen[..5].iter().sum::<usize>(), 0);
        for &c in &seen[5..=8] {
            assert!((850..1150).contains(&c), "{seen:?}");
        }
    }

    #[test]
    fn truncation_is_reported() {
        let inst = ProblemInstance::generate(100, 1, HeightMode::Equal, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counter = EvalCounter::with_budget(30);
        match nahc(&inst, &mut rng, &mut counter) {
            ClimbOutcome::Truncated { evals_used, .. } => assert_eq!(evals_used, 30),
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn single_peak_needs_one_call() {
        let inst = ProblemInstance::generate(50, 1, HeightMode::Equal, 8).unwrap();
        let rec = ms_nahc(&inst, Goal::Peak1, 1_000_000, 3).unwrap();
        assert!(rec.success);
        assert_eq!(rec.restarts_or_generations, 1);
        assert_eq!(rec.peaks_found, BTreeSet::from([1]));
    }

    #[test]
    fn budget_exhaustion_fails_run() {
        let inst = ProblemInstance::generate(100, 20, HeightMode::Equal, 8).unwrap();
        let rec = ms_nahc(&inst, Goal::AllPeaks, 5_000, 3).unwrap();
        assert!(!rec.success);
        assert_eq!(rec.evals, 5_000);
        assert!(rec.budget_consistent());
        assert!(ms_nahc(&inst, Goal::AllPeaks, 0, 3).is_err());
    }
}
