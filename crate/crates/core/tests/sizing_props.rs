use std::cell::RefCell;

use peakbench::sizing::{bisect, BisectionConfig, Phase};
use peakbench::{Error, Goal, HeightMode, InstanceRef, RunRecord};

fn record(size: usize, i: u64, success: bool) -> RunRecord {
    RunRecord {
        algorithm_id: "threshold".into(),
        instance: InstanceRef {
            length: 10,
            n: 1,
            height_mode: HeightMode::Equal,
            seed: 0,
        },
        goal: Goal::Peak1,
        run_index: i,
        run_seed: size as u64,
        evals: 1,
        restarts_or_generations: 1,
        success,
        peaks_found: Default::default(),
        budget: 1,
        population_size: Some(size),
    }
}

fn cfg(initial: usize, runs: usize) -> BisectionConfig {
    BisectionConfig {
        initial_size: initial,
        runs_per_trial: runs,
        successes_required: runs,
        ..BisectionConfig::default()
    }
}

#[test]
fn threshold_predicate_is_bracketed() {
    // 2 → 64 by doubling, then 48, 40 pass and 36 fails; 4/40 meets the
    // 10% threshold.
    let tried = RefCell::new(Vec::new());
    let out = bisect(&cfg(2, 5), |size, i| {
        tried.borrow_mut().push(size);
        Ok(record(size, i, size >= 37))
    })
    .unwrap();
    assert_eq!(out.population_size, 40);
    assert!((37..=41).contains(&out.population_size));
    let sizes: Vec<usize> = out.trace.iter().map(|t| t.population_size).collect();
    assert_eq!(sizes, vec![2, 4, 8, 16, 32, 64, 48, 40, 36]);
    let last = out.trace.last().unwrap();
    assert_eq!((last.low, last.high), (36, Some(40)));
    assert!(out.trace[..6].iter().all(|t| t.phase == Phase::Doubling));
    assert!(out.trace[6..].iter().all(|t| t.phase == Phase::Bisection));

    // measurement sample is the full passing trial at the reported size
    assert_eq!(out.measurement_runs.len(), 5);
    assert!(out.measurement_runs.iter().all(|r| r.population_size == Some(40) && r.success));
    // failing trials stop at their first failure
    let at_32 = tried.borrow().iter().filter(|&&s| s == 32).count();
    assert_eq!(at_32, 1);
}

#[test]
fn many_thresholds_respect_the_tolerance() {
    for threshold in 3..2000 {
        let out = bisect(&cfg(2, 3), |size, i| Ok(record(size, i, size >= threshold))).unwrap();
        let h = out.population_size;
        assert!(h >= threshold, "threshold {threshold}: {h}");
        assert!((h - threshold) as f64 / h as f64 <= 0.1 || h - threshold <= 1, "{threshold}: {h}");
    }
}

#[test]
fn always_passing_returns_initial_size() {
    let out = bisect(&cfg(6, 4), |size, i| Ok(record(size, i, true))).unwrap();
    assert_eq!(out.population_size, 6);
    assert_eq!(out.trace.len(), 1);
    assert_eq!(out.measurement_runs.len(), 4);
}

#[test]
fn never_passing_is_infeasible() {
    let c = BisectionConfig {
        ceiling: 1000,
        ..cfg(4, 3)
    };
    let err = bisect(&c, |size, i| Ok(record(size, i, false))).unwrap_err();
    assert!(matches!(err, Error::Infeasible { ceiling: 1000 }), "{err}");
}

#[test]
fn partial_success_criterion() {
    // the i-th run succeeds once size >= 10 * (i + 1); 3 of 4 needed
    let c = BisectionConfig {
        successes_required: 3,
        ..cfg(4, 4)
    };
    let out = bisect(&c, |size, i| Ok(record(size, i, size >= 10 * (i as usize + 1)))).unwrap();
    assert!((30..=33).contains(&out.population_size), "{}", out.population_size);
}

#[test]
fn run_errors_propagate() {
    let err = bisect(&cfg(4, 2), |_, _| Err(Error::Config("boom".into()))).unwrap_err();
    assert!(err.to_string().contains("boom"));
}
