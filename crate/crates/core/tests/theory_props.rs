use peakbench::theory::{
    blom_score, expected_msnahc_evals, expected_nahc_evals, expected_restarts_all,
    expected_restarts_one_peak, harmonic, inverse_normal_cdf, normal_cdf, order_statistic_mean,
    DistanceMode, EULER_GAMMA,
};
use peakbench::Goal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Draws until all `n` coupons are seen; returns the number of draws.
fn collect_all<R: Rng>(n: usize, rng: &mut R) -> u64 {
    let mut seen = vec![false; n];
    let mut missing = n;
    let mut draws = 0;
    while missing > 0 {
        draws += 1;
        let k = rng.random_range(0..n);
        if !seen[k] {
            seen[k] = true;
            missing -= 1;
        }
    }
    draws
}

#[test]
fn coupon_collector_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 10_000;
    for n in [5, 20, 80] {
        let all: u64 = (0..trials).map(|_| collect_all(n, &mut rng)).sum();
        let mean = all as f64 / trials as f64;
        let predicted = expected_restarts_all(n);
        assert!((mean - predicted).abs() / predicted < 0.05, "n={n}: {mean} vs {predicted}");

        // first hit of one fixed coupon is geometric with mean n
        let one: u64 = (0..trials)
            .map(|_| (1..).find(|_| rng.random_range(0..n) == 0).unwrap())
            .sum();
        let mean = one as f64 / trials as f64;
        let predicted = expected_restarts_one_peak(n);
        assert!((mean - predicted).abs() / predicted < 0.05, "n={n}: {mean} vs {predicted}");
    }
}

#[test]
fn blom_tracks_binomial_minimum() {
    // distance to a random peak is Binomial(L, 1/2); the nearest of n peaks
    // is the minimum of n such draws
    let len = 100;
    let trials = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [20, 320] {
        let mut total = 0u64;
        let mask = (1u128 << len) - 1;
        for _ in 0..trials {
            let min = (0..n)
                .map(|_| (rng.random::<u128>() & mask).count_ones())
                .min()
                .unwrap();
            total += min as u64;
        }
        let empirical = total as f64 / trials as f64;
        let predicted = order_statistic_mean(1, n, len as f64 / 2.0, (len as f64 / 4.0).sqrt()).unwrap();
        assert!((empirical - predicted).abs() < 0.5, "n={n}: {empirical} vs {predicted}");
    }
}

#[test]
fn half_length_climb_is_logarithmic() {
    for len in (8..=4096).step_by(2) {
        let l = len as f64;
        let bound = 3.0 + (l - 1.0) * (1.0 + (l / 2.0 - 1.0).log2());
        let e = expected_nahc_evals(len, l / 2.0).unwrap();
        assert!(e <= bound, "L={len}: {e} > {bound}");
    }
}

#[test]
fn harmonic_numbers() {
    assert_eq!(harmonic(0.0), 0.0);
    assert_eq!(harmonic(1.0), 1.0);
    assert!((harmonic(4.0) - 25.0 / 12.0).abs() < 1e-15);
    // the digamma branch agrees with summation at integers
    let summed: f64 = (1..=2_000_000u64).map(|k| 1.0 / k as f64).sum();
    assert!((harmonic(2_000_000.0) - summed).abs() < 1e-9);
    // and interpolates between them
    assert!((harmonic(0.5) - (2.0 - 2.0 * 2f64.ln())).abs() < 1e-12);
    for n in [100usize, 1_000, 10_000] {
        let x = n as f64;
        let asymptotic = x * x.ln() + EULER_GAMMA * x + 0.5;
        let exact = expected_restarts_all(n);
        assert!((exact - asymptotic).abs() < 1e-2, "n={n}: {exact} vs {asymptotic}");
    }
}

#[test]
fn predictions_are_monotone() {
    let mut prev = 0.0;
    for d in 1..=100 {
        let e = expected_nahc_evals(100, d as f64).unwrap();
        assert!(e > prev || d == 1, "d={d}");
        prev = e;
    }
    for goal in [Goal::Peak1, Goal::AllPeaks] {
        for mode in [DistanceMode::Conservative, DistanceMode::OrderStatistic] {
            let mut prev = 0.0;
            for n in [1, 2, 5, 20, 40, 80, 160, 320, 640] {
                let e = expected_msnahc_evals(100, n, goal, mode).unwrap();
                assert!(e > prev, "{goal} {mode:?} n={n}");
                prev = e;
            }
        }
    }
    assert!(expected_nahc_evals(100, 0.5).is_err());
    assert!(expected_nahc_evals(100, 101.0).is_err());
    assert!(expected_msnahc_evals(100, 20, Goal::BestPeak, DistanceMode::Conservative).is_err());
}

#[test]
fn inverse_normal_round_trip() {
    for i in 1..10_000 {
        let q = i as f64 / 10_000.0;
        let x = inverse_normal_cdf(q).unwrap();
        assert!((normal_cdf(x) - q).abs() < 1e-8, "q={q}");
    }
    for q in [1e-12, 1e-6, 0.02425, 0.97575, 1.0 - 1e-6] {
        let x = inverse_normal_cdf(q).unwrap();
        assert!((normal_cdf(x) - q).abs() / q.min(1.0 - q) < 1e-8, "q={q}");
    }
    assert!((inverse_normal_cdf(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-8);
    assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
    assert!(inverse_normal_cdf(0.0).is_err());
    assert!(inverse_normal_cdf(1.0).is_err());
}

#[test]
fn inverse_normal_agrees_with_statrs() {
    let normal = Normal::standard();
    for i in 1..1000 {
        let q = i as f64 / 1000.0;
        let ours = inverse_normal_cdf(q).unwrap();
        let theirs = normal.inverse_cdf(q);
        assert!((ours - theirs).abs() < 1e-9, "q={q}: {ours} vs {theirs}");
        assert!((normal_cdf(ours) - normal.cdf(ours)).abs() < 1e-14);
    }
}

#[test]
fn blom_scores_are_symmetric() {
    for n in [5, 20, 320] {
        for r in 1..=n {
            let lo = blom_score(r, n).unwrap();
            let hi = blom_score(n + 1 - r, n).unwrap();
            assert!((lo + hi).abs() < 1e-12);
        }
    }
    assert!(blom_score(0, 5).is_err());
    assert!(blom_score(6, 5).is_err());
}
