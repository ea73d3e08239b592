//! Closed-form runtime predictions for (multistart) next-ascent hillclimbing
//! on equal-height instances.
//!
//! A single climb from distance `d` costs `1 + L/d + (L-1)·H(d-1)` expected
//! evaluations. Reaching one given peak takes `n` climbs on average
//! (geometric with p = 1/n), reaching all of them `n·H(n)` (coupon
//! collector). The distance from a random string to its nearest of `n`
//! peaks is estimated by Blom's approximation to the first order statistic
//! of a normal with mean `L/2` and deviation `sqrt(L/4)`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::instance::Goal;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Blom's plotting-position constant.
pub const BLOM_ALPHA: f64 = 0.375;

/// Generalized harmonic number `H(x) = ψ(x + 1) + γ`, exact summation for
/// small integral `x`.
pub fn harmonic(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.fract() == 0.0 && x > 0.0 && x <= 1e6 {
        return (1..=x as u64).map(|k| 1.0 / k as f64).sum();
    }
    digamma(x + 1.0) + EULER_GAMMA
}

/// Expected evaluations for one NAHC climb starting `d` bits from the top of
/// a single peak.
pub fn expected_nahc_evals(length: usize, d: f64) -> Result<f64> {
    let l = length as f64;
    if !(d >= 1.0) {
        return Err(Error::Domain(format!("distance d = {d} must be at least 1")));
    }
    if d > l {
        return Err(Error::Domain(format!("distance d = {d} exceeds L = {length}")));
    }
    Ok(1.0 + l / d + (l - 1.0) * harmonic(d - 1.0))
}

/// Expected NAHC calls until one particular peak is reached.
pub fn expected_restarts_one_peak(n: usize) -> f64 {
    n as f64
}

/// Expected NAHC calls until every peak has been reached.
pub fn expected_restarts_all(n: usize) -> f64 {
    n as f64 * harmonic(n as f64)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step against the complementary error function.
pub fn inverse_normal_cdf(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("quantile level {q} outside (0, 1)")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |p: f64| {
        let t = (-2.0 * p.ln()).sqrt();
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    };
    let mut x = if q < P_LOW {
        tail(q)
    } else if q > 1.0 - P_LOW {
        -tail(1.0 - q)
    } else {
        let t = q - 0.5;
        let r = t * t;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * t
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    let e = normal_cdf(x) - q;
    let u = e * (2.0 * PI).sqrt() * (x * x / 2.0).exp();
    x -= u / (1.0 + x * u / 2.0);
    Ok(x)
}

/// Blom's standardized score for rank `r` of `n`: `Φ⁻¹((r − α)/(n − 2α + 1))`.
pub fn blom_score(r: usize, n: usize) -> Result<f64> {
    if r < 1 || r > n {
        return Err(Error::param(format!("rank {r} outside 1..={n}")));
    }
    inverse_normal_cdf((r as f64 - BLOM_ALPHA) / (n as f64 - 2.0 * BLOM_ALPHA + 1.0))
}

/// Approximate expectation of the `r`-th smallest of `n` normal samples.
pub fn order_statistic_mean(r: usize, n: usize, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::param(format!("sigma = {sigma} must be positive")));
    }
    Ok(mu + blom_score(r, n)? * sigma)
}

/// How the start-to-peak distance is chosen for the multistart prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// `d = L/2`, the single-peak expectation.
    Conservative,
    /// `d` = Blom estimate of the nearest-of-`n` distance.
    OrderStatistic,
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::Conservative => "conservative",
            DistanceMode::OrderStatistic => "order_statistic",
        })
    }
}

impl FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conservative" => Ok(DistanceMode::Conservative),
            "order_statistic" | "order-statistic" => Ok(DistanceMode::OrderStatistic),
            other => Err(Error::param(format!("unknown distance mode {other:?}"))),
        }
    }
}

/// Expected distance from a random start to the nearest of `n` peaks.
pub fn expected_start_distance(length: usize, n: usize, mode: DistanceMode) -> Result<f64> {
    let l = length as f64;
    match mode {
        DistanceMode::Conservative => Ok(l / 2.0),
        DistanceMode::OrderStatistic => order_statistic_mean(1, n, l / 2.0, (l / 4.0).sqrt()),
    }
}

/// Expected NAHC calls for `goal` on an equal-height `n`-peak instance.
pub fn expected_restarts(n: usize, goal: Goal) -> Result<f64> {
    match goal {
        Goal::Peak1 => Ok(expected_restarts_one_peak(n)),
        Goal::AllPeaks => Ok(expected_restarts_all(n)),
        Goal::BestPeak => Err(Error::Domain(
            "no closed form for best_peak; use peak_1 on equal heights".into(),
        )),
    }
}

/// Expected evaluations for multistart NAHC to reach `goal`.
pub fn expected_msnahc_evals(
    length: usize,
    n: usize,
    goal: Goal,
    mode: DistanceMode,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let d = expected_start_distance(length, n, mode)?;
    Ok(expected_restarts(n, goal)? * expected_nahc_evals(length, d)?)
}

/// One line of the closed-form table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    #[serde(rename = "L")]
    pub length: usize,
    pub n: usize,
    pub goal: Goal,
    pub d_mode: DistanceMode,
    pub blom_score: f64,
    pub distance: f64,
    pub restarts: f64,
    pub nahc_evals: f64,
    pub evals: f64,
}

pub fn theory_row(length: usize, n: usize, goal: Goal, mode: DistanceMode) -> Result<TheoryRow> {
    let distance = expected_start_distance(length, n, mode)?;
    let nahc_evals = expected_nahc_evals(length, distance)?;
    let restarts = expected_restarts(n, goal)?;
    Ok(TheoryRow {
        length,
        n,
        goal,
        d_mode: mode,
        blom_score: blom_score(1, n)?,
        distance,
        restarts,
        nahc_evals,
        evals: restarts * nahc_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_harmonic(k: u64) -> f64 {
        (1..=k).map(|i| 1.0 / i as f64).sum()
    }

    #[test]
    fn nahc_evals_at_integer_distances() {
        assert_eq!(expected_nahc_evals(100, 1.0).unwrap(), 101.0);
        let want = 1.0 + 2.5 + 99.0 * brute_harmonic(39);
        let got = expected_nahc_evals(100, 40.0).unwrap();
        assert!((got - want).abs() < 1e-9);
        assert!((got - 424.6).abs() < 0.05, "{got}");
    }

    #[test]
    fn nahc_evals_domain() {
        assert!(matches!(expected_nahc_evals(100, 0.0), Err(Error::Domain(_))));
        assert!(matches!(expected_nahc_evals(100, 0.5), Err(Error::Domain(_))));
        assert!(matches!(expected_nahc_evals(100, 101.0), Err(Error::Domain(_))));
    }

    #[test]
    fn digamma_harmonic_matches_sums() {
        for k in 1..200u64 {
            let via_digamma = digamma(k as f64 + 1.0) + EULER_GAMMA;
            assert!((via_digamma - brute_harmonic(k)).abs() < 1e-9, "k = {k}");
        }
        // continuity between integers
        assert!(harmonic(39.0) < harmonic(39.5) && harmonic(39.5) < harmonic(40.0));
    }

    #[test]
    fn restarts() {
        assert_eq!(expected_restarts_one_peak(20), 20.0);
        assert_eq!(expected_restarts_one_peak(1), 1.0);
        assert_eq!(expected_restarts_one_peak(320), 320.0);
        assert_eq!(expected_restarts_all(1), 1.0);
        assert!((expected_restarts_all(20) - 72.0).abs() < 0.05);
        assert!((expected_restarts_all(320) - 2031.1).abs() < 0.5);
    }

    #[test]
    fn quantile_known_values() {
        assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
        assert!((inverse_normal_cdf(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-9);
        let z = inverse_normal_cdf(0.625 / 20.25).unwrap();
        assert!((z - -1.87).abs() < 0.005, "{z}");
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(inverse_normal_cdf(bad), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn order_statistic_values() {
        let m20 = order_statistic_mean(1, 20, 50.0, 5.0).unwrap();
        assert!((m20 - 40.65).abs() < 0.03, "{m20}");
        // scipy.stats.norm.ppf(0.625 / 320.25) = -2.885_928...
        let m320 = order_statistic_mean(1, 320, 50.0, 5.0).unwrap();
        assert!((m320 - 35.570_36).abs() < 1e-3, "{m320}");
        assert!((order_statistic_mean(1, 1, 7.0, 3.0).unwrap() - 7.0).abs() < 1e-12);
        assert!(order_statistic_mean(0, 5, 0.0, 1.0).is_err());
        assert!(order_statistic_mean(6, 5, 0.0, 1.0).is_err());
    }

    #[test]
    fn msnahc_predictions() {
        let p1 = expected_msnahc_evals(100, 20, Goal::Peak1, DistanceMode::OrderStatistic).unwrap();
        assert!((p1 / 8540.0 - 1.0).abs() < 0.02, "{p1}");
        let all =
            expected_msnahc_evals(100, 20, Goal::AllPeaks, DistanceMode::OrderStatistic).unwrap();
        assert!((all / 30726.0 - 1.0).abs() < 0.02, "{all}");
        let one = expected_msnahc_evals(100, 1, Goal::Peak1, DistanceMode::Conservative).unwrap();
        assert_eq!(one, expected_nahc_evals(100, 50.0).unwrap());
        assert!(expected_msnahc_evals(100, 5, Goal::BestPeak, DistanceMode::Conservative).is_err());
    }
}
