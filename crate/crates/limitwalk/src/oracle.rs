//! Independent finite-horizon checks of the analytic construction.
//!
//! Both oracles evaluate P(S_1 <= x, ..., S_T <= x), which decreases to the
//! limit value as the horizon T grows: a seeded Monte Carlo estimator and an
//! exact dynamic program over prefix-sum states. They share nothing with the
//! root/boundary machinery, which is the point.

use crate::cycle::CyclePattern;
use crate::error::{Error, Result};
use crate::limitdist::LimitDistribution;
use crate::pmf::DiscretePmf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MC_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    MonteCarlo,
    ExactDp,
}

impl OracleMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            OracleMethod::MonteCarlo => "monte_carlo",
            OracleMethod::ExactDp => "exact_dp",
        }
    }
}

/// One oracle evaluation of the finite-horizon stay-below probability.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub x: i64,
    pub horizon: usize,
    pub estimate: f64,
    /// Binomial standard error; zero for the exact method.
    pub stderr: f64,
    pub method: OracleMethod,
    /// Sample count; zero for the exact method.
    pub trials: u64,
}

/// Simulates `trials` walks of `horizon` steps, counting those whose prefix
/// sums all stay at or below `x`. Reproducible for a fixed seed: trials are
/// processed in fixed-size chunks, each driven by a generator seeded from a
/// mix of the master seed and the chunk index.
pub fn mc_estimate(
    pattern: &CyclePattern,
    x: i64,
    horizon: usize,
    trials: u64,
    seed: u64,
) -> Result<OracleReport> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let samplers: Vec<StepSampler> = pattern.laws().iter().map(StepSampler::new).collect();
    let n = samplers.len();
    let mut alive = 0u64;
    let mut done = 0u64;
    let mut chunk_index = 0u64;
    while done < trials {
        let batch = MC_CHUNK.min(trials - done);
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, chunk_index));
        for _ in 0..batch {
            let mut sum = 0i64;
            let mut survived = true;
            for t in 0..horizon {
                sum += samplers[t % n].draw(&mut rng);
                if sum > x {
                    survived = false;
                    break;
                }
            }
            if survived {
                alive += 1;
            }
        }
        done += batch;
        chunk_index += 1;
    }
    let estimate = alive as f64 / trials as f64;
    Ok(OracleReport {
        x,
        horizon,
        estimate,
        stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        method: OracleMethod::MonteCarlo,
        trials,
    })
}

/// Exact P(S_1 <= x, ..., S_horizon <= x) by forward dynamic programming
/// over the surviving prefix-sum mass. States span the reachable values up
/// to `x`; mass stepping above `x` is discarded.
pub fn dp_bound(
    pattern: &CyclePattern,
    x: i64,
    horizon: usize,
    state_budget: u64,
) -> Result<OracleReport> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let laws = pattern.laws();
    let n = laws.len();

    // the state count per step is fixed by the running minimum; cost it first
    let mut needed = 0u64;
    let mut floor = 0i64;
    let mut dies_at = None;
    for t in 0..horizon {
        floor += laws[t % n].min_support();
        if floor > x {
            dies_at = Some(t);
            break;
        }
        needed = needed.saturating_add((x - floor + 1) as u64);
    }
    if dies_at.is_none() && needed > state_budget {
        return Err(Error::StateBudgetExceeded {
            needed,
            budget: state_budget,
        });
    }

    let exact_zero = |horizon: usize| OracleReport {
        x,
        horizon,
        estimate: 0.0,
        stderr: 0.0,
        method: OracleMethod::ExactDp,
        trials: 0,
    };
    if dies_at.is_some() {
        // even the all-minimum path breaks the ceiling
        return Ok(exact_zero(horizon));
    }

    let mut lo = 0i64;
    let mut dist = vec![1.0f64];
    for t in 0..horizon {
        let law = &laws[t % n];
        let new_lo = lo + law.min_support();
        let mut next = vec![0.0f64; (x - new_lo + 1) as usize];
        for (i, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let value = lo + i as i64;
            for (j, &w) in law.weights().iter().enumerate() {
                let stepped = value + law.min_support() + j as i64;
                if stepped > x {
                    break;
                }
                next[(stepped - new_lo) as usize] += mass * w;
            }
        }
        lo = new_lo;
        dist = next;
    }
    let estimate: f64 = dist.iter().sum();
    Ok(OracleReport {
        x,
        horizon,
        estimate: estimate.clamp(0.0, 1.0),
        stderr: 0.0,
        method: OracleMethod::ExactDp,
        trials: 0,
    })
}

/// Tolerances and effort knobs for `verify`.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub trials: u64,
    pub horizon: usize,
    pub seed: u64,
    /// Allowed distance between the analytic value and the finite-horizon
    /// dynamic program.
    pub dp_convergence_tol: f64,
    pub state_budget: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 1_000_000,
            horizon: 2000,
            seed: 1,
            dp_convergence_tol: 5e-4,
            state_budget: 100_000_000,
        }
    }
}

/// One row of a verification run.
#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub x: i64,
    pub analytic: f64,
    pub mc: OracleReport,
    pub dp: OracleReport,
    pub pass: bool,
}

/// Compares the analytic values against both oracles at the given points.
/// A row passes when the dynamic program agrees within the convergence
/// tolerance and the Monte Carlo estimate within four standard errors plus
/// that tolerance.
pub fn verify(ld: &LimitDistribution, xs: &[i64], cfg: &VerifyConfig) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let analytic = ld.cdf(x)?;
        let dp = dp_bound(ld.pattern(), x, cfg.horizon, cfg.state_budget)?;
        let mc = mc_estimate(ld.pattern(), x, cfg.horizon, cfg.trials, cfg.seed)?;
        let pass = (analytic - dp.estimate).abs() <= cfg.dp_convergence_tol
            && (analytic - mc.estimate).abs() <= 4.0 * mc.stderr + cfg.dp_convergence_tol;
        rows.push(VerifyRow {
            x,
            analytic,
            mc,
            dp,
            pass,
        });
    }
    Ok(rows)
}

/// Inverse-CDF sampler over one law's weight table.
struct StepSampler {
    min_support: i64,
    cumulative: Vec<f64>,
}

impl StepSampler {
    fn new(law: &DiscretePmf) -> Self {
        let mut acc = 0.0;
        let cumulative = law
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        StepSampler {
            min_support: law.min_support(),
            cumulative,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> i64 {
        let u: f64 = rng.random();
        let mut idx = 0;
        // front-loaded tables make the linear scan short on average
        while idx + 1 < self.cumulative.len() && u >= self.cumulative[idx] {
            idx += 1;
        }
        self.min_support + idx as i64
    }
}

fn mix_seed(seed: u64, chunk: u64) -> u64 {
    let mut z = seed ^ chunk.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitdist::BuildConfig;

    const BUDGET: u64 = 100_000_000;

    fn two_point() -> CyclePattern {
        CyclePattern::new(vec![DiscretePmf::from_weights(
            -3,
            &[0.5, 0.0, 0.0, 0.0, 0.5],
        )
        .unwrap()])
        .unwrap()
    }

    /// Walks every path of the two-point law by bitmask; exact reference for
    /// short horizons.
    fn enumerate_two_point(x: i64, horizon: usize) -> f64 {
        let mut surviving = 0.0;
        for mask in 0u32..(1 << horizon) {
            let mut sum = 0i64;
            let mut ok = true;
            for t in 0..horizon {
                sum += if mask >> t & 1 == 1 { 1 } else { -3 };
                if sum > x {
                    ok = false;
                    break;
                }
            }
            if ok {
                surviving += 0.5f64.powi(horizon as i32);
            }
        }
        surviving
    }

    #[test]
    fn dp_horizon_one_is_the_first_law_cdf() {
        let pattern = two_point();
        for x in -5..=3 {
            let report = dp_bound(&pattern, x, 1, BUDGET).unwrap();
            let want = pattern.laws()[0].cdf(x);
            assert!((report.estimate - want).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn dp_matches_exhaustive_enumeration() {
        let pattern = two_point();
        for horizon in 1..=10 {
            for x in [-4, -1, 0, 2, 5] {
                let dp = dp_bound(&pattern, x, horizon, BUDGET).unwrap().estimate;
                let brute = enumerate_two_point(x, horizon);
                assert!(
                    (dp - brute).abs() < 1e-14,
                    "h={horizon} x={x}: {dp} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn dp_is_monotone_in_horizon_and_bounds_the_limit() {
        let pattern = two_point();
        let ld = LimitDistribution::build(&pattern, &BuildConfig::default()).unwrap();
        let analytic = ld.cdf(-1).unwrap();
        let mut prev = 1.0;
        let mut decrements = Vec::new();
        for horizon in 1..=40 {
            let est = dp_bound(&pattern, -1, horizon, BUDGET).unwrap().estimate;
            assert!(est <= prev + 1e-15);
            assert!(est >= analytic - 1e-12);
            decrements.push(prev - est);
            prev = est;
        }
        // decrements shrink on average as the horizon extends
        let early: f64 = decrements[1..11].iter().sum();
        let late: f64 = decrements[30..40].iter().sum();
        assert!(late < early);
        assert!((prev - analytic).abs() < 1e-4);
    }

    #[test]
    fn dp_below_the_support_is_exactly_zero() {
        let report = dp_bound(&two_point(), -4, 500, BUDGET).unwrap();
        assert_eq!(report.estimate, 0.0);
    }

    #[test]
    fn dp_respects_the_state_budget() {
        let err = dp_bound(&two_point(), 50, 2000, 1000);
        assert!(matches!(err, Err(Error::StateBudgetExceeded { .. })));
    }

    #[test]
    fn mc_is_reproducible_and_seed_stable() {
        let pattern = two_point();
        let a = mc_estimate(&pattern, -1, 200, 30_000, 7).unwrap();
        let b = mc_estimate(&pattern, -1, 200, 30_000, 7).unwrap();
        assert_eq!(a.estimate, b.estimate);
        let c = mc_estimate(&pattern, -1, 200, 30_000, 8).unwrap();
        let spread = (a.estimate - c.estimate).abs();
        let combined = (a.stderr * a.stderr + c.stderr * c.stderr).sqrt();
        assert!(spread <= 6.0 * combined, "{spread} vs {combined}");
    }

    #[test]
    fn mc_tracks_the_analytic_value() {
        let pattern = two_point();
        let ld = LimitDistribution::build(&pattern, &BuildConfig::default()).unwrap();
        let analytic = ld.cdf(-1).unwrap();
        let report = mc_estimate(&pattern, -1, 300, 40_000, 3).unwrap();
        assert!((report.estimate - analytic).abs() <= 4.0 * report.stderr + 1e-3);
    }

    #[test]
    fn mc_below_the_support_is_exactly_zero() {
        let report = mc_estimate(&two_point(), -4, 100, 5_000, 1).unwrap();
        assert_eq!(report.estimate, 0.0);
        assert_eq!(report.stderr, 0.0);
    }

    #[test]
    fn arguments_are_validated() {
        let pattern = two_point();
        assert!(matches!(
            mc_estimate(&pattern, 0, 0, 10, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            mc_estimate(&pattern, 0, 10, 0, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            dp_bound(&pattern, 0, 0, BUDGET),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn verify_passes_on_the_two_point_pattern() {
        let ld = LimitDistribution::build(&two_point(), &BuildConfig::default()).unwrap();
        let cfg = VerifyConfig {
            trials: 60_000,
            horizon: 400,
            seed: 5,
            dp_convergence_tol: 2e-3,
            state_budget: BUDGET,
        };
        let rows = verify(&ld, &[-3, -1, 0, 2], &cfg).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.pass, "x={} analytic={}", row.x, row.analytic);
        }
        assert!(verify(&ld, &[], &cfg).unwrap().is_empty());
    }
}
