//! Integer-valued probability mass functions bounded from below.

use crate::error::{Error, Result};

/// Validated probability mass function on `{min_support, min_support+1, ...}`.
///
/// `weights[i]` is the probability of the value `min_support + i`. The first
/// weight is strictly positive and the table sums to one. Families with an
/// infinite upper tail are truncated; the discarded mass (measured before
/// renormalization) is kept in `tail_error`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf {
    min_support: i64,
    weights: Vec<f64>,
    tail_error: f64,
}

impl DiscretePmf {
    /// Builds a pmf from raw non-negative weights and normalizes them.
    pub fn from_weights(min_support: i64, weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &weight) in weights.iter().enumerate() {
            if weight < 0.0 || !weight.is_finite() {
                return Err(Error::NegativeWeight { index, weight });
            }
        }
        if weights[0] == 0.0 {
            return Err(Error::ZeroMassAtMinimum);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::ZeroTotalMass);
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(DiscretePmf {
            min_support,
            weights,
            tail_error: 0.0,
        })
    }

    /// Geometric law on `{1, 2, ...}` with success probability `p`,
    /// truncated once the remaining tail drops to `tol`.
    pub fn geometric(p: f64, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric p must lie in (0, 1], got {p}"
            )));
        }
        let q = 1.0 - p;
        let mut weights = Vec::new();
        let mut term = p;
        let mut tail = q;
        // tail after k kept terms is q^k
        loop {
            weights.push(term);
            if tail <= tol {
                break;
            }
            term *= q;
            tail *= q;
        }
        let mut pmf = DiscretePmf::from_weights(1, &weights)?;
        pmf.tail_error = tail;
        Ok(pmf)
    }

    /// Poisson law with rate `lambda`, translated by `shift`, truncated once
    /// the remaining tail drops to `tol`.
    pub fn shifted_poisson(lambda: f64, shift: i64, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "poisson lambda must be positive, got {lambda}"
            )));
        }
        let mut weights = Vec::new();
        let mut term = (-lambda).exp();
        let mut covered = 0.0;
        let mut k = 0u32;
        loop {
            weights.push(term);
            covered += term;
            if 1.0 - covered <= tol {
                break;
            }
            k += 1;
            term *= lambda / f64::from(k);
        }
        let mut pmf = DiscretePmf::from_weights(shift, &weights)?;
        pmf.tail_error = (1.0 - covered).max(0.0);
        Ok(pmf)
    }

    /// Discrete Weibull law with unit shape: `P(X = k) = e^{-k} - e^{-(k+1)}`
    /// on `{0, 1, ...}`, truncated once the remaining tail drops to `tol`.
    pub fn discrete_weibull_unit(tol: f64) -> Result<Self> {
        check_tol(tol)?;
        let mut weights = Vec::new();
        let mut k = 0i32;
        // tail beyond k-1 is e^{-k}
        loop {
            let survival = f64::from(-k).exp();
            let next = f64::from(-k - 1).exp();
            weights.push(survival - next);
            if next <= tol {
                break;
            }
            k += 1;
        }
        let tail = f64::from(-k - 1).exp();
        let mut pmf = DiscretePmf::from_weights(0, &weights)?;
        pmf.tail_error = tail;
        Ok(pmf)
    }

    pub fn min_support(&self) -> i64 {
        self.min_support
    }

    pub fn max_support(&self) -> i64 {
        self.min_support + self.weights.len() as i64 - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tail_error(&self) -> f64 {
        self.tail_error
    }

    /// Probability of `value`; zero outside the table.
    pub fn prob(&self, value: i64) -> f64 {
        let offset = value - self.min_support;
        if offset < 0 || offset >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[offset as usize]
        }
    }

    /// `P(X <= value)` under the truncated table.
    pub fn cdf(&self, value: i64) -> f64 {
        let offset = value - self.min_support;
        if offset < 0 {
            return 0.0;
        }
        let upto = (offset + 1).min(self.weights.len() as i64) as usize;
        self.weights[..upto].iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| (self.min_support + i as i64) as f64 * w)
            .sum()
    }

    pub(crate) fn with_parts(min_support: i64, weights: Vec<f64>, tail_error: f64) -> Self {
        DiscretePmf {
            min_support,
            weights,
            tail_error,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "truncation tolerance must lie in (0, 1), got {tol}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn from_weights_normalizes() {
        let pmf = DiscretePmf::from_weights(-3, &[1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(pmf.min_support(), -3);
        assert_eq!(pmf.max_support(), 1);
        assert!((pmf.prob(-3) - 0.5).abs() < 1e-15);
        assert!((pmf.prob(1) - 0.5).abs() < 1e-15);
        assert_eq!(pmf.prob(0), 0.0);
        assert_eq!(pmf.prob(7), 0.0);
        assert_eq!(pmf.tail_error(), 0.0);
    }

    #[test]
    fn from_weights_is_idempotent_on_normalized_input() {
        let first = DiscretePmf::from_weights(-2, &[0.35, 0.1, 0.0, 0.55]).unwrap();
        let second = DiscretePmf::from_weights(first.min_support(), first.weights()).unwrap();
        assert_eq!(second.min_support(), first.min_support());
        for (a, b) in first.weights().iter().zip(second.weights()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn from_weights_rejects_bad_input() {
        assert_eq!(DiscretePmf::from_weights(0, &[]), Err(Error::EmptyWeights));
        assert!(matches!(
            DiscretePmf::from_weights(0, &[0.4, -0.1]),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert_eq!(
            DiscretePmf::from_weights(0, &[0.0, 1.0]),
            Err(Error::ZeroMassAtMinimum)
        );
        assert!(matches!(
            DiscretePmf::from_weights(0, &[f64::NAN]),
            Err(Error::NegativeWeight { index: 0, .. })
        ));
    }

    #[test]
    fn geometric_matches_closed_forms() {
        let p = 0.55;
        let pmf = DiscretePmf::geometric(p, TOL).unwrap();
        assert_eq!(pmf.min_support(), 1);
        // mean of the untruncated law is 1/p; truncation moves it by O(tol)
        assert!((pmf.mean() - 1.0 / p).abs() < 1e-9);
        assert!((pmf.prob(1) - p).abs() < 1e-12);
        assert!((pmf.prob(3) - p * (1.0 - p) * (1.0 - p)).abs() < 1e-12);
        assert!(pmf.tail_error() <= TOL);
        assert!(pmf.tail_error() > 0.0);
    }

    #[test]
    fn geometric_near_degenerate() {
        let pmf = DiscretePmf::geometric(1.0, TOL).unwrap();
        assert_eq!(pmf.weights(), &[1.0]);
        assert_eq!(pmf.mean(), 1.0);
    }

    #[test]
    fn shifted_poisson_matches_closed_forms() {
        let lambda = 0.5;
        let pmf = DiscretePmf::shifted_poisson(lambda, -3, TOL).unwrap();
        assert_eq!(pmf.min_support(), -3);
        assert!((pmf.mean() - (lambda - 3.0)).abs() < 1e-9);
        assert!((pmf.prob(-3) - (-lambda).exp()).abs() < 1e-12);
        assert!((pmf.prob(-2) - lambda * (-lambda).exp()).abs() < 1e-12);
        assert!(pmf.tail_error() <= TOL);
    }

    #[test]
    fn weibull_unit_matches_series() {
        let pmf = DiscretePmf::discrete_weibull_unit(TOL).unwrap();
        assert_eq!(pmf.min_support(), 0);
        // mean is the survival sum over k >= 1 of e^{-k}
        let series: f64 = (1..200).map(|k| f64::from(-k).exp()).sum();
        assert!((pmf.mean() - series).abs() < 1e-9);
        assert!((pmf.prob(0) - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!(pmf.tail_error() <= TOL);
    }

    #[test]
    fn family_parameters_are_validated() {
        assert!(matches!(
            DiscretePmf::geometric(0.0, TOL),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            DiscretePmf::geometric(1.5, TOL),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            DiscretePmf::shifted_poisson(-1.0, 0, TOL),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            DiscretePmf::discrete_weibull_unit(0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            DiscretePmf::geometric(0.5, 2.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    proptest! {
        #[test]
        fn normalized_and_consistent(
            min in -20i64..20,
            raw in proptest::collection::vec(0.0f64..10.0, 1..12),
            head in 0.1f64..10.0,
        ) {
            let mut weights = raw;
            weights[0] = head;
            let pmf = DiscretePmf::from_weights(min, &weights).unwrap();
            let total: f64 = pmf.weights().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!((pmf.cdf(pmf.max_support()) - 1.0).abs() < 1e-12);
            prop_assert_eq!(pmf.cdf(min - 1), 0.0);
            // cdf increments match the point masses
            for v in min..=pmf.max_support() {
                prop_assert!((pmf.cdf(v) - pmf.cdf(v - 1) - pmf.prob(v)).abs() < 1e-12);
            }
        }

        #[test]
        fn truncated_families_respect_tol(p in 0.05f64..0.95, lambda in 0.05f64..4.0) {
            let g = DiscretePmf::geometric(p, 1e-9).unwrap();
            prop_assert!(g.tail_error() <= 1e-9);
            let s = DiscretePmf::shifted_poisson(lambda, -2, 1e-9).unwrap();
            prop_assert!(s.tail_error() <= 1e-9);
            let total: f64 = s.weights().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
