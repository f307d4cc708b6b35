//! Periodic patterns of step laws and their aggregate period statistics.

use crate::error::{Error, Result};
use crate::pmf::DiscretePmf;
use num_complex::Complex64;

/// One period of step laws, applied cyclically.
#[derive(Debug, Clone)]
pub struct CyclePattern {
    laws: Vec<DiscretePmf>,
}

impl CyclePattern {
    pub fn new(laws: Vec<DiscretePmf>) -> Result<Self> {
        if laws.is_empty() {
            return Err(Error::InvalidParameter(
                "pattern needs at least one step law".into(),
            ));
        }
        Ok(CyclePattern { laws })
    }

    pub fn laws(&self) -> &[DiscretePmf] {
        &self.laws
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    /// Aggregates the period: law of the period sum, descent depth, prefix
    /// minima, and mean drift. The period-sum table is trimmed at `tail_tol`
    /// and renormalized.
    pub fn summarize(&self, tail_tol: f64) -> Result<CycleSummary> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must lie in (0, 1), got {tail_tol}"
            )));
        }
        let mut weights = self.laws[0].weights().to_vec();
        let mut min_sum = self.laws[0].min_support();
        let mut component_tails = self.laws[0].tail_error();
        for law in &self.laws[1..] {
            weights = convolve(&weights, law.weights());
            min_sum += law.min_support();
            component_tails += law.tail_error();
        }

        // drop the aggregate upper tail down to tail_tol, then renormalize
        let mut trimmed = 0.0;
        while weights.len() > 1 && trimmed + weights[weights.len() - 1] <= tail_tol {
            trimmed += weights.pop().unwrap();
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }

        let mut prefix = 0i64;
        let mut prefix_minima = Vec::with_capacity(self.laws.len());
        for law in &self.laws {
            prefix += law.min_support();
            prefix_minima.push(prefix);
        }
        let m = *prefix_minima.iter().max().unwrap();
        let d = -min_sum;
        let mean_sn = self.laws.iter().map(DiscretePmf::mean).sum();

        Ok(CycleSummary {
            n: self.laws.len(),
            d,
            m,
            f_n: DiscretePmf::with_parts(min_sum, weights, 0.0),
            mean_sn,
            prefix_minima,
            tail_error_total: component_tails + trimmed,
        })
    }
}

/// Which of the four qualitative regimes a pattern falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    /// Positive drift, or zero drift without a degenerate period: the limit
    /// function vanishes identically.
    ZeroFunction,
    /// The period sum is identically zero: unit step at `M`.
    DegenerateStep,
    /// Negative drift with all prefix minima non-positive.
    ComputableMleq0,
    /// Negative drift with a positive prefix minimum.
    ComputableMgt0,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::ZeroFunction => "zero_function",
            CaseLabel::DegenerateStep => "degenerate_step",
            CaseLabel::ComputableMleq0 => "computable_m_leq_0",
            CaseLabel::ComputableMgt0 => "computable_m_gt_0",
        }
    }
}

/// Aggregate statistics of one period.
#[derive(Debug, Clone)]
pub struct CycleSummary {
    n: usize,
    d: i64,
    m: i64,
    f_n: DiscretePmf,
    mean_sn: f64,
    prefix_minima: Vec<i64>,
    tail_error_total: f64,
}

impl CycleSummary {
    /// Period length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Descent depth: minus the lowest value the period sum can take.
    pub fn d(&self) -> i64 {
        self.d
    }

    /// Largest prefix sum of the per-step minima.
    pub fn m(&self) -> i64 {
        self.m
    }

    /// Law of the period sum; its minimum support is `-d`.
    pub fn f_n(&self) -> &DiscretePmf {
        &self.f_n
    }

    pub fn mean_sn(&self) -> f64 {
        self.mean_sn
    }

    pub fn prefix_minima(&self) -> &[i64] {
        &self.prefix_minima
    }

    pub fn tail_error_total(&self) -> f64 {
        self.tail_error_total
    }

    /// Evaluates the period-sum generating function `G(s) = E[s^{S}]`, or its
    /// `order`-th derivative, at a nonzero complex `s`.
    pub fn eval_gn(&self, s: Complex64, order: u32) -> Result<Complex64> {
        if s == Complex64::ZERO {
            return Err(Error::ZeroArgument);
        }
        let weights = self.f_n.weights();
        let lowest = self.f_n.min_support() - i64::from(order);
        let mut power = powi(s, lowest);
        let mut acc = Complex64::ZERO;
        for (i, &w) in weights.iter().enumerate() {
            let exponent = self.f_n.min_support() + i as i64;
            acc += w * falling(exponent, order) * power;
            power *= s;
        }
        Ok(acc)
    }

    /// Ascending coefficients of `s^d (G(s) - 1)`, the polynomial whose
    /// unit-disk zeros drive the boundary system.
    pub(crate) fn char_coeffs(&self) -> Vec<f64> {
        let d = self.d.max(0) as usize;
        let mut coeffs = self.f_n.weights().to_vec();
        if coeffs.len() < d + 1 {
            coeffs.resize(d + 1, 0.0);
        }
        coeffs[d] -= 1.0;
        coeffs
    }

    /// Assigns the qualitative regime. Fails only on an inconsistent summary
    /// where the drift is negative yet the descent depth is not positive.
    pub fn classify(&self) -> Result<CaseLabel> {
        if self.mean_sn > 0.0 {
            return Ok(CaseLabel::ZeroFunction);
        }
        if self.mean_sn == 0.0 {
            let degenerate = self.f_n.min_support() == 0 && self.f_n.weights().len() == 1;
            return Ok(if degenerate {
                CaseLabel::DegenerateStep
            } else {
                CaseLabel::ZeroFunction
            });
        }
        if self.d <= 0 {
            return Err(Error::DNotPositive { d: self.d });
        }
        Ok(if self.m <= 0 {
            CaseLabel::ComputableMleq0
        } else {
            CaseLabel::ComputableMgt0
        })
    }

    #[cfg(test)]
    pub(crate) fn for_tests(
        n: usize,
        d: i64,
        m: i64,
        f_n: DiscretePmf,
        mean_sn: f64,
        prefix_minima: Vec<i64>,
    ) -> Self {
        CycleSummary {
            n,
            d,
            m,
            f_n,
            mean_sn,
            prefix_minima,
            tail_error_total: 0.0,
        }
    }
}

pub(crate) fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `s^e` for possibly negative integer exponents.
pub(crate) fn powi(s: Complex64, e: i64) -> Complex64 {
    if e >= 0 {
        s.powu(e as u32)
    } else {
        s.powu((-e) as u32).inv()
    }
}

pub(crate) fn falling(j: i64, order: u32) -> f64 {
    let mut acc = 1.0;
    for r in 0..i64::from(order) {
        acc *= (j - r) as f64;
    }
    acc
}
