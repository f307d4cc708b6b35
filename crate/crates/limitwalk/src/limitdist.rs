//! The assembled limit distribution.
//!
//! Build order: summarize, classify, locate unit-disk roots, solve the
//! boundary system. The resulting seed values are extended to any `x` by the
//! one-period identity, rearranged into a forward recurrence and memoized in
//! increasing order. Division by the floor mass amplifies round-off as `x`
//! grows; a clamp separates benign noise from genuine drift and deep queries
//! fail loudly rather than return garbage.

use crate::boundary::{
    closed_form_boundary, row_coefficient, solve_boundary, BoundaryValues, SolveMethod,
};
use crate::cycle::{CaseLabel, CyclePattern, CycleSummary};
use crate::error::{Error, Result};
use crate::roots::{find_unit_roots, RootConfig, RootSet};
use num_complex::Complex64;
use std::sync::Mutex;

/// Violations of [0,1] bounds or monotonicity beyond this are reported as
/// instability; anything smaller is clamped as round-off.
const CLAMP_TOL: f64 = 1e-7;

/// Knobs for assembling a limit distribution.
#[derive(Debug, Clone)]
pub struct BuildConfig {
    /// Tail mass discarded when truncating infinite supports.
    pub tail_tol: f64,
    pub root: RootConfig,
    /// Which boundary route seeds the distribution.
    pub boundary_method: SolveMethod,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            tail_tol: 1e-12,
            root: RootConfig::default(),
            boundary_method: SolveMethod::LinearSolve,
        }
    }
}

/// Limiting distribution of the running-maximum constrained walk.
///
/// `cdf(x)` is the limiting probability that every prefix sum of the walk
/// stays at or below `x`; it vanishes below the support edge and increases to
/// one. The memo holds computed values from the support edge upward.
#[derive(Debug)]
pub struct LimitDistribution {
    pattern: CyclePattern,
    summary: CycleSummary,
    case: CaseLabel,
    roots: RootSet,
    boundary: Option<BoundaryValues>,
    memo: Mutex<Vec<f64>>,
}

impl LimitDistribution {
    pub fn build(pattern: &CyclePattern, cfg: &BuildConfig) -> Result<Self> {
        let summary = pattern.summarize(cfg.tail_tol)?;
        let case = summary.classify()?;
        match case {
            CaseLabel::ZeroFunction | CaseLabel::DegenerateStep => Ok(LimitDistribution {
                pattern: pattern.clone(),
                summary,
                case,
                roots: RootSet::default(),
                boundary: None,
                memo: Mutex::new(Vec::new()),
            }),
            CaseLabel::ComputableMleq0 | CaseLabel::ComputableMgt0 => {
                let roots = find_unit_roots(&summary, &cfg.root)?;
                let boundary = match cfg.boundary_method {
                    SolveMethod::LinearSolve => solve_boundary(&summary, &roots)?,
                    SolveMethod::ClosedForm => closed_form_boundary(&summary, &roots)?,
                };
                let memo = seed_memo(&summary, &boundary);
                Ok(LimitDistribution {
                    pattern: pattern.clone(),
                    summary,
                    case,
                    roots,
                    boundary: Some(boundary),
                    memo: Mutex::new(memo),
                })
            }
        }
    }

    pub fn pattern(&self) -> &CyclePattern {
        &self.pattern
    }

    pub fn summary(&self) -> &CycleSummary {
        &self.summary
    }

    pub fn case(&self) -> CaseLabel {
        self.case
    }

    pub fn roots(&self) -> &RootSet {
        &self.roots
    }

    /// Boundary values; absent for the zero and degenerate regimes.
    pub fn boundary(&self) -> Option<&BoundaryValues> {
        self.boundary.as_ref()
    }

    /// The limiting probability that the whole walk stays at or below `x`.
    pub fn cdf(&self, x: i64) -> Result<f64> {
        match self.case {
            CaseLabel::ZeroFunction => Ok(0.0),
            CaseLabel::DegenerateStep => Ok(if x >= self.summary.m() { 1.0 } else { 0.0 }),
            CaseLabel::ComputableMleq0 | CaseLabel::ComputableMgt0 => {
                let m = self.summary.m();
                if x < m {
                    return Ok(0.0);
                }
                let mut memo = self.memo.lock().expect("memo lock");
                self.fill_to(&mut memo, x)?;
                Ok(memo[(x - m) as usize])
            }
        }
    }

    /// Point mass of the all-time-peak variable at `k`.
    pub fn pmf_xi(&self, k: i64) -> Result<f64> {
        let hi = self.cdf(k)?;
        let lo = self.cdf(k - 1)?;
        Ok((hi - lo).max(0.0))
    }

    /// Generating function of the limit values anchored at the boundary base:
    /// the series over `x >= base` of `cdf(x) s^{x-base}`, evaluated through
    /// the closed identity rather than term-by-term summation.
    pub fn xi_series(&self, s: Complex64) -> Result<Complex64> {
        if !s.norm().is_finite() || s.norm() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "series argument must lie strictly inside the unit disk, got |s| = {}",
                s.norm()
            )));
        }
        match self.case {
            CaseLabel::ZeroFunction => Ok(Complex64::ZERO),
            CaseLabel::DegenerateStep => Ok((Complex64::ONE - s).inv()),
            CaseLabel::ComputableMleq0 | CaseLabel::ComputableMgt0 => {
                let boundary = self.boundary.as_ref().expect("computable case");
                let coeffs = self.summary.char_coeffs();
                let mut denom = Complex64::ZERO;
                for &c in coeffs.iter().rev() {
                    denom = denom * s + c;
                }
                if denom.norm() <= 1e-12 {
                    return Err(Error::NearRootArgument {
                        magnitude: denom.norm(),
                    });
                }
                let mut num = Complex64::ZERO;
                for (j, &v) in boundary.values.iter().enumerate() {
                    num += v * row_coefficient(&self.summary, j, s, 0)?;
                }
                Ok(num / denom)
            }
        }
    }

    /// Deviation of the unrearranged one-period identity at `x`, evaluated in
    /// fresh arithmetic over the memoized values. Small values certify the
    /// fill is internally consistent up to `x`.
    pub fn recurrence_residual(&self, x: i64) -> Result<f64> {
        match self.case {
            CaseLabel::ComputableMleq0 | CaseLabel::ComputableMgt0 => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "recurrence residuals are defined for computable patterns only".into(),
                ))
            }
        }
        let m = self.summary.m();
        if x < m {
            return Err(Error::InvalidParameter(format!(
                "identity applies on the support, from {m} upward; got {x}"
            )));
        }
        let d = self.summary.d();
        let f = self.summary.f_n();
        let lo = self.boundary.as_ref().expect("computable case").base;
        let mut memo = self.memo.lock().expect("memo lock");
        self.fill_to(&mut memo, x + d)?;
        let j_from = lo.max(x - f.max_support());
        let mut acc = 0.0;
        for j in j_from..=x + d {
            acc += f.prob(x - j) * memo[(j - m) as usize];
        }
        Ok((memo[(x - m) as usize] - acc).abs())
    }

    fn fill_to(&self, memo: &mut Vec<f64>, x: i64) -> Result<()> {
        let m = self.summary.m();
        let d = self.summary.d();
        let f = self.summary.f_n();
        let floor = f.prob(-d);
        let lo = self.boundary.as_ref().expect("computable case").base;
        let jmax = f.max_support();
        while (memo.len() as i64) <= x - m {
            let next = m + memo.len() as i64;
            // rearranged identity anchored at next - d
            let j_from = lo.max(next - d - jmax);
            let mut acc = 0.0;
            for j in j_from..next {
                acc += f.prob(next - d - j) * memo[(j - m) as usize];
            }
            let anchor = memo[(next - d - m) as usize];
            let prev = memo[(next - 1 - m) as usize];
            let raw = (anchor - acc) / floor;
            let breach = (-raw).max(raw - 1.0).max(prev - raw);
            if breach > CLAMP_TOL {
                return Err(Error::RecurrenceInstability {
                    x: next,
                    magnitude: breach,
                });
            }
            memo.push(raw.clamp(prev, 1.0));
        }
        Ok(())
    }
}

/// Initial memo: boundary values, preceded for a non-positive support edge by
/// the directly summed values on the negative range.
fn seed_memo(summary: &CycleSummary, boundary: &BoundaryValues) -> Vec<f64> {
    let m = summary.m();
    if m > 0 {
        return boundary.values.clone();
    }
    let d = summary.d();
    let f = summary.f_n();
    let seeds = &boundary.values;
    let mut memo = Vec::with_capacity((d - m) as usize);
    for x in m..0 {
        let j_from = (x - f.max_support()).max(0);
        let mut acc = 0.0;
        for j in j_from..=x + d {
            acc += f.prob(x - j) * seeds[j as usize];
        }
        memo.push(acc.clamp(0.0, 1.0));
    }
    memo.extend_from_slice(seeds);
    memo
}
