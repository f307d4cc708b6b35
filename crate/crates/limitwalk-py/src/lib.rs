//! Python bindings: discrete laws, the limit distribution of the
//! running-maximum constrained periodic walk, and the two simulation oracles.
//!
//! Input mistakes (bad weights, malformed parameters) surface as
//! `ValueError`; numerical failures deeper in the pipeline (root finding,
//! singular systems, recurrence instability) surface as `RuntimeError`.

use limitwalk::{
    dp_bound as core_dp_bound, mc_estimate as core_mc_estimate, verify as core_verify, BuildConfig,
    CyclePattern, DiscretePmf, Error, LimitDistribution, SolveMethod, VerifyConfig,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

/// (x, analytic, mc, dp, pass) as returned by `LimitDist.verify`.
type VerifyTuple = (i64, f64, f64, f64, bool);

fn to_py_err(e: Error) -> PyErr {
    match e.exit_code() {
        1 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn pattern_from(laws: Vec<PyRef<'_, Pmf>>) -> PyResult<CyclePattern> {
    let laws: Vec<DiscretePmf> = laws.iter().map(|law| law.inner.clone()).collect();
    CyclePattern::new(laws).map_err(to_py_err)
}

/// A probability mass function on a finite integer support.
#[pyclass(frozen)]
struct Pmf {
    inner: DiscretePmf,
}

#[pymethods]
impl Pmf {
    /// Law from explicit weights starting at `min_support`; weights are
    /// normalized and the lowest one must be positive.
    #[staticmethod]
    fn from_weights(min_support: i64, weights: Vec<f64>) -> PyResult<Self> {
        DiscretePmf::from_weights(min_support, &weights)
            .map(|inner| Pmf { inner })
            .map_err(to_py_err)
    }

    /// Geometric law on {1, 2, ...} with success probability `p`, truncated
    /// once the remaining tail mass drops below `tol`.
    #[staticmethod]
    #[pyo3(signature = (p, tol=1e-12))]
    fn geometric(p: f64, tol: f64) -> PyResult<Self> {
        DiscretePmf::geometric(p, tol)
            .map(|inner| Pmf { inner })
            .map_err(to_py_err)
    }

    /// Poisson law with rate `lam`, translated by `shift`.
    #[staticmethod]
    #[pyo3(signature = (lam, shift, tol=1e-12))]
    fn shifted_poisson(lam: f64, shift: i64, tol: f64) -> PyResult<Self> {
        DiscretePmf::shifted_poisson(lam, shift, tol)
            .map(|inner| Pmf { inner })
            .map_err(to_py_err)
    }

    /// Discrete law on {0, 1, ...} with survival P(X >= k) = exp(-k).
    #[staticmethod]
    #[pyo3(signature = (tol=1e-12))]
    fn discrete_weibull_unit(tol: f64) -> PyResult<Self> {
        DiscretePmf::discrete_weibull_unit(tol)
            .map(|inner| Pmf { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn min_support(&self) -> i64 {
        self.inner.min_support()
    }

    #[getter]
    fn max_support(&self) -> i64 {
        self.inner.max_support()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    /// Probability mass discarded when an infinite support was truncated.
    #[getter]
    fn tail_error(&self) -> f64 {
        self.inner.tail_error()
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn prob(&self, value: i64) -> f64 {
        self.inner.prob(value)
    }

    fn cdf(&self, value: i64) -> f64 {
        self.inner.cdf(value)
    }

    fn __repr__(&self) -> String {
        format!(
            "Pmf(min_support={}, points={})",
            self.inner.min_support(),
            self.inner.weights().len()
        )
    }
}

/// Limit distribution of the walk constrained to stay at or below a level at
/// every step, built from the unit-disk roots of the period generating
/// function and the boundary linear system.
#[pyclass(frozen)]
struct LimitDist {
    inner: LimitDistribution,
}

#[pymethods]
impl LimitDist {
    #[new]
    #[pyo3(signature = (laws, tail_tol=1e-12, method="linear_solve"))]
    fn new(laws: Vec<PyRef<'_, Pmf>>, tail_tol: f64, method: &str) -> PyResult<Self> {
        let pattern = pattern_from(laws)?;
        let boundary_method = match method {
            "linear_solve" => SolveMethod::LinearSolve,
            "closed_form" => SolveMethod::ClosedForm,
            other => {
                return Err(PyValueError::new_err(format!(
                    "method must be 'linear_solve' or 'closed_form', got {other:?}"
                )))
            }
        };
        let cfg = BuildConfig {
            tail_tol,
            boundary_method,
            ..BuildConfig::default()
        };
        LimitDistribution::build(&pattern, &cfg)
            .map(|inner| LimitDist { inner })
            .map_err(to_py_err)
    }

    /// One of "computable_m_leq_0", "computable_m_gt_0", "zero_function",
    /// "degenerate_step".
    #[getter]
    fn case(&self) -> &'static str {
        self.inner.case().as_str()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.summary().n()
    }

    /// Descent depth D: minus the summed per-law minima.
    #[getter]
    fn d(&self) -> i64 {
        self.inner.summary().d()
    }

    /// Left support edge M: the peak of the prefix sums of the minima.
    #[getter]
    fn m(&self) -> i64 {
        self.inner.summary().m()
    }

    #[getter]
    fn mean_sn(&self) -> f64 {
        self.inner.summary().mean_sn()
    }

    /// First index carrying boundary mass, or None when the limit is
    /// degenerate.
    #[getter]
    fn base(&self) -> Option<i64> {
        self.inner.boundary().map(|b| b.base)
    }

    #[getter]
    fn boundary_values(&self) -> Option<Vec<f64>> {
        self.inner.boundary().map(|b| b.values.clone())
    }

    /// Unit-disk roots as (re, im, multiplicity) triples.
    #[getter]
    fn roots(&self) -> Vec<(f64, f64, usize)> {
        self.inner
            .roots()
            .roots()
            .iter()
            .map(|r| (r.value.re, r.value.im, r.multiplicity))
            .collect()
    }

    fn cdf(&self, x: i64) -> PyResult<f64> {
        self.inner.cdf(x).map_err(to_py_err)
    }

    fn pmf(&self, k: i64) -> PyResult<f64> {
        self.inner.pmf_xi(k).map_err(to_py_err)
    }

    /// Generating function of the limit values at a complex argument.
    fn xi(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.xi_series(s).map_err(to_py_err)
    }

    fn recurrence_residual(&self, x: i64) -> PyResult<f64> {
        self.inner.recurrence_residual(x).map_err(to_py_err)
    }

    /// Cross-checks analytic values against both oracles; returns rows of
    /// (x, analytic, mc, dp, pass).
    #[pyo3(signature = (xs, trials=1_000_000, horizon=2000, seed=1))]
    fn verify(
        &self,
        xs: Vec<i64>,
        trials: u64,
        horizon: usize,
        seed: u64,
    ) -> PyResult<Vec<VerifyTuple>> {
        let cfg = VerifyConfig {
            trials,
            horizon,
            seed,
            ..VerifyConfig::default()
        };
        core_verify(&self.inner, &xs, &cfg)
            .map(|rows| {
                rows.into_iter()
                    .map(|r| (r.x, r.analytic, r.mc.estimate, r.dp.estimate, r.pass))
                    .collect()
            })
            .map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "LimitDist(case={:?}, n={}, d={}, m={})",
            self.inner.case().as_str(),
            self.inner.summary().n(),
            self.inner.summary().d(),
            self.inner.summary().m()
        )
    }
}

/// Monte Carlo estimate of P(S_1 <= x, ..., S_horizon <= x); returns
/// (estimate, stderr).
#[pyfunction]
#[pyo3(signature = (laws, x, horizon, trials, seed=1))]
fn mc_estimate(
    laws: Vec<PyRef<'_, Pmf>>,
    x: i64,
    horizon: usize,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let pattern = pattern_from(laws)?;
    core_mc_estimate(&pattern, x, horizon, trials, seed)
        .map(|r| (r.estimate, r.stderr))
        .map_err(to_py_err)
}

/// Exact finite-horizon value of the same probability by forward dynamic
/// programming; an upper bound that decreases to the limit.
#[pyfunction]
#[pyo3(signature = (laws, x, horizon, state_budget=100_000_000))]
fn dp_bound(laws: Vec<PyRef<'_, Pmf>>, x: i64, horizon: usize, state_budget: u64) -> PyResult<f64> {
    let pattern = pattern_from(laws)?;
    core_dp_bound(&pattern, x, horizon, state_budget)
        .map(|r| r.estimate)
        .map_err(to_py_err)
}

#[pymodule]
fn limitwalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pmf>()?;
    m.add_class::<LimitDist>()?;
    m.add_function(wrap_pyfunction!(mc_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(dp_bound, m)?)?;
    Ok(())
}
