//! Exact limit distributions for periodic integer random walks kept below a
//! running ceiling.
//!
//! Given one period of independent integer step laws, each bounded from
//! below, this crate computes the limiting probability that every prefix sum
//! of the infinite walk stays at or below a level `x`. The construction works
//! through the unit-disk zeros of the period-sum generating function, a small
//! boundary linear system, and an integer recurrence, and ships with two
//! independent checks: an exact finite-horizon dynamic program and a seeded
//! Monte Carlo estimator.

pub mod boundary;
pub mod cli;
pub mod cycle;
pub mod error;
pub mod limitdist;
pub mod oracle;
pub mod pmf;
pub mod roots;

pub use boundary::{
    build_system, closed_form_boundary, row_coefficient, solve_boundary, BoundaryValues,
    SolveMethod,
};
pub use cycle::{CaseLabel, CyclePattern, CycleSummary};
pub use error::{Error, Result};
pub use limitdist::{BuildConfig, LimitDistribution};
pub use oracle::{
    dp_bound, mc_estimate, verify, OracleMethod, OracleReport, VerifyConfig, VerifyRow,
};
pub use pmf::DiscretePmf;
pub use roots::{find_unit_roots, RootConfig, RootSet, UnitRoot};
