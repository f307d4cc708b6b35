//! Boundary values of the limit function from the unit-disk roots.
//!
//! The admitted roots, together with one mass-balance identity, pin down the
//! first `d` values of the limit function through a real `d x d` linear
//! system. For simple roots the same values also come out of a closed form
//! built from elementary symmetric functions of the roots; the two routes
//! cross-check each other.

use crate::cycle::{falling, powi, CycleSummary};
use crate::error::{Error, Result};
use crate::roots::RootSet;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const CONDITION_LIMIT: f64 = 1e12;
const CDF_SLACK: f64 = 1e-9;

/// Which route produced the boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    LinearSolve,
    ClosedForm,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::LinearSolve => "linear_solve",
            SolveMethod::ClosedForm => "closed_form",
        }
    }
}

/// The first `d` values of the limit function, anchored at `base`.
///
/// `values[k]` is the limit function at `base + k`, where `base` is the start
/// of the support when it is positive and zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    pub base: i64,
    pub values: Vec<f64>,
    /// Leftover in the mass-balance identity after solving.
    pub balance_residual: f64,
    /// Two-norm condition estimate of the boundary matrix.
    pub system_condition: f64,
    pub method: SolveMethod,
}

/// Derivative of order `deriv_order` of the `j`-th boundary polynomial at
/// `alpha`. The polynomial collects the coefficients multiplying the `j`-th
/// unknown in the root conditions.
pub fn row_coefficient(
    summary: &CycleSummary,
    j: usize,
    alpha: Complex64,
    deriv_order: u32,
) -> Result<Complex64> {
    let d = summary.d();
    if d < 1 {
        return Err(Error::DNotPositive { d });
    }
    if j >= d as usize {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: d as usize,
        });
    }
    let f_n = summary.f_n();
    let mut acc = Complex64::ZERO;
    for x in j as i64..d {
        let w = f_n.prob(x - j as i64 - d);
        if w == 0.0 || x < i64::from(deriv_order) {
            continue;
        }
        let fall = falling(x, deriv_order);
        acc += w * fall * powi(alpha, x - i64::from(deriv_order));
    }
    Ok(acc)
}

/// Assembles the real boundary system: one row per root condition (conjugate
/// pairs contribute a real and an imaginary row, multiple roots one row per
/// derivative order) plus the mass-balance row.
pub fn build_system(
    summary: &CycleSummary,
    set: &RootSet,
) -> Result<(DMatrix<f64>, DVector<f64>, f64)> {
    let (mat, rhs) = assemble(summary, set)?;
    let condition = condition_of(&mat);
    if condition.is_nan() || condition > CONDITION_LIMIT {
        return Err(Error::SingularSystem { condition });
    }
    Ok((mat, rhs, condition))
}

fn assemble(summary: &CycleSummary, set: &RootSet) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let d = summary.d();
    if d < 1 {
        return Err(Error::DNotPositive { d });
    }
    let n = d as usize;
    if set.total_multiplicity() != n - 1 {
        return Err(Error::InternalInconsistency(format!(
            "boundary system needs {} root conditions, root set carries {}",
            n - 1,
            set.total_multiplicity()
        )));
    }
    let mut mat = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    let mut row = 0;
    for root in set.roots() {
        if root.value.im < 0.0 {
            // covered by the conjugate's real/imaginary rows
            continue;
        }
        for order in 0..root.multiplicity as u32 {
            if root.value.im == 0.0 {
                for j in 0..n {
                    mat[(row, j)] = row_coefficient(summary, j, root.value, order)?.re;
                }
                row += 1;
            } else {
                for j in 0..n {
                    let c = row_coefficient(summary, j, root.value, order)?;
                    mat[(row, j)] = c.re;
                    mat[(row + 1, j)] = c.im;
                }
                row += 2;
            }
        }
    }
    if row != n - 1 {
        return Err(Error::InternalInconsistency(format!(
            "assembled {row} root rows, expected {}",
            n - 1
        )));
    }
    let f_n = summary.f_n();
    for j in 0..n {
        mat[(row, j)] = f_n.cdf(-(j as i64) - 1);
    }
    rhs[row] = -summary.mean_sn();
    Ok((mat, rhs))
}

fn condition_of(mat: &DMatrix<f64>) -> f64 {
    let sv = mat.clone().svd(false, false).singular_values;
    let largest = sv.max();
    let smallest = sv.min();
    if smallest <= 0.0 {
        f64::INFINITY
    } else {
        largest / smallest
    }
}

/// Solves the boundary system by LU factorization.
pub fn solve_boundary(summary: &CycleSummary, set: &RootSet) -> Result<BoundaryValues> {
    let (mat, rhs, condition) = build_system(summary, set)?;
    let solution = mat
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem { condition })?;
    let values = validate_cdf_segment(solution.as_slice())?;
    finish(summary, values, condition, SolveMethod::LinearSolve)
}

/// Evaluates the boundary values directly from elementary symmetric functions
/// of the roots. Requires all roots to be simple.
pub fn closed_form_boundary(summary: &CycleSummary, set: &RootSet) -> Result<BoundaryValues> {
    let d = summary.d();
    if d < 1 {
        return Err(Error::DNotPositive { d });
    }
    let n = d as usize;
    if set.max_multiplicity() > 1 {
        return Err(Error::MultipleRootsPresent {
            multiplicity: set.max_multiplicity(),
        });
    }
    if set.total_multiplicity() != n - 1 {
        return Err(Error::InternalInconsistency(format!(
            "closed form needs {} roots, root set carries {}",
            n - 1,
            set.total_multiplicity()
        )));
    }
    let alphas = set.expanded();
    let f_n = summary.f_n();
    let floor_mass = f_n.prob(-d);
    let mean = summary.mean_sn();

    let mut shrink_product = Complex64::ONE; // product of 1/(alpha - 1)
    let mut ratio_product = Complex64::ONE; // product of alpha/(alpha - 1)
    for &a in &alphas {
        let gap = a - Complex64::ONE;
        if gap.norm() == 0.0 {
            return Err(Error::InternalInconsistency(
                "root collides with the trivial zero at 1".into(),
            ));
        }
        shrink_product /= gap;
        ratio_product *= a / gap;
    }

    // alternating partial sums of the top elementary symmetric functions
    let mut alternating = Vec::with_capacity(n);
    let mut acc = Complex64::ZERO;
    for t in 0..n {
        let e = elementary_symmetric(&alphas, n - 1 - t)?;
        let signed = if t % 2 == 0 { e } else { -e };
        acc += signed;
        alternating.push(acc);
    }

    let mut values = vec![Complex64::ZERO; n];
    values[0] = ratio_product * (-mean / floor_mass);
    for k in 1..n {
        let mut conv = Complex64::ZERO;
        for i in 1..=k {
            conv += f_n.cdf(-d + i as i64) * values[k - i];
        }
        values[k] = -conv / floor_mass - (mean / floor_mass) * shrink_product * alternating[k];
    }

    let mut realized = Vec::with_capacity(n);
    for (k, v) in values.iter().enumerate() {
        if v.im.abs() > 1e-9 {
            return Err(Error::InternalInconsistency(format!(
                "boundary value {k} has imaginary part {:.3e}",
                v.im
            )));
        }
        realized.push(v.re);
    }
    let values = validate_cdf_segment(&realized)?;
    let (mat, _) = assemble(summary, set)?;
    finish(summary, values, condition_of(&mat), SolveMethod::ClosedForm)
}

fn finish(
    summary: &CycleSummary,
    values: Vec<f64>,
    condition: f64,
    method: SolveMethod,
) -> Result<BoundaryValues> {
    let f_n = summary.f_n();
    let pushdown: f64 = values
        .iter()
        .enumerate()
        .map(|(j, v)| v * f_n.cdf(-(j as i64) - 1))
        .sum();
    let base = if summary.m() > 0 { summary.m() } else { 0 };
    Ok(BoundaryValues {
        base,
        values,
        balance_residual: (pushdown + summary.mean_sn()).abs(),
        system_condition: condition,
        method,
    })
}

/// Checks a candidate CDF segment for monotonicity and range, allowing
/// round-off slack, then clamps it into a clean segment.
pub(crate) fn validate_cdf_segment(raw: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    let mut prev = 0.0f64;
    for (index, &v) in raw.iter().enumerate() {
        if !v.is_finite() || v < prev - CDF_SLACK || v > 1.0 + CDF_SLACK {
            return Err(Error::NonMonotoneSolution { index });
        }
        let clamped = v.clamp(0.0, 1.0).max(prev);
        out.push(clamped);
        prev = clamped;
    }
    Ok(out)
}

/// Elementary symmetric function `e_k` of the given values.
pub fn elementary_symmetric(values: &[Complex64], k: usize) -> Result<Complex64> {
    if k > values.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            limit: values.len(),
        });
    }
    let mut e = vec![Complex64::ZERO; k + 1];
    e[0] = Complex64::ONE;
    for &v in values {
        for i in (1..=k.min(e.len() - 1)).rev() {
            let lower = e[i - 1];
            e[i] += v * lower;
        }
    }
    Ok(e[k])
}
