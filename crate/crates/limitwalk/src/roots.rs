//! Unit-disk zeros of the characteristic polynomial `s^d (G(s) - 1)`.
//!
//! The polynomial has one trivial simple zero at `s = 1`; in the negative
//! drift regime exactly `d - 1` further zeros (with multiplicity) lie in the
//! closed unit disk, and those drive the boundary system. They are located
//! with an Ehrlich-Aberth sweep started from Newton-polygon moduli, polished
//! by damped Newton steps on the untrimmed coefficients, merged into
//! multiplicity clusters, and finally admitted by a modulus test whose slack
//! is bisected until the count comes out right.

use crate::cycle::CycleSummary;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

const MAX_SLACK: f64 = 1e-4;
const MIN_SLACK: f64 = 1e-12;

/// Tunables for the root search.
#[derive(Debug, Clone)]
pub struct RootConfig {
    /// Modulus slack first tried when admitting roots into the closed disk.
    pub disk_slack: f64,
    /// Distance below which refined zeros merge into one multiple root.
    pub cluster_tol: f64,
    /// Iteration cap for the simultaneous sweep.
    pub aberth_iterations: usize,
    /// Iteration cap for per-root Newton polishing.
    pub newton_iterations: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            disk_slack: 1e-7,
            cluster_tol: 1e-6,
            aberth_iterations: 300,
            newton_iterations: 120,
        }
    }
}

/// One admitted zero with its cluster multiplicity and residual.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRoot {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Largest deviation among the conditions the root must satisfy:
    /// `|G - 1|` at the root and, for multiplicity `m`, the first `m - 1`
    /// derivatives of `G`.
    pub residual: f64,
}

/// The admitted unit-disk zeros, conjugate-closed and sorted by
/// (real part, imaginary part).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootSet {
    roots: Vec<UnitRoot>,
}

impl RootSet {
    pub fn roots(&self) -> &[UnitRoot] {
        &self.roots
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Every root value repeated by multiplicity, in sorted order.
    pub fn expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for r in &self.roots {
            out.extend(std::iter::repeat_n(r.value, r.multiplicity));
        }
        out
    }

    pub(crate) fn from_parts(roots: Vec<UnitRoot>) -> Self {
        RootSet { roots }
    }
}

/// Finds the `d - 1` zeros of `s^d (G(s) - 1)` in the closed unit disk,
/// excluding the trivial zero at `s = 1`.
pub fn find_unit_roots(summary: &CycleSummary, cfg: &RootConfig) -> Result<RootSet> {
    let d = summary.d();
    if d < 1 {
        return Err(Error::DNotPositive { d });
    }
    let target = (d - 1) as usize;
    if target == 0 {
        return Ok(RootSet::default());
    }

    let coeffs = summary.char_coeffs();
    let stripped = strip_leading(&coeffs, d as usize);
    let candidates = aberth_roots(&stripped, cfg.aberth_iterations);

    // polish everything that could plausibly land in the disk against the
    // untrimmed coefficient table
    let mut refined = Vec::new();
    for z in candidates {
        if z.norm() <= 1.0 + 1e-3 {
            refined.push(newton_refine(&coeffs, z, cfg.newton_iterations)?);
        }
    }

    // the trivial zero at 1 must stand alone within cluster_tol
    let near_one = refined
        .iter()
        .filter(|z| (*z - Complex64::ONE).norm() <= cfg.cluster_tol)
        .count();
    if near_one > 1 {
        return Err(Error::RootCountMismatch {
            expected: target,
            found: target + near_one - 1,
        });
    }
    refined.retain(|z| (z - Complex64::ONE).norm() > cfg.cluster_tol);

    let clusters = symmetrize(cluster(&refined, cfg.cluster_tol), cfg.cluster_tol)?;

    let count_at = |slack: f64| -> usize {
        clusters
            .iter()
            .filter(|(c, _)| c.norm() <= 1.0 + slack)
            .map(|(_, m)| m)
            .sum()
    };
    let slack =
        admit_slack(&count_at, cfg.disk_slack, target).ok_or_else(|| Error::RootCountMismatch {
            expected: target,
            found: count_at(cfg.disk_slack),
        })?;

    let mut roots = Vec::new();
    for &(value, multiplicity) in clusters.iter().filter(|(c, _)| c.norm() <= 1.0 + slack) {
        let residual = residual_of(summary, value, multiplicity)?;
        roots.push(UnitRoot {
            value,
            multiplicity,
            residual,
        });
    }
    sort_roots(&mut roots);
    Ok(RootSet::from_parts(roots))
}

/// Recomputes, for each root, the deviations of the conditions it is meant to
/// satisfy. Entry `k` of the report is the residual of root `k` in sorted
/// order.
pub fn root_residual_report(summary: &CycleSummary, set: &RootSet) -> Result<Vec<f64>> {
    set.roots()
        .iter()
        .map(|r| residual_of(summary, r.value, r.multiplicity))
        .collect()
}

fn residual_of(summary: &CycleSummary, value: Complex64, multiplicity: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for order in 0..multiplicity as u32 {
        let g = summary.eval_gn(value, order)?;
        let want = if order == 0 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        };
        worst = worst.max((g - want).norm());
    }
    Ok(worst)
}

fn sort_roots(roots: &mut [UnitRoot]) {
    roots.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .expect("root coordinates are finite")
    });
}

/// Picks a modulus slack for which the admitted count hits `target`: the
/// configured slack if it already works, otherwise a geometric bisection over
/// [1e-12, 1e-4]. The count is nondecreasing in the slack.
fn admit_slack(count_at: &dyn Fn(f64) -> usize, first_try: f64, target: usize) -> Option<f64> {
    if count_at(first_try) == target {
        return Some(first_try);
    }
    let (mut lo, mut hi) = (MIN_SLACK, MAX_SLACK);
    if count_at(lo) > target || count_at(hi) < target {
        return None;
    }
    if count_at(lo) == target {
        return Some(lo);
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let c = count_at(mid);
        if c == target {
            return Some(mid);
        }
        if c < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    if count_at(hi) == target {
        Some(hi)
    } else {
        None
    }
}

/// Greedy centroid clustering of refined zeros.
fn cluster(points: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("refined zeros are finite")
    });
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    'next: for p in sorted {
        for g in groups.iter_mut() {
            let centroid = g.0 / g.1 as f64;
            if (centroid - p).norm() <= tol {
                g.0 += p;
                g.1 += 1;
                continue 'next;
            }
        }
        groups.push((p, 1));
    }
    groups
        .into_iter()
        .map(|(sum, count)| (sum / count as f64, count))
        .collect()
}

/// Forces the cluster set to be exactly closed under conjugation: snaps
/// near-real centroids onto the axis and averages conjugate partners.
fn symmetrize(clusters: Vec<(Complex64, usize)>, tol: f64) -> Result<Vec<(Complex64, usize)>> {
    const AXIS_SNAP: f64 = 1e-9;
    let mut out = Vec::with_capacity(clusters.len());
    let mut upper: Vec<(Complex64, usize)> = Vec::new();
    let mut lower: Vec<(Complex64, usize)> = Vec::new();
    for (c, m) in clusters {
        if c.im.abs() <= AXIS_SNAP {
            out.push((Complex64::new(c.re, 0.0), m));
        } else if c.im > 0.0 {
            upper.push((c, m));
        } else {
            lower.push((c, m));
        }
    }
    for (c, m) in upper {
        let want = c.conj();
        let partner = lower
            .iter()
            .position(|(z, mult)| *mult == m && (z - want).norm() <= 2.0 * tol);
        let Some(idx) = partner else {
            return Err(Error::InternalInconsistency(format!(
                "no conjugate partner for root near {c}"
            )));
        };
        let (z, _) = lower.swap_remove(idx);
        let re = 0.5 * (c.re + z.re);
        let im = 0.5 * (c.im - z.im);
        out.push((Complex64::new(re, im), m));
        out.push((Complex64::new(re, -im), m));
    }
    if let Some((z, _)) = lower.first() {
        return Err(Error::InternalInconsistency(format!(
            "no conjugate partner for root near {z}"
        )));
    }
    Ok(out)
}

/// Drops trailing coefficients that are negligible against the largest one,
/// never below degree `keep_degree`.
fn strip_leading(coeffs: &[f64], keep_degree: usize) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
    let mut out = coeffs.to_vec();
    while out.len() > keep_degree + 1 && out.last().unwrap().abs() <= 1e-14 * scale {
        out.pop();
    }
    while out.len() > 1 && *out.last().unwrap() == 0.0 {
        out.pop();
    }
    out
}

/// Value and derivative of a real-coefficient polynomial at `z`.
fn eval_poly(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::ZERO;
    let mut dp = Complex64::ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Magnitude scale of the polynomial at modulus `|z|`, for residual tests.
fn poly_scale(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * r + c.abs();
    }
    acc.max(f64::MIN_POSITIVE)
}

/// All complex zeros of `coeffs` (ascending, nonzero leading coefficient) by
/// simultaneous Ehrlich-Aberth iteration with Newton-polygon start moduli.
pub(crate) fn aberth_roots(coeffs: &[f64], max_iterations: usize) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let mut z = initial_guesses(coeffs);
    debug_assert_eq!(z.len(), degree);
    for _ in 0..max_iterations {
        let mut biggest = 0.0f64;
        for i in 0..z.len() {
            let (p, dp) = eval_poly(coeffs, z[i]);
            if p.norm() <= f64::EPSILON * poly_scale(coeffs, z[i]) {
                continue;
            }
            let dp = if dp == Complex64::ZERO {
                Complex64::new(f64::MIN_POSITIVE.sqrt(), 0.0)
            } else {
                dp
            };
            let newton = p / dp;
            let mut repulsion = Complex64::ZERO;
            for j in 0..z.len() {
                if i == j {
                    continue;
                }
                let mut diff = z[i] - z[j];
                if diff == Complex64::ZERO {
                    diff = Complex64::new(1e-12, 1e-12);
                }
                repulsion += diff.inv();
            }
            let denom = Complex64::ONE - newton * repulsion;
            let step = if denom.norm() < 1e-290 {
                newton
            } else {
                newton / denom
            };
            z[i] -= step;
            if !z[i].is_finite() {
                // deterministic restart for a guess that blew up
                z[i] = Complex64::from_polar(0.5 + i as f64 / z.len() as f64, 0.3 + i as f64);
            }
            biggest = biggest.max(step.norm() / (1.0 + z[i].norm()));
        }
        if biggest < 1e-13 {
            break;
        }
    }
    z
}

/// Start moduli from the upper convex hull of `(i, ln |c_i|)`, angles fanned
/// out per hull segment.
fn initial_guesses(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(i, &c)| (i as f64, c.abs().ln()))
        .collect();
    let hull = upper_hull(&pts);
    let mut guesses = Vec::with_capacity(degree);
    for (seg, pair) in hull.windows(2).enumerate() {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        let count = (x1 - x0).round() as usize;
        let radius = ((y0 - y1) / (x1 - x0)).exp();
        for t in 0..count {
            let angle =
                TAU * t as f64 / count as f64 + TAU * seg as f64 / degree.max(1) as f64 + 0.7;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    debug_assert_eq!(guesses.len(), degree);
    guesses
}

fn upper_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Damped Newton polishing of one zero against the full coefficient table.
fn newton_refine(coeffs: &[f64], start: Complex64, max_iterations: usize) -> Result<Complex64> {
    let mut z = start;
    let (mut p, mut dp) = eval_poly(coeffs, z);
    for _ in 0..max_iterations {
        if p.norm() <= 4.0 * f64::EPSILON * poly_scale(coeffs, z) {
            return Ok(z);
        }
        let slope = if dp == Complex64::ZERO {
            Complex64::new(f64::MIN_POSITIVE.sqrt(), 0.0)
        } else {
            dp
        };
        let step = p / slope;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= 1.0 / 4096.0 {
            let trial = z - lambda * step;
            let (tp, tdp) = eval_poly(coeffs, trial);
            if tp.norm() < p.norm() {
                z = trial;
                p = tp;
                dp = tdp;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // stagnated: accept if the step itself is negligible
            if step.norm() <= 1e-12 * (1.0 + z.norm()) {
                return Ok(z);
            }
            return Err(Error::NewtonDivergence { start });
        }
        if (lambda * step.norm()) <= f64::EPSILON * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    if p.norm() <= 1e-10 * poly_scale(coeffs, z) {
        Ok(z)
    } else {
        Err(Error::NewtonDivergence { start })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::CyclePattern;
    use crate::pmf::DiscretePmf;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn summary_of(laws: Vec<DiscretePmf>) -> CycleSummary {
        CyclePattern::new(laws).unwrap().summarize(TOL).unwrap()
    }

    #[test]
    fn aberth_solves_a_cubic_with_known_zeros() {
        // (s - 1)(s - 2)(s + 3) = s^3 - 7s + 6
        let mut zeros = aberth_roots(&[6.0, -7.0, 0.0, 1.0], 300);
        zeros.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let want = [-3.0, 1.0, 2.0];
        for (z, w) in zeros.iter().zip(want) {
            assert!((z - Complex64::new(w, 0.0)).norm() < 1e-9, "{z} vs {w}");
        }
    }

    #[test]
    fn aberth_handles_a_double_zero() {
        // (s + 1/2)^2 (s - 2) = s^3 - s^2 - 7/4 s - 1/2
        let zeros = aberth_roots(&[-0.5, -1.75, -1.0, 1.0], 300);
        let near_half: Vec<_> = zeros
            .iter()
            .filter(|z| (*z - Complex64::new(-0.5, 0.0)).norm() < 1e-5)
            .collect();
        assert_eq!(near_half.len(), 2);
        assert!(zeros
            .iter()
            .any(|z| (z - Complex64::new(2.0, 0.0)).norm() < 1e-9));
    }

    #[test]
    fn two_point_pattern_has_conjugate_pair() {
        let summary = summary_of(vec![DiscretePmf::from_weights(
            -3,
            &[0.5, 0.0, 0.0, 0.0, 0.5],
        )
        .unwrap()]);
        let set = find_unit_roots(&summary, &RootConfig::default()).unwrap();
        assert_eq!(set.total_multiplicity(), 2);
        assert_eq!(set.roots().len(), 2);
        let lower = set.roots()[0].value;
        let upper = set.roots()[1].value;
        assert_eq!(lower.conj(), upper);
        assert!(upper.im > 0.0);
        assert!((upper - Complex64::new(-0.419643, 0.606291)).norm() < 1e-5);
        for r in set.roots() {
            assert!(r.residual < 1e-10);
            assert!(r.value.norm() < 1.0);
        }
    }

    #[test]
    fn descent_depth_one_has_no_roots() {
        let summary = summary_of(vec![
            DiscretePmf::from_weights(-1, &[0.7, 0.2, 0.1]).unwrap()
        ]);
        assert_eq!(summary.d(), 1);
        let set = find_unit_roots(&summary, &RootConfig::default()).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn deterministic_descent_puts_roots_on_the_circle() {
        let summary = summary_of(vec![DiscretePmf::from_weights(-2, &[1.0]).unwrap()]);
        let set = find_unit_roots(&summary, &RootConfig::default()).unwrap();
        assert_eq!(set.total_multiplicity(), 1);
        let root = set.roots()[0].value;
        assert!((root - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!(set.roots()[0].residual < 1e-12);
    }

    #[test]
    fn cube_descent_finds_the_unit_circle_pair() {
        let summary = summary_of(vec![DiscretePmf::from_weights(-3, &[1.0]).unwrap()]);
        let set = find_unit_roots(&summary, &RootConfig::default()).unwrap();
        assert_eq!(set.total_multiplicity(), 2);
        let upper = set.roots()[1].value;
        let want = Complex64::from_polar(1.0, TAU / 3.0);
        assert!((upper - want).norm() < 1e-10);
    }

    #[test]
    fn roots_are_stable_under_tighter_tail_truncation() {
        let at = |tol: f64| {
            let laws = vec![
                DiscretePmf::geometric(0.55, tol).unwrap(),
                DiscretePmf::shifted_poisson(0.5, -3, tol).unwrap(),
                DiscretePmf::discrete_weibull_unit(tol).unwrap(),
            ];
            find_unit_roots(&summary_of(laws), &RootConfig::default()).unwrap()
        };
        let coarse = at(1e-10);
        let fine = at(1e-11);
        assert_eq!(coarse.roots().len(), fine.roots().len());
        for root in coarse.roots() {
            let moved = fine
                .roots()
                .iter()
                .map(|other| (other.value - root.value).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(moved < 1e-6, "root {} moved {moved:.3e}", root.value);
        }
    }

    #[test]
    fn residual_report_matches_stored_residuals() {
        let summary = summary_of(vec![DiscretePmf::from_weights(
            -3,
            &[0.5, 0.0, 0.0, 0.0, 0.5],
        )
        .unwrap()]);
        let set = find_unit_roots(&summary, &RootConfig::default()).unwrap();
        let report = root_residual_report(&summary, &set).unwrap();
        assert_eq!(report.len(), set.roots().len());
        for (got, root) in report.iter().zip(set.roots()) {
            assert!((got - root.residual).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_d_is_rejected() {
        let summary = summary_of(vec![DiscretePmf::from_weights(0, &[0.5, 0.5]).unwrap()]);
        assert_eq!(summary.d(), 0);
        assert_eq!(
            find_unit_roots(&summary, &RootConfig::default()),
            Err(Error::DNotPositive { d: 0 })
        );
    }

    fn arb_drift_pattern() -> impl Strategy<Value = CyclePattern> {
        let law = (
            -3i64..=-1,
            proptest::collection::vec(0.02f64..1.0, 1..5),
            0.4f64..1.0,
        );
        proptest::collection::vec(law, 1..=2).prop_filter_map(
            "needs clear negative drift",
            |specs| {
                let laws: Vec<DiscretePmf> = specs
                    .into_iter()
                    .map(|(min, mut w, head)| {
                        w.insert(0, head);
                        DiscretePmf::from_weights(min, &w).unwrap()
                    })
                    .collect();
                let pattern = CyclePattern::new(laws).ok()?;
                let mean: f64 = pattern.laws().iter().map(DiscretePmf::mean).sum();
                (mean < -0.15).then_some(pattern)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_patterns_yield_full_conjugate_closed_sets(pattern in arb_drift_pattern()) {
            let summary = pattern.summarize(TOL).unwrap();
            let set = find_unit_roots(&summary, &RootConfig::default()).unwrap();
            prop_assert_eq!(set.total_multiplicity() as i64, summary.d() - 1);
            for r in set.roots() {
                prop_assert!(r.value.norm() <= 1.0 + MAX_SLACK);
                prop_assert!(r.residual < 1e-8, "residual {}", r.residual);
                prop_assert!((r.value - Complex64::ONE).norm() > 1e-6);
                if r.value.im != 0.0 {
                    let conj = r.value.conj();
                    prop_assert!(set.roots().iter().any(
                        |o| o.value == conj && o.multiplicity == r.multiplicity
                    ));
                }
            }
            // sorted by (re, im)
            for pair in set.roots().windows(2) {
                let a = (pair[0].value.re, pair[0].value.im);
                let b = (pair[1].value.re, pair[1].value.im);
                prop_assert!(a < b);
            }
        }
    }
}
