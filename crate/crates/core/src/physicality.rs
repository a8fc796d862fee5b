//! Necessary conditions for a radial function to be a Wigner function.
//!
//! Two checks are available: positivity of the position marginal, and
//! positivity of the overlap with every number state up to `n_max`. Failing
//! either proves the candidate is not a quantum state. Passing proves nothing.

use crate::error::Result;
use crate::phase_core::{
    check_normalized, covariance_of_with, fock_wigner, overlap_radial, Numerics, RadialFunction, Wigner,
};
use crate::quadrature::{uniform_breaks, Quadrature, DEFAULT_REL_TOL};

/// Number of Fock states tested by default.
pub const DEFAULT_N_MAX: u32 = 40;

/// Values above `−NEGATIVITY_TOL` are not treated as negative.
pub const NEGATIVITY_TOL: f64 = 1e-9;

const MARGINAL_POINTS: usize = 129;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    PassedUpToNmax,
    FailedAtN(u32),
    MarginalNegative,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::PassedUpToNmax => f.write_str("passed"),
            Verdict::FailedAtN(n) => write!(f, "failed at n={n}"),
            Verdict::MarginalNegative => f.write_str("marginal negative"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalityReport {
    /// Smallest sampled marginal, when the marginal scan ran.
    pub marginal_min: Option<f64>,
    pub n_max: u32,
    /// `(n, ⟨n|ρ|n⟩)` for every tested `n`.
    pub overlaps: Vec<(u32, f64)>,
    pub first_negative_n: Option<u32>,
    /// Orders whose overlap fell in `[−NEGATIVITY_TOL, 0)`.
    pub indeterminate: Vec<u32>,
    pub verdict: Verdict,
}

/// `⟨x|ρ|x⟩ = ∫ W(x² + p²) dp`.
pub fn marginal_x(w: &RadialFunction, x: f64) -> Result<f64> {
    marginal_x_with(w, x, DEFAULT_REL_TOL)
}

fn marginal_x_with(w: &RadialFunction, x: f64, rel_tol: f64) -> Result<f64> {
    let support = w.support();
    let x2 = x * x;
    let p_lo = (support.lo - x2).max(0.0).sqrt();
    let r_hi = if support.is_bounded() {
        support.hi
    } else {
        w.effective_extent()
    };
    if r_hi <= x2 || r_hi <= support.lo {
        return Ok(0.0);
    }
    let p_hi = (r_hi - x2).sqrt();
    if p_hi <= p_lo {
        return Ok(0.0);
    }
    let mut breaks = uniform_breaks(p_lo, p_hi, w.panel_count().max(4));
    if let Some(knots) = w.knots() {
        breaks.extend(
            knots
                .iter()
                .filter(|&&k| k > x2)
                .map(|&k| (k - x2).sqrt())
                .filter(|&p| p > p_lo && p < p_hi),
        );
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
    let half = Quadrature::with_rel_tol(rel_tol).integrate_panels(|p| w.eval(x2 + p * p), &breaks)?;
    Ok(2.0 * half)
}

/// Overlaps with `|0⟩ … |n_max⟩`; the first one below `−NEGATIVITY_TOL` fails the test.
pub fn hillery_fock_test(w: &RadialFunction, n_max: u32) -> Result<PhysicalityReport> {
    hillery_fock_test_with(w, n_max, &Numerics::default())
}

pub fn hillery_fock_test_with(w: &RadialFunction, n_max: u32, num: &Numerics) -> Result<PhysicalityReport> {
    check_normalized(&Wigner::Radial(w.clone()), num)?;
    let mut report = fock_sweep(w, n_max, num)?;
    report.marginal_min = None;
    Ok(report)
}

fn fock_sweep(w: &RadialFunction, n_max: u32, num: &Numerics) -> Result<PhysicalityReport> {
    let mut overlaps = Vec::with_capacity(n_max as usize + 1);
    let mut first_negative_n = None;
    let mut indeterminate = Vec::new();
    for n in 0..=n_max {
        let v = overlap_radial(w, &fock_wigner(n), num)?;
        if v < -NEGATIVITY_TOL {
            first_negative_n.get_or_insert(n);
        } else if v < 0.0 {
            indeterminate.push(n);
        }
        overlaps.push((n, v));
    }
    Ok(PhysicalityReport {
        marginal_min: None,
        n_max,
        overlaps,
        first_negative_n,
        indeterminate,
        verdict: first_negative_n.map_or(Verdict::PassedUpToNmax, Verdict::FailedAtN),
    })
}

/// Normalization, then the marginal on 129 points of `[0, 6√C]`, then the Fock sweep.
///
/// `C` is the thermal parameter of the Gaussian reference (`γ = 2C·I`).
/// A negative marginal ends the check before any overlap is computed.
pub fn check_candidate(w: &RadialFunction, n_max: u32) -> Result<PhysicalityReport> {
    check_candidate_with(w, n_max, &Numerics::default())
}

pub fn check_candidate_with(w: &RadialFunction, n_max: u32, num: &Numerics) -> Result<PhysicalityReport> {
    let wigner = Wigner::Radial(w.clone());
    check_normalized(&wigner, num)?;
    let c = 0.5 * covariance_of_with(&wigner, &num.unchecked())?.g_xx;
    let x_max = 6.0 * c.sqrt();
    let mut marginal_min = f64::INFINITY;
    for i in 0..MARGINAL_POINTS {
        let x = x_max * i as f64 / (MARGINAL_POINTS - 1) as f64;
        marginal_min = marginal_min.min(marginal_x_with(w, x, num.rel_tol)?);
    }
    if marginal_min < -NEGATIVITY_TOL {
        return Ok(PhysicalityReport {
            marginal_min: Some(marginal_min),
            n_max,
            overlaps: Vec::new(),
            first_negative_n: None,
            indeterminate: Vec::new(),
            verdict: Verdict::MarginalNegative,
        });
    }
    let mut report = fock_sweep(w, n_max, num)?;
    report.marginal_min = Some(marginal_min);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::surface_section;
    use crate::extremal::{solve, ExtremalSpec};
    use crate::phase_core::SampledRadial;

    #[test]
    fn vacuum_marginal_at_origin() {
        let v = marginal_x(&RadialFunction::vacuum(), 0.0).unwrap();
        assert!((v - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn thermal_marginal_is_gaussian() {
        let c = 1.5;
        let w = RadialFunction::thermal(c).unwrap();
        for &x in &[0.0, 0.7, 2.0, 4.0] {
            let expected = (-x * x / (2.0 * c)).exp() / (2.0 * std::f64::consts::PI * c).sqrt();
            let got = marginal_x(&w, x).unwrap();
            assert!((got - expected).abs() < 1e-11, "x={x}");
            assert_eq!(got, marginal_x(&w, -x).unwrap());
        }
    }

    #[test]
    fn thermal_states_pass() {
        for &c in &[0.5, 1.0, 5.0] {
            let w = RadialFunction::thermal(c).unwrap();
            let report = check_candidate(&w, DEFAULT_N_MAX).unwrap();
            assert_eq!(report.verdict, Verdict::PassedUpToNmax, "C={c}");
            assert_eq!(report.overlaps.len(), 41);
            // populations of a thermal state: (N^n)/(N+1)^{n+1}, N = C − 1/2
            let nbar = c - 0.5;
            for &(n, v) in &report.overlaps {
                let expected = nbar.powi(n as i32) / (nbar + 1.0).powi(n as i32 + 1);
                assert!((v - expected).abs() < 1e-10, "C={c} n={n}: {v} vs {expected}");
            }
        }
    }

    #[test]
    fn fock_zero_never_fails() {
        let r = hillery_fock_test(&fock_wigner(0), 5).unwrap();
        assert_eq!(r.verdict, Verdict::PassedUpToNmax);
        assert!((r.overlaps[0].1 - 1.0).abs() < 1e-10);
        assert!(r.overlaps[1].1.abs() < 1e-10);
    }

    fn locus_solution(mu_g: f64) -> crate::extremal::ExtremalSolution {
        let section = surface_section(1.0, mu_g).unwrap();
        let p = section.points[0];
        solve(&ExtremalSpec::new(mu_g, p.branch, p.param).unwrap()).unwrap()
    }

    #[test]
    fn locus_extremals_are_unphysical() {
        for (mu_g, expected_n) in [(0.2, 5), (0.5, 3), (0.8, 2)] {
            let sol = locus_solution(mu_g);
            let report = hillery_fock_test(&sol.radial(), DEFAULT_N_MAX).unwrap();
            assert_eq!(report.verdict, Verdict::FailedAtN(expected_n), "mu_g={mu_g}");
            assert_eq!(report.first_negative_n, Some(expected_n));
        }
    }

    #[test]
    fn sampled_copy_gives_the_same_verdict() {
        let sol = locus_solution(0.5);
        let w = sol.radial();
        let (lo, hi) = (sol.form.r_lo(), sol.form.r_hi());
        let grid: Vec<f64> = (0..=4000).map(|i| lo + (hi - lo) * i as f64 / 4000.0).collect();
        let sampled = RadialFunction::Sampled(SampledRadial::from_fn(grid, |r| w.eval(r)).unwrap());
        let a = check_candidate(&w, DEFAULT_N_MAX).unwrap();
        let b = check_candidate(&sampled, DEFAULT_N_MAX).unwrap();
        assert_eq!(a.verdict, b.verdict);
    }
}
