//! Numerical construction of the extremal radial functions
//! `W(r) = A1 + A2·(1/2πC)·e^{−r/2C} + A3·r` on an interval, directly from
//! the root, normalization and variance constraints.
//!
//! The constraints are linear in the coefficients, so each branch reduces to
//! a 3×3 linear solve; the two-root branch adds a scalar search for `r_A`.
//! Purity and overlap of the result are then obtained by quadrature, which
//! makes this module an oracle for the closed forms in [`crate::bounds`].

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::bounds;
use crate::error::{Error, Result};
use crate::phase_core::{self, exp_remainder, ExtremalForm, Numerics, RadialFunction, Wigner};
use crate::quadrature::{uniform_breaks, Quadrature};
use crate::roots::{brent, golden_section_min};

/// Smallest two-root parameter used for construction; below it the linear
/// system degrades quickly.
pub const ALPHA_MIN: f64 = 1e-3;

/// Grid size of the non-negativity scan.
pub const NEGATIVITY_GRID: usize = 2048;

/// Relative threshold for calling a value negative.
pub const NEGATIVITY_TOL: f64 = 1e-10;

const SINGULAR_CONDITION: f64 = 1e12;

/// Which roots bound the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `W(r_A) = W(r_B) = 0`, parameter `α = (r_B − r_A)·μ_G`.
    TwoRoot,
    /// `W(r_B) = 0`, support `[0, r_B]`, parameter `β = r_B·μ_G`.
    OneRoot,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::TwoRoot => "two_root",
            Branch::OneRoot => "one_root",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated point on one of the extremal branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalSpec {
    mu_g: f64,
    branch: Branch,
    param: f64,
}

impl ExtremalSpec {
    /// Checks `μ_G ∈ (0, 1]` and the branch range (`α ∈ [ALPHA_MIN, x_r]`, `β ≥ x_r`).
    pub fn new(mu_g: f64, branch: Branch, param: f64) -> Result<Self> {
        check_mu_g(mu_g)?;
        let x_r = bounds::x_r_root();
        let slack = 1e-12 * x_r;
        match branch {
            Branch::TwoRoot if !(param >= ALPHA_MIN && param <= x_r + slack) => Err(Error::ParamOutOfRange {
                name: "alpha",
                value: param,
                lo: ALPHA_MIN,
                hi: x_r,
            }),
            Branch::OneRoot if !(param >= x_r - slack && param.is_finite()) => Err(Error::ParamOutOfRange {
                name: "beta",
                value: param,
                lo: x_r,
                hi: f64::INFINITY,
            }),
            _ => Ok(Self { mu_g, branch, param }),
        }
    }

    pub fn mu_g(&self) -> f64 {
        self.mu_g
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Thermal parameter of the reference state, `C = 1/(2μ_G)`.
    pub fn c(&self) -> f64 {
        0.5 / self.mu_g
    }
}

pub(crate) fn check_mu_g(mu_g: f64) -> Result<()> {
    if mu_g > 0.0 && mu_g <= 1.0 {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name: "mu_g",
            value: mu_g,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// Constraint defects of a constructed solution, all measured on the final function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `W(r_A)`.
    pub at_lo: f64,
    /// `W(r_B)`.
    pub at_hi: f64,
    /// `π∫W dr − 1`.
    pub normalization: f64,
    /// `π∫W r dr − 2C`.
    pub variance: f64,
    /// Smallest value found on the support.
    pub min_value: f64,
    /// Where the smallest value sits.
    pub argmin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSolution {
    pub mu_g: f64,
    pub branch: Branch,
    pub param: f64,
    pub form: ExtremalForm,
    pub residuals: Residuals,
}

impl ExtremalSolution {
    pub fn radial(&self) -> RadialFunction {
        RadialFunction::Extremal(self.form.clone())
    }

    pub fn wigner(&self) -> Wigner {
        Wigner::Radial(self.radial())
    }
}

/// Basis moments on `s ∈ [0, Λ]` for `φ = (1, s, e^{−s} − 1 + s)`.
struct Moments {
    zeroth: Vector3<f64>,
    first: Vector3<f64>,
    at_end: Vector3<f64>,
}

fn basis(s: f64) -> Vector3<f64> {
    Vector3::new(1.0, s, exp_remainder(s))
}

fn moments(lambda: f64) -> Result<Moments> {
    let q = Quadrature::with_rel_tol(1e-14);
    let breaks = uniform_breaks(0.0, lambda, 8);
    let mut zeroth = Vector3::zeros();
    let mut first = Vector3::zeros();
    for j in 0..3 {
        zeroth[j] = q.integrate_panels(|s| basis(s)[j], &breaks)?;
        first[j] = q.integrate_panels(|s| s * basis(s)[j], &breaks)?;
    }
    Ok(Moments {
        zeroth,
        first,
        at_end: basis(lambda),
    })
}

/// Solve `M b = rhs` after column equilibration; rejects ill-conditioned systems.
fn solve3(m: Matrix3<f64>, rhs: Vector3<f64>) -> Result<Vector3<f64>> {
    let mut scaled = m;
    let mut scales = Vector3::zeros();
    for j in 0..3 {
        let norm = m.column(j).amax();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::SingularSystem {
                condition: f64::INFINITY,
            });
        }
        scales[j] = norm;
        scaled.column_mut(j).scale_mut(1.0 / norm);
    }
    let sv = scaled.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition < SINGULAR_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    let y = scaled.lu().solve(&rhs).ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    Ok(y.component_div(&scales))
}

/// One-root branch: support `[0, β/μ_G]`.
pub fn solve_one_root(mu_g: f64, beta: f64) -> Result<ExtremalSolution> {
    check_mu_g(mu_g)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "beta",
            value: beta,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let c = 0.5 / mu_g;
    let two_c = 2.0 * c;
    // in s = r/2C the support is [0, β]
    let m = moments(beta)?;
    let rows = Matrix3::from_rows(&[
        m.at_end.transpose(),
        (m.zeroth * (PI * two_c)).transpose(),
        (m.first * (PI * two_c * two_c)).transpose(),
    ]);
    let b = solve3(rows, Vector3::new(0.0, 1.0, two_c))?;
    let form = ExtremalForm::from_shifted([b[0], b[1], b[2]], c, 0.0, beta / mu_g)?;
    finish(mu_g, Branch::OneRoot, beta, form)
}

/// Two-root branch: support `[r_A, r_A + α/μ_G]` with `r_A` fixed by the variance.
pub fn solve_two_root(mu_g: f64, alpha: f64) -> Result<ExtremalSolution> {
    check_mu_g(mu_g)?;
    if !(alpha >= ALPHA_MIN && alpha.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "alpha",
            value: alpha,
            lo: ALPHA_MIN,
            hi: bounds::x_r_root(),
        });
    }
    let c = 0.5 / mu_g;
    let two_c = 2.0 * c;
    let m = moments(alpha)?;
    // roots at both ends plus normalization; in the shifted basis this does not depend on r_A
    let rows = Matrix3::from_rows(&[
        basis(0.0).transpose(),
        m.at_end.transpose(),
        (m.zeroth * (PI * two_c)).transpose(),
    ]);
    let b = solve3(rows, Vector3::new(0.0, 0.0, 1.0))?;
    // π∫W r dr − 2C with r = r_A + 2C·s
    let residual = |r_a: f64| PI * two_c * (r_a * m.zeroth.dot(&b) + two_c * m.first.dot(&b)) - two_c;
    let (lo, hi) = (0.0, 50.0 * c);
    let r_a = if residual(lo).abs() <= 1e-12 * two_c {
        lo
    } else {
        brent(residual, lo, hi, 1e-14 * hi, 1e-13 * two_c)?
    };
    let form = ExtremalForm::from_shifted([b[0], b[1], b[2]], c, r_a, r_a + alpha / mu_g)?;
    finish(mu_g, Branch::TwoRoot, alpha, form)
}

/// Dispatch on the branch of a validated spec.
pub fn solve(spec: &ExtremalSpec) -> Result<ExtremalSolution> {
    match spec.branch {
        Branch::TwoRoot => solve_two_root(spec.mu_g, spec.param),
        Branch::OneRoot => solve_one_root(spec.mu_g, spec.param),
    }
}

fn finish(mu_g: f64, branch: Branch, param: f64, form: ExtremalForm) -> Result<ExtremalSolution> {
    let radial = RadialFunction::Extremal(form.clone());
    let num = Numerics::default();
    let norm = PI * phase_core::radial_integral(&[&radial], |r| radial.eval(r), &num)?;
    let second = PI * phase_core::radial_integral(&[&radial], |r| radial.eval(r) * r, &num)?;
    let (min_value, argmin, peak) = scan_minimum(&form);
    let residuals = Residuals {
        at_lo: form.eval(form.r_lo()),
        at_hi: form.eval(form.r_hi()),
        normalization: norm - 1.0,
        variance: second - 2.0 * form.c(),
        min_value,
        argmin,
    };
    if min_value < -NEGATIVITY_TOL * peak.max(1.0) {
        return Err(Error::NegativityDetected {
            r: argmin,
            value: min_value,
        });
    }
    Ok(ExtremalSolution {
        mu_g,
        branch,
        param,
        form,
        residuals,
    })
}

/// `(min, argmin, max)` of the form over its support: dense grid plus
/// golden-section refinement around each discrete local minimum.
fn scan_minimum(form: &ExtremalForm) -> (f64, f64, f64) {
    let grid = uniform_breaks(form.r_lo(), form.r_hi(), NEGATIVITY_GRID - 1);
    let values: Vec<f64> = grid.iter().map(|&r| form.eval(r)).collect();
    let peak = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let (mut best, mut best_r) = (f64::INFINITY, form.r_lo());
    for (i, (&r, &v)) in grid.iter().zip(&values).enumerate() {
        if v < best {
            best = v;
            best_r = r;
        }
        let interior = i > 0 && i + 1 < grid.len();
        if interior && v <= values[i - 1] && v <= values[i + 1] {
            let x = golden_section_min(|r| form.eval(r), grid[i - 1], grid[i + 1], 1e-12 * form.r_hi().max(1.0));
            let fx = form.eval(x);
            if fx < best {
                best = fx;
                best_r = x;
            }
        }
    }
    (best, best_r, peak)
}

/// Numerical purity and overlap of a constructed solution next to the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub branch: Branch,
    pub mu_g: f64,
    pub param: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub purity_num: f64,
    pub purity_formula: f64,
    pub overlap_num: f64,
    pub overlap_formula: f64,
    pub purity_rel_err: f64,
    pub overlap_rel_err: f64,
    pub max_rel_err: f64,
    /// `μ_ex/μ_G` from the closed form.
    pub purity_ratio: f64,
}

pub fn verify_against_closed_form(spec: &ExtremalSpec) -> Result<OracleReport> {
    verify_against_closed_form_with(spec, &Numerics::default())
}

pub fn verify_against_closed_form_with(spec: &ExtremalSpec, num: &Numerics) -> Result<OracleReport> {
    let solution = solve(spec)?;
    let w = solution.wigner();
    let purity_num = phase_core::purity_with(&w, num)?;
    let thermal = Wigner::Radial(RadialFunction::Thermal { c: spec.c() });
    let overlap_num = phase_core::overlap_with(&w, &thermal, num)?;
    let point = bounds::branch_point(spec.mu_g, spec.branch, spec.param)?;
    let purity_rel_err = ((purity_num - point.mu_ex) / point.mu_ex).abs();
    let overlap_rel_err = ((overlap_num - point.overlap_ex) / point.overlap_ex).abs();
    Ok(OracleReport {
        branch: spec.branch,
        mu_g: spec.mu_g,
        param: spec.param,
        r_lo: solution.form.r_lo(),
        r_hi: solution.form.r_hi(),
        purity_num,
        purity_formula: point.mu_ex,
        overlap_num,
        overlap_formula: point.overlap_ex,
        purity_rel_err,
        overlap_rel_err,
        max_rel_err: purity_rel_err.max(overlap_rel_err),
        purity_ratio: point.mu_ex / spec.mu_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_core::{covariance_of, purity};

    fn assert_invariants(sol: &ExtremalSolution) {
        let r = &sol.residuals;
        assert!(r.at_hi.abs() <= 1e-10, "W(r_B) = {}", r.at_hi);
        assert!(r.at_lo.abs() <= 1e-10 || sol.branch == Branch::OneRoot);
        assert!(r.normalization.abs() <= 1e-9, "norm {}", r.normalization);
        assert!(r.variance.abs() <= 1e-9 * (1.0 / sol.mu_g), "var {}", r.variance);
        let cov = covariance_of(&sol.wigner()).unwrap();
        assert!((cov.g_xx - 1.0 / sol.mu_g).abs() <= 1e-8 / sol.mu_g);
    }

    #[test]
    fn one_root_at_three_reaches_purity_extremity() {
        let sol = solve_one_root(0.5, 3.0).unwrap();
        assert_invariants(&sol);
        let mu = purity(&sol.wigner()).unwrap();
        assert!((mu - 0.5 * 8.0 / 9.0).abs() < 1e-6);
        assert!(sol.form.eval(0.0) >= 0.0);
    }

    #[test]
    fn one_root_large_beta_approaches_reference_purity() {
        let sol = solve_one_root(0.7, 40.0).unwrap();
        let mu = purity(&sol.wigner()).unwrap();
        assert!((mu / 0.7 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn two_root_at_boundary_touches_origin() {
        let x_r = bounds::x_r_root();
        let sol = solve_two_root(0.5, x_r).unwrap();
        assert!(sol.form.r_lo().abs() < 1e-6, "r_A = {}", sol.form.r_lo());
        assert_invariants(&sol);
    }

    #[test]
    fn two_root_matches_closed_form() {
        // frozen from a 30-digit mpmath construction of the same constraints
        let sol = solve_two_root(0.3, 1.0).unwrap();
        assert_invariants(&sol);
        assert!((sol.form.r_lo() - 1.721_829_753_670_938_8).abs() < 1e-9);
        let spec = ExtremalSpec::new(0.3, Branch::TwoRoot, 1.0).unwrap();
        let rep = verify_against_closed_form(&spec).unwrap();
        assert!((rep.purity_num / 0.3 - 2.403_747_033_353_295_4).abs() < 1e-8);
        assert!((rep.overlap_num / 0.3 - 0.754_215_689_958_860_7).abs() < 1e-8);
        assert!(rep.max_rel_err <= 1e-6);
    }

    #[test]
    fn branches_meet_at_boundary() {
        let x_r = bounds::x_r_root();
        let a = solve_two_root(0.5, x_r).unwrap();
        let b = solve_one_root(0.5, x_r).unwrap();
        for &r in &[0.0, 0.5, 1.7, 3.9] {
            assert!((a.form.eval(r) - b.form.eval(r)).abs() < 1e-7);
        }
    }

    #[test]
    fn oracle_reports() {
        let rep = verify_against_closed_form(&ExtremalSpec::new(0.5, Branch::TwoRoot, 2.0).unwrap()).unwrap();
        assert!(rep.max_rel_err <= 1e-6);
        let rep = verify_against_closed_form(&ExtremalSpec::new(0.8, Branch::OneRoot, 5.0).unwrap()).unwrap();
        assert!(rep.max_rel_err <= 1e-6);
        let rep = verify_against_closed_form(&ExtremalSpec::new(0.5, Branch::OneRoot, 3.0).unwrap()).unwrap();
        assert!((rep.purity_ratio - 8.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn short_support_stays_conditioned() {
        let sol = solve_two_root(0.4, ALPHA_MIN).unwrap();
        assert_invariants(&sol);
        let rep = verify_against_closed_form(&ExtremalSpec::new(0.4, Branch::TwoRoot, ALPHA_MIN).unwrap()).unwrap();
        assert!(rep.max_rel_err <= 1e-6, "{rep:?}");
    }

    #[test]
    fn one_root_below_boundary_goes_negative() {
        assert!(matches!(
            solve_one_root(0.5, 1.5),
            Err(Error::NegativityDetected { .. })
        ));
    }

    #[test]
    fn two_root_above_boundary_has_no_bracket() {
        assert!(matches!(solve_two_root(0.5, 3.0), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn spec_validation() {
        assert!(ExtremalSpec::new(0.5, Branch::TwoRoot, 5.0).is_err());
        assert!(ExtremalSpec::new(0.5, Branch::TwoRoot, 1e-4).is_err());
        assert!(ExtremalSpec::new(0.5, Branch::OneRoot, 2.0).is_err());
        assert!(ExtremalSpec::new(1.2, Branch::OneRoot, 3.0).is_err());
        assert!(ExtremalSpec::new(0.0, Branch::OneRoot, 3.0).is_err());
        let s = ExtremalSpec::new(0.25, Branch::OneRoot, 3.0).unwrap();
        assert_eq!(s.c(), 2.0);
        assert!(solve_two_root(0.5, 1e-4).is_err());
    }
}
