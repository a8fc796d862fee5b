use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phase_core::planar::integrate_plane;
use crate::phase_core::{CovarianceMatrix, PlanarFunction, RadialFunction, Wigner};
use crate::quadrature::{uniform_breaks, Interval, Piece, Quadrature, DEFAULT_REL_TOL};

/// Normalization tolerance for analytic functions.
pub const NORM_TOL: f64 = 1e-8;

/// Normalization tolerance for tabulated functions, whose integrals are only
/// as good as the interpolant.
pub const SAMPLED_NORM_TOL: f64 = 1e-6;

/// Tolerances shared by the integral measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub rel_tol: f64,
    pub norm_tol: f64,
    pub check_normalization: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            norm_tol: NORM_TOL,
            check_normalization: true,
        }
    }
}

impl Numerics {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn unchecked(self) -> Self {
        Self {
            check_normalization: false,
            ..self
        }
    }

    fn quadrature(&self) -> Quadrature {
        Quadrature::with_rel_tol(self.rel_tol)
    }
}

/// Pieces covering the common support of `functions`, with panels fine
/// enough for the most oscillatory member and knots of tabulated members as
/// breakpoints.
fn radial_pieces(functions: &[&RadialFunction]) -> Option<Vec<Piece>> {
    let mut support = Interval::half_line(0.0);
    for f in functions {
        support = support.intersect(&f.support())?;
    }
    let panels = functions.iter().map(|f| f.panel_count()).max().unwrap_or(1);
    let (finite_hi, tail) = if support.is_bounded() {
        (support.hi, None)
    } else {
        let cut = functions.iter().map(|f| f.tail_start()).fold(support.lo, f64::max);
        let scale = 2.0 * functions.iter().map(|f| f.decay_length()).fold(0.0, f64::max);
        (cut, Some(Piece::Tail { start: cut, scale }))
    };
    let mut breaks = Vec::new();
    if finite_hi > support.lo {
        breaks = uniform_breaks(support.lo, finite_hi, panels);
        for f in functions {
            if let Some(knots) = f.knots() {
                breaks.extend(knots.iter().copied().filter(|&k| k > support.lo && k < finite_hi));
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
    let mut pieces: Vec<Piece> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Piece::Finite(w[0], w[1]))
        .collect();
    pieces.extend(tail);
    Some(pieces)
}

/// `∫ integrand(r) dr` over the common support of `functions`.
pub(crate) fn radial_integral<F>(functions: &[&RadialFunction], integrand: F, num: &Numerics) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    match radial_pieces(functions) {
        Some(pieces) => num.quadrature().integrate_pieces(integrand, &pieces),
        None => Ok(0.0),
    }
}

/// `∬ W dx dp`, which equals 1 for a state.
pub fn normalization(w: &Wigner, num: &Numerics) -> Result<f64> {
    match w {
        Wigner::Radial(f) => Ok(PI * radial_integral(&[f], |r| f.eval(r), num)?),
        Wigner::Planar(f) => integrate_plane(|x, p| f.eval(x, p), f.half_width(), num.rel_tol, 1e-14),
    }
}

fn norm_tolerance(w: &Wigner, num: &Numerics) -> f64 {
    match w {
        Wigner::Radial(f) if f.is_sampled() => num.norm_tol.max(SAMPLED_NORM_TOL),
        _ => num.norm_tol,
    }
}

/// Fails with [`Error::NormalizationViolation`] unless `|∬W − 1|` is within tolerance.
pub fn check_normalized(w: &Wigner, num: &Numerics) -> Result<f64> {
    let integral = normalization(w, num)?;
    let tolerance = norm_tolerance(w, num);
    if (integral - 1.0).abs() > tolerance {
        return Err(Error::NormalizationViolation { integral, tolerance });
    }
    Ok(integral)
}

/// `Tr(ρρ') = 2π∬ W W' dx dp` with default tolerances.
pub fn overlap(a: &Wigner, b: &Wigner) -> Result<f64> {
    overlap_with(a, b, &Numerics::default())
}

/// `Tr(ρρ')`; both radial arguments take the `2π²∫W W' dr` path.
pub fn overlap_with(a: &Wigner, b: &Wigner, num: &Numerics) -> Result<f64> {
    if num.check_normalization {
        check_normalized(a, num)?;
        check_normalized(b, num)?;
    }
    match (a, b) {
        (Wigner::Radial(fa), Wigner::Radial(fb)) => overlap_radial(fa, fb, num),
        _ => overlap_planar(a, b, num),
    }
}

/// `2π²∫ W(r) W'(r) dr` over the intersection of the supports. No normalization check.
pub fn overlap_radial(a: &RadialFunction, b: &RadialFunction, num: &Numerics) -> Result<f64> {
    let v = radial_integral(&[a, b], |r| a.eval(r) * b.eval(r), num)?;
    Ok(2.0 * PI * PI * v)
}

/// `2π∬ W W' dx dp` by planar quadrature, regardless of symmetry. No normalization check.
pub fn overlap_planar(a: &Wigner, b: &Wigner, num: &Numerics) -> Result<f64> {
    let pa = a.to_planar();
    let pb = b.to_planar();
    let h = pa.half_width().min(pb.half_width());
    let v = integrate_plane(|x, p| pa.eval(x, p) * pb.eval(x, p), h, num.rel_tol, 1e-15)?;
    Ok(2.0 * PI * v)
}

/// `μ = Tr(ρ²)`.
pub fn purity(w: &Wigner) -> Result<f64> {
    purity_with(w, &Numerics::default())
}

pub fn purity_with(w: &Wigner, num: &Numerics) -> Result<f64> {
    overlap_with(w, w, num)
}

/// Covariance matrix of a zero-mean Wigner function.
pub fn covariance_of(w: &Wigner) -> Result<CovarianceMatrix> {
    covariance_of_with(w, &Numerics::default())
}

pub fn covariance_of_with(w: &Wigner, num: &Numerics) -> Result<CovarianceMatrix> {
    if num.check_normalization {
        check_normalized(w, num)?;
    }
    let diverged = |e: Error| match e {
        Error::NonConvergence { .. } => Error::DivergentMoment,
        other => other,
    };
    match w {
        Wigner::Radial(f) => {
            // 2⟨x²⟩ = ⟨r⟩ = π∫W r dr
            let m = PI * radial_integral(&[f], |r| f.eval(r) * r, num).map_err(diverged)?;
            Ok(CovarianceMatrix::scaled_identity(m))
        }
        Wigner::Planar(f) => {
            let h = f.half_width();
            let second = |g: &dyn Fn(f64, f64) -> f64| {
                integrate_plane(|x, p| g(x, p) * f.eval(x, p), h, num.rel_tol, 1e-14).map_err(diverged)
            };
            let xx = second(&|x, _| x * x)?;
            let pp = second(&|_, p| p * p)?;
            let xp = second(&|x, p| x * p)?;
            Ok(CovarianceMatrix {
                g_xx: 2.0 * xx,
                g_xp: 2.0 * xp,
                g_pp: 2.0 * pp,
            })
        }
    }
}

/// `δ = (μ + μ_G − 2·Tr(ρρ_G)) / (2μ)`.
pub fn non_gaussianity(mu: f64, mu_g: f64, overlap: f64) -> f64 {
    (mu + mu_g - 2.0 * overlap) / (2.0 * mu)
}

impl Wigner {
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        match self {
            Wigner::Radial(f) => f.eval(x * x + p * p),
            Wigner::Planar(f) => f.eval(x, p),
        }
    }

    pub fn to_planar(&self) -> PlanarFunction {
        match self {
            Wigner::Radial(f) => PlanarFunction::from_radial(f),
            Wigner::Planar(f) => f.clone(),
        }
    }
}
