use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::phase_core::{CovarianceMatrix, RadialFunction};
use crate::quadrature::Quadrature;

type Evaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// General Wigner function `W(x, p)` with a square bounding box `[−h, h]²`
/// outside of which it is expected to be negligible.
#[derive(Clone)]
pub struct PlanarFunction {
    label: String,
    half_width: f64,
    eval: Evaluator,
}

impl fmt::Debug for PlanarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarFunction")
            .field("label", &self.label)
            .field("half_width", &self.half_width)
            .finish()
    }
}

impl PlanarFunction {
    pub fn new<F>(label: impl Into<String>, half_width: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            half_width,
            eval: Arc::new(f),
        }
    }

    pub fn eval(&self, x: f64, p: f64) -> f64 {
        (self.eval)(x, p)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `(x, p) ↦ W(x² + p²)`.
    pub fn from_radial(w: &RadialFunction) -> Self {
        let half_width = w.effective_extent().sqrt();
        let w = w.clone();
        Self::new("radial", half_width, move |x, p| w.eval(x * x + p * p))
    }

    /// Zero-mean Gaussian with covariance `γ`.
    pub fn gaussian(cov: &CovarianceMatrix) -> Self {
        let det = cov.det();
        let norm = 1.0 / (PI * det.sqrt());
        // γ⁻¹ = [[g_pp, −g_xp], [−g_xp, g_xx]] / det
        let (ixx, ixp, ipp) = (cov.g_pp / det, -cov.g_xp / det, cov.g_xx / det);
        let sigma = (0.5 * cov.max_eigenvalue()).sqrt();
        Self::new("gaussian", 9.0 * sigma, move |x, p| {
            norm * (-(ixx * x * x + 2.0 * ixp * x * p + ipp * p * p)).exp()
        })
    }

    /// Image under the phase-space map `S` (`det S = 1`): `W'(z) = W(S⁻¹z)`.
    pub fn transformed(&self, s: &Matrix2<f64>) -> Result<Self> {
        let inv = s.try_inverse().ok_or(Error::SingularSystem {
            condition: f64::INFINITY,
        })?;
        let stretch = s.singular_values().max();
        let inner = self.eval.clone();
        Ok(Self {
            label: format!("{} (transformed)", self.label),
            half_width: self.half_width * stretch,
            eval: Arc::new(move |x, p| {
                let u = inv[(0, 0)] * x + inv[(0, 1)] * p;
                let v = inv[(1, 0)] * x + inv[(1, 1)] * p;
                inner(u, v)
            }),
        })
    }
}

/// Equal mixture of coherent states displaced by `±d` along `x`.
pub fn coherent_mixture_wigner(d: f64) -> Result<PlanarFunction> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "d",
            value: d,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(PlanarFunction::new(
        format!("coherent mixture d={d}"),
        d + 7.0,
        move |x, p| {
            let p2 = p * p;
            ((-((x - d) * (x - d) + p2)).exp() + (-((x + d) * (x + d) + p2)).exp()) / (2.0 * PI)
        },
    ))
}

/// `∬ f dx dp` over a square box grown from `half_width` until the last
/// enlargement changes the result by less than the tolerance.
pub(crate) fn integrate_plane<F>(f: F, half_width: f64, rel_tol: f64, abs_floor: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    const GROWTH: f64 = 1.5;
    const MAX_GROWTHS: usize = 7;
    let inner_q = Quadrature {
        rel_tol: 0.1 * rel_tol,
        abs_tol: 0.01 * abs_floor,
        ..Quadrature::default()
    };
    let outer_q = Quadrature {
        rel_tol,
        abs_tol: 0.1 * abs_floor,
        ..Quadrature::default()
    };
    let box_integral = |h: f64| -> Result<f64> {
        // split at the origin so the bulk of centred functions sits on panel edges
        let inner = |x: f64| -> f64 { inner_q.integrate_panels(|p| f(x, p), &[-h, 0.0, h]).unwrap_or(f64::NAN) };
        let v = outer_q.integrate_panels(inner, &[-h, 0.0, h])?;
        if v.is_nan() {
            Err(Error::NonConvergence {
                estimate: v,
                error: f64::INFINITY,
                subdivisions: 0,
            })
        } else {
            Ok(v)
        }
    };
    let mut h = half_width.max(1.0);
    let mut prev = box_integral(h)?;
    for _ in 0..MAX_GROWTHS {
        h *= GROWTH;
        let next = box_integral(h)?;
        if (next - prev).abs() <= (rel_tol * next.abs()).max(abs_floor) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        estimate: prev,
        error: f64::INFINITY,
        subdivisions: MAX_GROWTHS,
    })
}
