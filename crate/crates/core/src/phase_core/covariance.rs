use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::phase_core::{PlanarFunction, RadialFunction, Wigner};

/// Second-moment matrix of a single mode, `γ_ij = ⟨{r_i, r_j}⟩` (no factor 1/2),
/// so the vacuum has `γ = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub g_xx: f64,
    pub g_xp: f64,
    pub g_pp: f64,
}

impl CovarianceMatrix {
    /// Checked constructor: requires positive definiteness.
    pub fn new(g_xx: f64, g_xp: f64, g_pp: f64) -> Result<Self> {
        let cov = Self { g_xx, g_xp, g_pp };
        cov.ensure_positive_definite()?;
        Ok(cov)
    }

    pub fn identity() -> Self {
        Self::scaled_identity(1.0)
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self {
            g_xx: s,
            g_xp: 0.0,
            g_pp: s,
        }
    }

    pub fn diag(g_xx: f64, g_pp: f64) -> Self {
        Self { g_xx, g_xp: 0.0, g_pp }
    }

    pub fn det(&self) -> f64 {
        self.g_xx * self.g_pp - self.g_xp * self.g_xp
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g_xx > 0.0 && self.det() > 0.0 && self.g_xx.is_finite() && self.g_pp.is_finite()
    }

    /// Heisenberg condition `det γ ≥ 1`, with a relative slack of `tol`.
    pub fn satisfies_uncertainty(&self, tol: f64) -> bool {
        self.is_positive_definite() && self.det() >= 1.0 - tol
    }

    pub fn ensure_positive_definite(&self) -> Result<()> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite {
                g_xx: self.g_xx,
                det: self.det(),
            })
        }
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.g_xx, self.g_xp, self.g_xp, self.g_pp)
    }

    /// `S γ Sᵀ`.
    pub fn transformed(&self, s: &Matrix2<f64>) -> Self {
        let m = s * self.to_matrix() * s.transpose();
        Self {
            g_xx: m[(0, 0)],
            g_xp: 0.5 * (m[(0, 1)] + m[(1, 0)]),
            g_pp: m[(1, 1)],
        }
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> f64 {
        let (hi, _, _) = self.eigen();
        hi
    }

    /// `(λ_max, λ_min, θ)` with the λ_max eigenvector at angle θ.
    fn eigen(&self) -> (f64, f64, f64) {
        let mean = 0.5 * (self.g_xx + self.g_pp);
        let half_diff = 0.5 * (self.g_xx - self.g_pp);
        let radius = half_diff.hypot(self.g_xp);
        let hi = mean + radius;
        let lo = self.det() / hi;
        let theta = 0.5 * (2.0 * self.g_xp).atan2(self.g_xx - self.g_pp);
        (hi, lo, theta)
    }
}

/// Zero-displacement Gaussian state fixed by its covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub cov: CovarianceMatrix,
}

impl GaussianState {
    /// `μ = (det γ)^{−1/2}`.
    pub fn purity(&self) -> f64 {
        1.0 / self.cov.det().sqrt()
    }

    /// Thermal parameter `C = 1/(2μ)`, the value of the rotation-invariant
    /// state reached by symplectic reduction.
    pub fn thermal_c(&self) -> f64 {
        0.5 * self.cov.det().sqrt()
    }

    pub fn is_rotation_invariant(&self) -> bool {
        self.cov.g_xp == 0.0 && self.cov.g_xx == self.cov.g_pp
    }

    /// Wigner function `(1/(π√det γ))·exp(−zᵀγ⁻¹z)`; radial when `γ ∝ I`.
    pub fn wigner(&self) -> Wigner {
        if self.is_rotation_invariant() {
            Wigner::Radial(RadialFunction::Thermal { c: 0.5 * self.cov.g_xx })
        } else {
            Wigner::Planar(PlanarFunction::gaussian(&self.cov))
        }
    }
}

/// The Gaussian state with covariance `γ` and zero displacement.
pub fn gaussian_reference(cov: &CovarianceMatrix) -> Result<GaussianState> {
    cov.ensure_positive_definite()?;
    Ok(GaussianState { cov: *cov })
}

/// Symplectic map taking a covariance matrix to thermal form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticReduction {
    /// `det S = 1`, `S γ Sᵀ = 2C·I`.
    pub s: Matrix2<f64>,
    pub c: f64,
}

/// Single-mode Williamson normal form: `S = (det γ)^{1/4}·γ^{−1/2}`.
pub fn williamson_1mode(cov: &CovarianceMatrix) -> Result<SymplecticReduction> {
    cov.ensure_positive_definite()?;
    let det = cov.det();
    let (hi, lo, theta) = cov.eigen();
    let (sin, cos) = theta.sin_cos();
    let rot = Matrix2::new(cos, -sin, sin, cos);
    let scale = det.powf(0.25);
    let inv_sqrt = Matrix2::new(scale / hi.sqrt(), 0.0, 0.0, scale / lo.sqrt());
    let s = rot * inv_sqrt * rot.transpose();
    Ok(SymplecticReduction { s, c: 0.5 * det.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_reduction(cov: CovarianceMatrix) -> SymplecticReduction {
        let red = williamson_1mode(&cov).unwrap();
        assert!((red.s.determinant() - 1.0).abs() <= 1e-12);
        let out = cov.transformed(&red.s);
        let target = cov.det().sqrt();
        assert!((out.g_xx - target).abs() <= 1e-12 * target.max(1.0));
        assert!((out.g_pp - target).abs() <= 1e-12 * target.max(1.0));
        assert!(out.g_xp.abs() <= 1e-12 * target.max(1.0));
        red
    }

    #[test]
    fn identity_reduces_to_itself() {
        let red = check_reduction(CovarianceMatrix::identity());
        assert!((red.c - 0.5).abs() < 1e-15);
        assert!((red.s - Matrix2::identity()).norm() < 1e-15);
    }

    #[test]
    fn squeezed_diagonal() {
        let red = check_reduction(CovarianceMatrix::diag(4.0, 1.0));
        assert!((red.c - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((red.s[(0, 0)] - h).abs() < 1e-14);
        assert!((red.s[(1, 1)] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn correlated_quadratures() {
        let cov = CovarianceMatrix::new(2.0, 0.5, 2.0).unwrap();
        let red = check_reduction(cov);
        assert!((red.c - 3.75f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_reference_purities() {
        let vac = gaussian_reference(&CovarianceMatrix::identity()).unwrap();
        assert_eq!(vac.purity(), 1.0);
        let th = gaussian_reference(&CovarianceMatrix::scaled_identity(2.0)).unwrap();
        assert_eq!(th.purity(), 0.5);
        assert_eq!(th.thermal_c(), 1.0);
        let sq = gaussian_reference(&CovarianceMatrix::diag(4.0, 1.0)).unwrap();
        assert_eq!(sq.purity(), 0.5);
        assert!(matches!(sq.wigner(), Wigner::Planar(_)));
    }

    #[test]
    fn rejects_indefinite() {
        assert!(matches!(
            CovarianceMatrix::new(1.0, 2.0, 1.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(gaussian_reference(&CovarianceMatrix::diag(-1.0, 1.0)).is_err());
        assert!(williamson_1mode(&CovarianceMatrix::diag(0.0, 1.0)).is_err());
    }

    #[test]
    fn heisenberg() {
        assert!(CovarianceMatrix::identity().satisfies_uncertainty(0.0));
        assert!(!CovarianceMatrix::diag(0.5, 0.5).satisfies_uncertainty(1e-12));
    }
}
