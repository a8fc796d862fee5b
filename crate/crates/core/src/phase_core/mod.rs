//! Phase-space types and the integral measures built on them.
//!
//! Conventions: vacuum `W = (1/π)·e^{−(x²+p²)}`, `∬W dx dp = 1`,
//! `Tr(ρρ') = 2π∬W W'`, and `γ = I` for the vacuum.

mod covariance;
mod measures;
mod planar;
mod radial;

pub use covariance::{gaussian_reference, williamson_1mode, CovarianceMatrix, GaussianState, SymplecticReduction};
pub use measures::{
    check_normalized, covariance_of, covariance_of_with, non_gaussianity, normalization, overlap, overlap_planar,
    overlap_radial, overlap_with, purity, purity_with, Numerics, NORM_TOL, SAMPLED_NORM_TOL,
};
pub use planar::{coherent_mixture_wigner, PlanarFunction};
pub use radial::{ExtremalForm, RadialFunction, SampledRadial};

pub(crate) use measures::radial_integral;
pub(crate) use radial::exp_remainder;

/// A Wigner function in either representation.
#[derive(Debug, Clone)]
pub enum Wigner {
    Radial(RadialFunction),
    Planar(PlanarFunction),
}

impl From<RadialFunction> for Wigner {
    fn from(f: RadialFunction) -> Self {
        Wigner::Radial(f)
    }
}

impl From<PlanarFunction> for Wigner {
    fn from(f: PlanarFunction) -> Self {
        Wigner::Planar(f)
    }
}

/// Wigner function of the number state `|n⟩`.
pub fn fock_wigner(n: u32) -> RadialFunction {
    RadialFunction::Fock { n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn radial(f: RadialFunction) -> Wigner {
        Wigner::Radial(f)
    }

    #[test]
    fn vacuum_overlaps() {
        let vac = radial(RadialFunction::vacuum());
        assert!((overlap(&vac, &vac).unwrap() - 1.0).abs() < 1e-12);
        let one = radial(fock_wigner(1));
        assert!(overlap(&one, &vac).unwrap().abs() < 1e-12);
    }

    #[test]
    fn thermal_purity_closed_form() {
        for &c in &[0.5, 1.0, 2.5, 5.0] {
            let th = radial(RadialFunction::Thermal { c });
            let mu = purity(&th).unwrap();
            assert!((mu - 1.0 / (2.0 * c)).abs() < 1e-10 / (2.0 * c), "C={c}");
        }
    }

    #[test]
    fn fock_two_is_pure() {
        let f = radial(fock_wigner(2));
        assert!((purity(&f).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn radial_covariances() {
        let vac = radial(RadialFunction::vacuum());
        let cov = covariance_of(&vac).unwrap();
        assert!((cov.g_xx - 1.0).abs() < 1e-10 && cov.g_xp == 0.0);
        let th = radial(RadialFunction::Thermal { c: 1.7 });
        assert!((covariance_of(&th).unwrap().g_pp - 3.4).abs() < 1e-9);
    }

    #[test]
    fn coherent_mixture_moments() {
        let w = Wigner::Planar(coherent_mixture_wigner(1.0).unwrap());
        let cov = covariance_of(&w).unwrap();
        assert!((cov.g_xx - 3.0).abs() < 1e-8);
        assert!((cov.g_pp - 1.0).abs() < 1e-8);
        assert!(cov.g_xp.abs() < 1e-10);
    }

    #[test]
    fn coherent_mixture_purity_limits() {
        let vac = Wigner::Planar(coherent_mixture_wigner(0.0).unwrap());
        assert!((purity(&vac).unwrap() - 1.0).abs() < 1e-9);
        let far = Wigner::Planar(coherent_mixture_wigner(6.0).unwrap());
        assert!((purity(&far).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn non_gaussianity_arithmetic() {
        assert_eq!(non_gaussianity(0.5, 0.5, 0.5), 0.0);
        assert_eq!(non_gaussianity(1.0, 1.0, 1.0), 0.0);
        assert!((non_gaussianity(0.5, 0.5, 0.4) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn thermal_states_have_zero_delta() {
        for &c in &[0.5, 1.0, 5.0] {
            let th = radial(RadialFunction::Thermal { c });
            let cov = covariance_of(&th).unwrap();
            let g = gaussian_reference(&cov).unwrap();
            let mu = purity(&th).unwrap();
            let ov = overlap(&th, &g.wigner()).unwrap();
            assert!(non_gaussianity(mu, g.purity(), ov).abs() < 1e-8, "C={c}");
        }
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let bad = radial(RadialFunction::Extremal(
            ExtremalForm::from_coefficients(1.0, 0.0, 0.0, 1.0, 0.0, 1.0).unwrap(),
        ));
        assert!(matches!(purity(&bad), Err(Error::NormalizationViolation { .. })));
        let loose = Numerics::default().unchecked();
        // 2π²·∫_0^1 1 dr
        let v = purity_with(&bad, &loose).unwrap();
        assert!((v - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-9);
    }
}
