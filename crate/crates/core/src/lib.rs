//! Phase-space numerics for bounding the non-Gaussianity of single-mode
//! states with positive Wigner functions.
//!
//! * [`phase_core`]: covariance matrices, Wigner functions, overlaps, purity, δ.
//! * [`extremal`]: numerical construction of the extremal radial functions.
//! * [`bounds`]: closed-form bound branches and the curves derived from them.
//! * [`physicality`]: marginal and Fock-overlap tests on candidate functions.

// NaN-rejecting range checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bounds;
pub mod error;
pub mod extremal;
pub mod phase_core;
pub mod physicality;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use bounds::{BoundCurve, BranchPoint, CurveKind};
pub use error::{Error, Result};
pub use extremal::{Branch, ExtremalSolution, ExtremalSpec};

pub use phase_core::{
    CovarianceMatrix, ExtremalForm, GaussianState, PlanarFunction, RadialFunction, SampledRadial, Wigner,
};
pub use physicality::{PhysicalityReport, Verdict};
