//! Closed-form extremal branches and the bound curves built from them.
//!
//! Both branches scale exactly with `μ_G`: at fixed parameter the extremal
//! purity and overlap are `μ_G` times a function of the parameter alone.
//! Those parameter-only factors are the `*_ratios` functions below.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::extremal::{check_mu_g, Branch, ALPHA_MIN};
use crate::phase_core::{
    coherent_mixture_wigner, covariance_of_with, gaussian_reference, non_gaussianity, overlap_with, purity_with,
    Numerics, Wigner,
};
use crate::roots::{brent, golden_section_min, sign_changes};

/// Largest one-root parameter used by sweeps.
pub const BETA_MAX: f64 = 50.0;

/// Smallest two-root parameter considered when solving for a target purity.
const ALPHA_FLOOR: f64 = 1e-12;

/// Above this the one-root formulas are evaluated with numerator and
/// denominator multiplied by `e^{−2β}`.
const BETA_RESCALE: f64 = 30.0;

/// Below this the two-root formulas are summed as power series.
const ALPHA_SERIES: f64 = 1.0;

const ROOT_GRID: usize = 400;

/// Positive root of `e^x(x − 3) + 2x + 3 = 0`, where the two branches meet.
pub fn x_r_root() -> f64 {
    static X_R: OnceLock<f64> = OnceLock::new();
    *X_R.get_or_init(|| {
        let f = |x: f64| x.exp() * (x - 3.0) + 2.0 * x + 3.0;
        brent(f, 2.0, 3.0, 1e-16, 0.0).expect("f(2) < 0 < f(3)")
    })
}

/// `(μ_ex/μ_G, Tr/μ_G)` on the two-root branch.
pub fn two_root_ratios(alpha: f64) -> (f64, f64) {
    if alpha < ALPHA_SERIES {
        two_root_series(alpha)
    } else {
        two_root_direct(alpha)
    }
}

fn two_root_direct(a: f64) -> (f64, f64) {
    let num = a * a - 9.0 * a.sinh() * a + 2.0 * (a * a + 6.0) * a.cosh() - 12.0;
    let den = a * (0.5 * a).cosh() - 2.0 * (0.5 * a).sinh();
    let purity = 2.0 * num / (3.0 * a * den * den);
    let ea = a.exp();
    let exponent = -a * (a + ea * (2.0 * a - 3.0) + 3.0) / (3.0 * (ea * (a - 2.0) + a + 2.0));
    let overlap = 2.0 * exponent.exp() * a.exp_m1() / a;
    (purity, overlap)
}

/// Same quantities from their Taylor expansions, which have positive terms
/// only and therefore no cancellation at small `α`.
fn two_root_series(a: f64) -> (f64, f64) {
    let a2 = a * a;
    // numerator / α⁶ = Σ_{m≥3} 2(4m−3)(m−2) α^{2m−6} / (2m)!
    // denominator / α³ = Σ_{m≥1} 2m α^{2m−2} / (4^m (2m+1)!)
    let (mut num, mut den) = (0.0, 0.0);
    let mut pow = 1.0; // α^{2(m−3)} for num, α^{2(m−1)} for den
    let mut fact_num = 720.0; // (2m)! at m = 3
    let mut pow_den = 1.0;
    let mut fact_den = 6.0; // (2m+1)! at m = 1
    let mut four_m = 4.0;
    for m in 1..=30u32 {
        let mf = m as f64;
        den += 2.0 * mf * pow_den / (four_m * fact_den);
        pow_den *= a2;
        fact_den *= (2.0 * mf + 2.0) * (2.0 * mf + 3.0);
        four_m *= 4.0;
        if m >= 3 {
            num += 2.0 * (4.0 * mf - 3.0) * (mf - 2.0) * pow / fact_num;
            pow *= a2;
            fact_num *= (2.0 * mf + 1.0) * (2.0 * mf + 2.0);
        }
    }
    let purity = 2.0 * num / (3.0 * a * den * den);
    // exponent = −(P/α²) / (3·Q/α³), P/α² = Σ_{k≥2} (2k−3) α^{k−2}/k!, Q/α³ = Σ_{k≥3} (k−2) α^{k−3}/k!
    let (mut p, mut q) = (0.0, 0.0);
    let mut fact = 2.0; // k!
    let mut pw = 1.0; // α^{k−2}
    for k in 2..=40u32 {
        let kf = k as f64;
        p += (2.0 * kf - 3.0) * pw / fact;
        fact *= kf + 1.0;
        // term k+1 of Q/α³ has power α^{k−2}
        q += (kf - 1.0) * pw / fact;
        pw *= a;
    }
    let exponent = -p / (3.0 * q);
    let overlap = 2.0 * exponent.exp() * a.exp_m1() / a;
    (purity, overlap)
}

/// `(μ_ex/μ_G, Tr/μ_G)` on the one-root branch.
pub fn one_root_ratios(beta: f64) -> (f64, f64) {
    let b = beta;
    if b <= BETA_RESCALE {
        let eb = b.exp();
        let den = 2.0 * eb * (b - 3.0) + b * (b + 4.0) + 6.0;
        let num = eb * eb * (b - 3.0).powi(2) + 8.0 * eb * b * (b - 3.0) + b * (b * (2.0 * b + 9.0) + 12.0) - 9.0;
        let purity = 4.0 * num / (den * den);
        let overlap = 4.0 * (b * (b.cosh() + 2.0) - 3.0 * b.sinh()) / den;
        (purity, overlap)
    } else {
        let e1 = (-b).exp();
        let e2 = e1 * e1;
        let den = 2.0 * (b - 3.0) + e1 * (b * (b + 4.0) + 6.0);
        let num = (b - 3.0).powi(2) + 8.0 * e1 * b * (b - 3.0) + e2 * (b * (b * (2.0 * b + 9.0) + 12.0) - 9.0);
        let purity = 4.0 * num / (den * den);
        // e^{−β}·(β(cosh β + 2) − 3 sinh β)
        let scaled = b * 0.5 * (1.0 + e2) + 2.0 * b * e1 - 1.5 * (1.0 - e2);
        let overlap = 4.0 * scaled / den;
        (purity, overlap)
    }
}

/// `μ_ex/μ_G − 1` on the one-root branch, from the exact rearrangement
/// `num − den = −4e^β(β−3)(β²−4β+6) − ((β²−4)² + 56)`.
pub fn one_root_ratio_minus_one(beta: f64) -> f64 {
    let b = beta;
    let poly = (b * b - 4.0).powi(2) + 56.0;
    let quad = b * b - 4.0 * b + 6.0;
    let (diff, den) = if b <= BETA_RESCALE {
        let eb = b.exp();
        (
            -4.0 * eb * (b - 3.0) * quad - poly,
            2.0 * eb * (b - 3.0) + b * (b + 4.0) + 6.0,
        )
    } else {
        let e1 = (-b).exp();
        (
            -4.0 * e1 * (b - 3.0) * quad - e1 * e1 * poly,
            2.0 * (b - 3.0) + e1 * (b * (b + 4.0) + 6.0),
        )
    };
    diff / (den * den)
}

/// `(μ_ex/μ_G, Tr/μ_G)` on either branch.
pub fn branch_ratios(branch: Branch, param: f64) -> (f64, f64) {
    match branch {
        Branch::TwoRoot => two_root_ratios(param),
        Branch::OneRoot => one_root_ratios(param),
    }
}

/// One point of an extremal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub branch: Branch,
    pub param: f64,
    pub mu_g: f64,
    pub mu_ex: f64,
    pub overlap_ex: f64,
    pub delta_ex: f64,
}

impl BranchPoint {
    fn from_ratios(branch: Branch, param: f64, mu_g: f64, (purity, overlap): (f64, f64)) -> Self {
        let mu_ex = mu_g * purity;
        let overlap_ex = mu_g * overlap;
        Self {
            branch,
            param,
            mu_g,
            mu_ex,
            overlap_ex,
            delta_ex: non_gaussianity(mu_ex, mu_g, overlap_ex),
        }
    }
}

/// Two-root branch at `0 < α ≤ x_r`.
pub fn branch_two_root(mu_g: f64, alpha: f64) -> Result<BranchPoint> {
    check_mu_g(mu_g)?;
    let x_r = x_r_root();
    if !(alpha > 0.0 && alpha <= x_r * (1.0 + 1e-12)) {
        return Err(Error::ParamOutOfRange {
            name: "alpha",
            value: alpha,
            lo: 0.0,
            hi: x_r,
        });
    }
    Ok(BranchPoint::from_ratios(
        Branch::TwoRoot,
        alpha,
        mu_g,
        two_root_ratios(alpha),
    ))
}

/// One-root branch at `β ≥ x_r`.
pub fn branch_one_root(mu_g: f64, beta: f64) -> Result<BranchPoint> {
    check_mu_g(mu_g)?;
    let x_r = x_r_root();
    if !(beta >= x_r * (1.0 - 1e-12) && beta.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "beta",
            value: beta,
            lo: x_r,
            hi: f64::INFINITY,
        });
    }
    Ok(BranchPoint::from_ratios(
        Branch::OneRoot,
        beta,
        mu_g,
        one_root_ratios(beta),
    ))
}

pub fn branch_point(mu_g: f64, branch: Branch, param: f64) -> Result<BranchPoint> {
    match branch {
        Branch::TwoRoot => branch_two_root(mu_g, param),
        Branch::OneRoot => branch_one_root(mu_g, param),
    }
}

/// `n ≥ 2` log-spaced values from `lo` to `hi`, endpoints exact.
fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (l + (h - l) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Parameters sampled for each `μ_G` of a surface: `samples_per_branch`
/// log-spaced values of `α ∈ [ALPHA_MIN, x_r]` and of `β ∈ [x_r, BETA_MAX]`,
/// plus `β = 3`. Both branches include `x_r`.
pub fn surface_parameters(samples_per_branch: usize) -> Result<Vec<(Branch, f64)>> {
    if samples_per_branch < 2 {
        return Err(Error::InvalidInput(format!(
            "samples_per_branch must be >= 2, got {samples_per_branch}"
        )));
    }
    let x_r = x_r_root();
    let mut betas = log_space(x_r, BETA_MAX, samples_per_branch);
    if !betas.contains(&3.0) {
        betas.push(3.0);
        betas.sort_by(f64::total_cmp);
    }
    Ok(log_space(ALPHA_MIN, x_r, samples_per_branch)
        .into_iter()
        .map(|a| (Branch::TwoRoot, a))
        .chain(betas.into_iter().map(|b| (Branch::OneRoot, b)))
        .collect())
}

/// Extremal surface sampled at [`surface_parameters`] for every `μ_G`, in
/// order of `(μ_G, branch, parameter)` when the grid is sorted.
pub fn upper_surface(mu_g_grid: &[f64], samples_per_branch: usize) -> Result<Vec<BranchPoint>> {
    let params = surface_parameters(samples_per_branch)?;
    let mut out = Vec::with_capacity(mu_g_grid.len() * params.len());
    for &mu_g in mu_g_grid {
        for &(branch, p) in &params {
            out.push(branch_point(mu_g, branch, p)?);
        }
    }
    Ok(out)
}

/// `δ_CS = (√μ − √μ_G)² / (2μ)`: δ with the overlap at its Cauchy–Schwarz maximum.
pub fn cs_delta_lower(mu: f64, mu_g: f64) -> f64 {
    (mu.sqrt() - mu_g.sqrt()).powi(2) / (2.0 * mu)
}

/// All extremal points on the surface with `μ_ex = mu` at fixed `μ_G`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSection {
    pub mu: f64,
    pub mu_g: f64,
    pub points: Vec<BranchPoint>,
    /// `μ = μ_G`: the one-root branch reaches it only as `β → ∞`, where `δ → 0`.
    pub asymptotic: bool,
}

impl SurfaceSection {
    /// Largest δ over the section (0 for the asymptotic point).
    pub fn max_delta(&self) -> Option<f64> {
        let finite = self
            .points
            .iter()
            .map(|p| p.delta_ex)
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
        match (finite, self.asymptotic) {
            (Some(d), true) => Some(d.max(0.0)),
            (Some(d), false) => Some(d),
            (None, true) => Some(0.0),
            (None, false) => None,
        }
    }
}

/// Solve `μ_G·R(p) = mu` on both branches by scanning for sign changes and
/// refining each with Brent's method.
pub fn surface_section(mu: f64, mu_g: f64) -> Result<SurfaceSection> {
    check_mu_g(mu_g)?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "mu",
            value: mu,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let x_r = x_r_root();
    let offset = mu_g - mu;
    let two = |a: f64| mu_g * (two_root_ratios(a).0 - 1.0) + offset;
    let one = |b: f64| mu_g * one_root_ratio_minus_one(b) + offset;

    let mut points: Vec<BranchPoint> = Vec::new();
    let mut push = |p: BranchPoint| {
        let duplicate = points
            .iter()
            .any(|q| (q.param - p.param).abs() <= 1e-12 * p.param.max(1.0) && (q.param - x_r).abs() < 1e-9);
        if !duplicate {
            points.push(p);
        }
    };
    for (lo, hi) in sign_changes(two, &log_space(ALPHA_FLOOR, x_r, ROOT_GRID)) {
        let a = if lo == hi {
            lo
        } else {
            brent(two, lo, hi, 1e-15 * hi, 0.0)?
        };
        push(branch_two_root(mu_g, a)?);
    }
    for (lo, hi) in sign_changes(one, &log_space(x_r, BETA_MAX, ROOT_GRID)) {
        let b = if lo == hi {
            lo
        } else {
            brent(one, lo, hi, 1e-15 * hi, 0.0)?
        };
        push(branch_one_root(mu_g, b)?);
    }
    Ok(SurfaceSection {
        mu,
        mu_g,
        points,
        asymptotic: mu == mu_g,
    })
}

/// `δ^{u.ult}(μ_G)` together with the points that realize it.
#[derive(Debug, Clone, PartialEq)]
pub struct UltimatePoint {
    pub mu_g: f64,
    pub delta: f64,
    pub section: SurfaceSection,
}

impl UltimatePoint {
    pub fn multiple_solutions(&self) -> bool {
        self.section.points.len() + usize::from(self.section.asymptotic) > 1
    }

    /// The finite extremal point with the largest δ.
    pub fn realizing_point(&self) -> Option<&BranchPoint> {
        self.section
            .points
            .iter()
            .max_by(|a, b| a.delta_ex.total_cmp(&b.delta_ex))
    }
}

/// Ultimate upper bound: the largest extremal δ among points with `μ_ex = 1`.
pub fn ultimate_upper(mu_g: f64) -> Result<f64> {
    ultimate_upper_detail(mu_g).map(|p| p.delta)
}

pub fn ultimate_upper_detail(mu_g: f64) -> Result<UltimatePoint> {
    let section = surface_section(1.0, mu_g)?;
    let delta = section.max_delta().ok_or(Error::NoSolution { mu: 1.0, mu_g })?;
    Ok(UltimatePoint { mu_g, delta, section })
}

/// Which curve a [`BoundCurve`] samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    UltimateUpper,
    CoherentLower,
    CauchySchwarz,
}

/// `(μ_G, δ)` samples with strictly increasing `μ_G`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: CurveKind,
    points: Vec<(f64, f64)>,
}

impl BoundCurve {
    /// Sorts by `μ_G`; rejects repeated abscissae and negative δ beyond rounding.
    pub fn new(kind: CurveKind, mut points: Vec<(f64, f64)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidInput(format!("repeated mu_g {} in curve", w[0].0)));
        }
        if let Some(p) = points.iter().find(|p| !(p.1 >= -1e-9)) {
            return Err(Error::InvalidInput(format!("negative delta {} at mu_g {}", p.1, p.0)));
        }
        Ok(Self { kind, points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Monotone piecewise-cubic (Fritsch–Carlson) interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, mu_g: f64) -> Option<f64> {
        let pts = &self.points;
        let n = pts.len();
        if n == 0 || mu_g < pts[0].0 || mu_g > pts[n - 1].0 {
            return None;
        }
        if n == 1 {
            return Some(pts[0].1);
        }
        let i = pts.partition_point(|p| p.0 <= mu_g).saturating_sub(1).min(n - 2);
        let secant = |k: usize| (pts[k + 1].1 - pts[k].1) / (pts[k + 1].0 - pts[k].0);
        let slope = |k: usize| -> f64 {
            if k == 0 {
                secant(0)
            } else if k == n - 1 {
                secant(n - 2)
            } else {
                let (s0, s1) = (secant(k - 1), secant(k));
                if s0 * s1 <= 0.0 {
                    0.0
                } else {
                    let (h0, h1) = (pts[k].0 - pts[k - 1].0, pts[k + 1].0 - pts[k].0);
                    let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                    (w1 + w2) / (w1 / s0 + w2 / s1)
                }
            }
        };
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[i + 1];
        let h = x1 - x0;
        let t = (mu_g - x0) / h;
        let (d0, d1) = (slope(i), slope(i + 1));
        let t2 = t * t;
        let t3 = t2 * t;
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * h * d0
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * h * d1,
        )
    }
}

/// One equal-weight coherent mixture pushed through the numerical pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentPoint {
    pub d: f64,
    pub mu_g: f64,
    pub mu: f64,
    pub overlap: f64,
    pub delta: f64,
}

/// Covariance, Gaussian reference, purity, overlap and δ of the mixture at `d`.
pub fn coherent_mixture_point(d: f64, num: &Numerics) -> Result<CoherentPoint> {
    let w = Wigner::Planar(coherent_mixture_wigner(d)?);
    let cov = covariance_of_with(&w, num)?;
    let reference = gaussian_reference(&cov)?;
    let mu_g = reference.purity();
    let quick = num.unchecked();
    let mu = purity_with(&w, &quick)?;
    let overlap = overlap_with(&w, &reference.wigner(), &quick)?;
    Ok(CoherentPoint {
        d,
        mu_g,
        mu,
        overlap,
        delta: non_gaussianity(mu, mu_g, overlap),
    })
}

/// Lower estimate of the ultimate bound from coherent mixtures at each `d`.
pub fn coherent_lower_estimate(d_grid: &[f64]) -> Result<BoundCurve> {
    coherent_lower_estimate_with(d_grid, &Numerics::default())
}

pub fn coherent_lower_estimate_with(d_grid: &[f64], num: &Numerics) -> Result<BoundCurve> {
    let mut ds: Vec<f64> = d_grid.to_vec();
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    let points = ds
        .iter()
        .map(|&d| coherent_mixture_point(d, num).map(|p| (p.mu_g, p.delta)))
        .collect::<Result<Vec<_>>>()?;
    BoundCurve::new(CurveKind::CoherentLower, points)
}

/// Displacement whose mixture has Gaussian-reference purity `mu_g`.
pub fn displacement_for_mu_g(mu_g: f64) -> f64 {
    (0.5 * (1.0 / (mu_g * mu_g) - 1.0)).max(0.0).sqrt()
}

/// Purity extremity of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremityCheck {
    /// `μ_ex/μ_G` at `β = 3`.
    pub ratio_at_3: f64,
    /// Numerical minimizer of `μ_ex/μ_G`.
    pub argmin_beta: f64,
    pub min_ratio: f64,
}

/// Ratio at `β = 3` and the location of the minimum over `β ∈ [x_r, 20]`.
/// The two-root ratio never drops below its value at `x_r`, so the minimum
/// of the whole surface lies on the one-root branch.
pub fn purity_extremity_check() -> ExtremityCheck {
    let x_r = x_r_root();
    let ratio = |b: f64| one_root_ratios(b).0;
    let argmin_beta = golden_section_min(ratio, x_r, 20.0, 1e-9);
    ExtremityCheck {
        ratio_at_3: ratio(3.0),
        argmin_beta,
        min_ratio: ratio(argmin_beta),
    }
}
