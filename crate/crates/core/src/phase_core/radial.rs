use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::Interval;
use crate::special::laguerre_function;

/// `e^{−s} − 1 + s`, accurate for small `s`.
pub(crate) fn exp_remainder(s: f64) -> f64 {
    if s.abs() < 0.5 {
        let mut term = 0.5 * s * s;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1.0;
            term *= -s / k;
            sum += term;
        }
        sum
    } else {
        (-s).exp_m1() + s
    }
}

/// Rotation-invariant Wigner function `W(r)` of `r = x² + p²`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFunction {
    /// `(1/2πC)·e^{−r/2C}`.
    Thermal { c: f64 },
    /// `A1 + A2·(1/2πC)·e^{−r/2C} + A3·r` on `[r_lo, r_hi]`, zero elsewhere.
    Extremal(ExtremalForm),
    /// `((−1)^n/π)·e^{−r}·L_n(2r)`.
    Fock { n: u32 },
    /// Tabulated values, interpolated piecewise-cubically and zero outside the grid.
    Sampled(SampledRadial),
}

impl RadialFunction {
    pub fn thermal(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::ParamOutOfRange {
                name: "C",
                value: c,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self::Thermal { c })
    }

    pub fn vacuum() -> Self {
        Self::Thermal { c: 0.5 }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Thermal { c } => {
                if r < 0.0 {
                    0.0
                } else {
                    (-r / (2.0 * c)).exp() / (2.0 * PI * c)
                }
            }
            Self::Extremal(form) => form.eval(r),
            Self::Fock { n } => {
                if r < 0.0 {
                    0.0
                } else {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign / PI * laguerre_function(*n, 2.0 * r)
                }
            }
            Self::Sampled(s) => s.eval(r),
        }
    }

    pub fn support(&self) -> Interval {
        match self {
            Self::Thermal { .. } | Self::Fock { .. } => Interval::half_line(0.0),
            Self::Extremal(form) => Interval::new(form.r_lo, form.r_hi),
            Self::Sampled(s) => Interval::new(s.r[0], *s.r.last().unwrap()),
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, Self::Sampled(_))
    }

    /// Scale of the exponential tail, for unbounded supports.
    pub(crate) fn decay_length(&self) -> f64 {
        match self {
            Self::Thermal { c } => 2.0 * c,
            Self::Fock { .. } => 1.5,
            _ => 0.0,
        }
    }

    /// Radius beyond which the function is a plain decaying tail.
    pub(crate) fn tail_start(&self) -> f64 {
        match self {
            Self::Fock { n } => 4.0 * *n as f64 + 22.0,
            other => other.support().lo,
        }
    }

    /// Minimum number of equal panels the finite part of an integral needs.
    pub(crate) fn panel_count(&self) -> usize {
        match self {
            Self::Fock { n } => 4 * *n as usize + 4,
            Self::Extremal(_) => 8,
            _ => 1,
        }
    }

    pub(crate) fn knots(&self) -> Option<&[f64]> {
        match self {
            Self::Sampled(s) => Some(&s.r),
            _ => None,
        }
    }

    /// Radius past which the function is negligible (used to size planar boxes).
    pub(crate) fn effective_extent(&self) -> f64 {
        let support = self.support();
        if support.is_bounded() {
            support.hi
        } else {
            self.tail_start() + 40.0 * self.decay_length()
        }
    }
}

/// Extremal function on an interval, stored as the shifted expansion
/// `W = b1 + b2·s + b3·(e^{−s} − 1 + s)`, `s = (r − r_lo)/2C`.
///
/// This is the same family as `A1 + A2·g(r) + A3·r` but stays well
/// conditioned when the support is short.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalForm {
    a1: f64,
    a2: f64,
    a3: f64,
    c: f64,
    r_lo: f64,
    r_hi: f64,
    shifted: [f64; 3],
}

impl ExtremalForm {
    pub fn from_coefficients(a1: f64, a2: f64, a3: f64, c: f64, r_lo: f64, r_hi: f64) -> Result<Self> {
        validate_support(c, r_lo, r_hi)?;
        let g_lo = (-r_lo / (2.0 * c)).exp() / (2.0 * PI * c);
        let b3 = a2 * g_lo;
        let b2 = 2.0 * c * a3 - b3;
        let b1 = a1 + a3 * r_lo + b3;
        Ok(Self {
            a1,
            a2,
            a3,
            c,
            r_lo,
            r_hi,
            shifted: [b1, b2, b3],
        })
    }

    pub(crate) fn from_shifted(shifted: [f64; 3], c: f64, r_lo: f64, r_hi: f64) -> Result<Self> {
        validate_support(c, r_lo, r_hi)?;
        let [b1, b2, b3] = shifted;
        let a2 = b3 * 2.0 * PI * c * (r_lo / (2.0 * c)).exp();
        let a3 = (b2 + b3) / (2.0 * c);
        let a1 = b1 - b3 - a3 * r_lo;
        Ok(Self {
            a1,
            a2,
            a3,
            c,
            r_lo,
            r_hi,
            shifted,
        })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn a2(&self) -> f64 {
        self.a2
    }
    pub fn a3(&self) -> f64 {
        self.a3
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn r_lo(&self) -> f64 {
        self.r_lo
    }
    pub fn r_hi(&self) -> f64 {
        self.r_hi
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r < self.r_lo || r > self.r_hi {
            return 0.0;
        }
        let s = (r - self.r_lo) / (2.0 * self.c);
        let [b1, b2, b3] = self.shifted;
        b1 + b2 * s + b3 * exp_remainder(s)
    }
}

fn validate_support(c: f64, r_lo: f64, r_hi: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    if !(r_lo >= 0.0 && r_hi > r_lo && r_hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "support must satisfy 0 <= r_lo < r_hi < inf, got [{r_lo}, {r_hi}]"
        )));
    }
    Ok(())
}

/// Samples `w_i = W(r_i)` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRadial {
    r: Vec<f64>,
    w: Vec<f64>,
}

impl SampledRadial {
    pub fn new(r: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if r.len() != w.len() {
            return Err(Error::InvalidInput(format!(
                "r and w lengths differ ({} vs {})",
                r.len(),
                w.len()
            )));
        }
        if r.len() < 4 {
            return Err(Error::InvalidInput(format!("need at least 4 samples, got {}", r.len())));
        }
        if !(r[0] >= 0.0) {
            return Err(Error::InvalidInput(format!("r[0] must be >= 0, got {}", r[0])));
        }
        if let Some(i) = r.windows(2).position(|p| !(p[1] > p[0])) {
            return Err(Error::InvalidInput(format!(
                "r must be strictly increasing (r[{}] = {}, r[{}] = {})",
                i,
                r[i],
                i + 1,
                r[i + 1]
            )));
        }
        if let Some(i) = r.iter().chain(&w).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {i}")));
        }
        Ok(Self { r, w })
    }

    /// Sample `f` on `r`.
    pub fn from_fn<F: Fn(f64) -> f64>(r: Vec<f64>, f: F) -> Result<Self> {
        let w = r.iter().map(|&x| f(x)).collect();
        Self::new(r, w)
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Four-point Lagrange cubic on the enclosing interval, clamped to the
    /// bracketing samples wherever the local data are monotone.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x < self.r[0] || x > self.r[n - 1] {
            return 0.0;
        }
        let i = self.r.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2);
        let start = i.saturating_sub(1).min(n - 4);
        let xs = &self.r[start..start + 4];
        let ys = &self.w[start..start + 4];
        let mut value = 0.0;
        for j in 0..4 {
            let mut basis = 1.0;
            for m in 0..4 {
                if m != j {
                    basis *= (x - xs[m]) / (xs[j] - xs[m]);
                }
            }
            value += basis * ys[j];
        }
        let increasing = ys.windows(2).all(|p| p[1] >= p[0]);
        let decreasing = ys.windows(2).all(|p| p[1] <= p[0]);
        if increasing || decreasing {
            let (a, b) = (self.w[i], self.w[i + 1]);
            value = value.clamp(a.min(b), a.max(b));
        }
        value
    }
}
