//! Globally adaptive Gauss–Kronrod (10/21 point) integration.
//!
//! Integrals are assembled from a list of [`Piece`]s. A finite piece is
//! integrated in its own variable; a semi-infinite piece `[a, ∞)` is mapped
//! onto `u ∈ (0, 1]` through `r = a − λ·ln u`, which turns an `e^{−r/λ'}`
//! tail into the polynomial-like `u^{λ/λ' − 1}` whenever the scale `λ` is at
//! least the true decay length `λ'`. All pieces share one error budget and
//! the segment with the largest error estimate is bisected first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Default relative tolerance for integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_208_223,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One integration region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// `[a, b]`, both finite.
    Finite(f64, f64),
    /// `[a, ∞)` mapped with decay scale `λ > 0`.
    Tail { start: f64, scale: f64 },
}

/// Closed interval `[lo, hi]`; `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn half_line(lo: f64) -> Self {
        Self { lo, hi: f64::INFINITY }
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.lo && r <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (hi > lo).then_some(Interval { lo, hi })
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 0.0,
            max_subdivisions: 4000,
        }
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        self.integrate_pieces(f, &[Piece::Finite(a, b)])
    }

    /// Integrate `f` over `[a, ∞)` with the exponential map of decay scale `scale`.
    pub fn integrate_tail<F>(&self, f: F, a: f64, scale: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        self.integrate_pieces(f, &[Piece::Tail { start: a, scale }])
    }

    /// Integrate over consecutive panels `[breaks[i], breaks[i+1]]`.
    pub fn integrate_panels<F>(&self, f: F, breaks: &[f64]) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let pieces: Vec<Piece> = breaks
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| Piece::Finite(w[0], w[1]))
            .collect();
        self.integrate_pieces(f, &pieces)
    }

    /// Integrate over an arbitrary union of pieces with a shared error budget.
    pub fn integrate_pieces<F>(&self, f: F, pieces: &[Piece]) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if pieces.is_empty() {
            return Ok(0.0);
        }
        let eval = |piece: usize, t: f64| -> f64 {
            match pieces[piece] {
                Piece::Finite(..) => f(t),
                Piece::Tail { start, scale } => {
                    let r = start - scale * t.ln();
                    let v = f(r);
                    if v == 0.0 {
                        0.0
                    } else {
                        v * scale / t
                    }
                }
            }
        };

        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut total_abs = 0.0;
        for (i, piece) in pieces.iter().enumerate() {
            let (a, b) = match *piece {
                Piece::Finite(a, b) => (a, b),
                Piece::Tail { .. } => (0.0, 1.0),
            };
            let seg = kronrod_segment(|t| eval(i, t), i, a, b);
            total += seg.value;
            total_err += seg.error;
            total_abs += seg.abs_value;
            heap.push(seg);
        }

        let mut subdivisions = 0;
        // Segments too narrow to bisect further; their error is final.
        let mut frozen_err = 0.0;
        loop {
            let tol = self
                .abs_tol
                .max(self.rel_tol * total.abs())
                .max(100.0 * f64::EPSILON * total_abs);
            if total_err <= tol {
                return Ok(total);
            }
            let Some(worst) = heap.pop() else {
                // everything frozen
                return if frozen_err <= 10.0 * tol {
                    Ok(total)
                } else {
                    Err(Error::NonConvergence {
                        estimate: total,
                        error: total_err,
                        subdivisions,
                    })
                };
            };
            if subdivisions >= self.max_subdivisions || !total.is_finite() {
                return Err(Error::NonConvergence {
                    estimate: total,
                    error: total_err,
                    subdivisions,
                });
            }
            let mid = 0.5 * (worst.a + worst.b);
            let width = worst.b - worst.a;
            if width <= 1e3 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE) {
                frozen_err += worst.error;
                continue;
            }
            let left = kronrod_segment(|t| eval(worst.piece, t), worst.piece, worst.a, mid);
            let right = kronrod_segment(|t| eval(worst.piece, t), worst.piece, mid, worst.b);
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            total_abs += left.abs_value + right.abs_value - worst.abs_value;
            heap.push(left);
            heap.push(right);
            subdivisions += 1;
        }
    }
}

fn kronrod_segment<F: Fn(f64) -> f64>(f: F, piece: usize, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let abs_value = res_abs * half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_value);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Segment {
        piece,
        a,
        b,
        value,
        error: err,
        abs_value,
    }
}

/// Integrate a radial integrand over `support` to relative tolerance `rel_tol`.
///
/// Unbounded supports use the exponential tail map with unit decay scale; use
/// [`Quadrature::integrate_pieces`] directly when the decay length is known.
pub fn integrate_radial<F>(f: F, support: Interval, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(support.hi > support.lo) {
        return Err(Error::InvalidInput(format!(
            "degenerate support [{}, {}]",
            support.lo, support.hi
        )));
    }
    let q = Quadrature::with_rel_tol(rel_tol);
    if support.is_bounded() {
        q.integrate(f, support.lo, support.hi)
    } else {
        q.integrate_tail(f, support.lo, 1.0)
    }
}

/// `n` equal panels over `[a, b]` as a breakpoint list.
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}
