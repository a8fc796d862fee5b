//! Laguerre polynomials.

/// `L_n(x)` by the three-term recurrence `(k+1)L_{k+1} = (2k+1−x)L_k − k·L_{k−1}`.
pub fn laguerre_eval(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre function `e^{−x/2}·L_n(x)`, bounded by 1 in magnitude for `x ≥ 0`.
///
/// The recurrence runs on rescaled values so that neither `L_n(x)` nor
/// `e^{−x/2}` over- or underflows for large `n` and `x`.
pub fn laguerre_function(n: u32, x: f64) -> f64 {
    const BIG: f64 = 1e150;
    let mut log_scale = -0.5 * x;
    let mut prev = 1.0;
    let mut cur = if n == 0 { 1.0 } else { 1.0 - x };
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
        }
    }
    if cur == 0.0 {
        return 0.0;
    }
    let mag = cur.abs().ln() + log_scale;
    if mag < -745.0 {
        0.0
    } else {
        cur.signum() * mag.exp()
    }
}
