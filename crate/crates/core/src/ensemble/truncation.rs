//! Truncation/centering schedules and the heavy-tail normalization.

use super::law::EntryLaw;
use crate::error::{Error, Result};

/// Law of the truncated, centered entry `w 1{|w| <= eta} - E[w; |w| <= eta]`.
pub fn truncate_center(law: &EntryLaw, eta: f64) -> Result<EntryLaw> {
    law.truncate_center(eta)
}

/// Scale `s` of the cubic heavy-tail law at dimension `n` such that a row of
/// `n` such entries has `sum_j E[|w|^2; |w| <= 1] = 2 n s^2 ln(1/s) = 1`.
///
/// Needs `n >= 3` (the map `u -> u ln(1/u)` peaks at `1/e`).
pub fn heavy_tail_scale(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "heavy-tail normalization needs n >= 3, got {n}"
        )));
    }
    // With u = s^2 solve g(u) = n u ln(1/u) - 1 = 0 on the branch u < 1/e,
    // working in v = ln u where g is monotone.
    let target = 1.0 / n as f64;
    let g = |v: f64| -v * v.exp() - target;
    let (mut lo, mut hi) = (-800.0f64, -1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..3 {
        // d/dv [-v e^v] = -(1 + v) e^v
        let step = g(v) / (-(1.0 + v) * v.exp());
        v -= step;
    }
    Ok((0.5 * v).exp())
}

/// The constant `c_n = s_n sqrt(n ln n)` relating [`heavy_tail_scale`] to the
/// nominal `x / sqrt(n ln n)` scaling.
pub fn heavy_tail_constant(n: usize) -> Result<f64> {
    let s = heavy_tail_scale(n)?;
    let nf = n as f64;
    Ok(s * (nf * nf.ln()).sqrt())
}

/// Finest level of the dyadic grid used by [`threshold_sequence`].
pub const THRESHOLD_GRID_FLOOR: f64 = 1.0 / (1u64 << 40) as f64;

/// Chooses truncation levels `eta_n` for the dimensions `ns` (ascending).
///
/// `lhs(eps, n)` evaluates `(1/n) sum_ij P(|w_ij| > eps)`. For each `n` the
/// level is the smallest dyadic `eps <= 1/2` with `lhs(eps, m) <= eps` for
/// every `m >= n` in `ns`, raised to at least `n^{-1/4} / 2`, capped at `1/2`,
/// and finally made nonincreasing by a running minimum.
pub fn threshold_sequence<F>(ns: &[usize], lhs: F) -> Vec<f64>
where
    F: Fn(f64, usize) -> f64,
{
    let mut grid = Vec::new();
    let mut eps = 0.5;
    while eps >= THRESHOLD_GRID_FLOOR {
        grid.push(eps);
        eps *= 0.5;
    }
    // tail maxima over m >= n, per grid level
    let values: Vec<Vec<f64>> = grid
        .iter()
        .map(|&e| ns.iter().map(|&n| lhs(e, n)).collect())
        .collect();
    let mut out = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        let mut chosen = 0.5;
        for (g, &e) in grid.iter().enumerate() {
            let tail_max = values[g][idx..].iter().copied().fold(0.0, f64::max);
            if tail_max <= e {
                chosen = e;
            } else {
                break;
            }
        }
        let floor = 0.5 * (n as f64).powf(-0.25);
        out.push(chosen.max(floor).min(0.5));
    }
    for i in 1..out.len() {
        out[i] = out[i].min(out[i - 1]);
    }
    out
}
