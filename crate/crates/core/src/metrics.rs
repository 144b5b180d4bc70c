//! Semicircle reference, moments of step measures, and the Kolmogorov and
//! Lévy distances between distribution functions.

use std::f64::consts::PI;

use crate::gauss::normal_cdf;
use crate::spectra::StepMeasure;

/// `F_sc(x)` for the density `sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        let v = 0.5 + (x * (4.0 - x * x).sqrt() + 4.0 * (0.5 * x).asin()) / (4.0 * PI);
        v.clamp(0.0, 1.0)
    }
}

pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Catalan number `C_m`, exact for `m <= 33`.
pub fn catalan(m: u32) -> u64 {
    assert!(m <= 33, "catalan({m}) overflows u64");
    let mut c: u128 = 1;
    for i in 0..m as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c as u64
}

/// `int x^k d mu_sc`: `C_{k/2}` for even `k`, zero for odd.
pub fn semicircle_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        catalan(k / 2) as f64
    }
}

/// Running Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `sum_i w_i a_i^k`.
pub fn measure_moment(m: &StepMeasure, k: u32) -> f64 {
    compensated_sum(
        m.atoms()
            .iter()
            .zip(m.weights())
            .map(|(a, w)| w * a.powi(k as i32)),
    )
}

/// A distribution function that the distances below can evaluate.
///
/// Step parts are exposed through `atoms`, continuous parts through
/// `continuous_range` (an interval outside which the continuous part is flat
/// to double precision).
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    fn atoms(&self) -> &[f64] {
        &[]
    }

    fn continuous_range(&self) -> Option<(f64, f64)> {
        None
    }
}

impl Cdf for StepMeasure {
    fn cdf(&self, x: f64) -> f64 {
        StepMeasure::cdf(self, x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        StepMeasure::cdf_left(self, x)
    }

    fn atoms(&self) -> &[f64] {
        StepMeasure::atoms(self)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Semicircle;

impl Cdf for Semicircle {
    fn cdf(&self, x: f64) -> f64 {
        semicircle_cdf(x)
    }

    fn continuous_range(&self) -> Option<(f64, f64)> {
        Some((-2.0, 2.0))
    }
}

/// Centered normal law with standard deviation `sd`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normal {
    pub sd: f64,
}

impl Normal {
    pub const STANDARD: Normal = Normal { sd: 1.0 };

    pub fn new(sd: f64) -> Self {
        Self { sd }
    }
}

impl Cdf for Normal {
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf(x / self.sd)
    }

    fn continuous_range(&self) -> Option<(f64, f64)> {
        Some((-40.0 * self.sd, 40.0 * self.sd))
    }
}

const GRID_POINTS: usize = 4001;

/// Grid on the union of the continuous ranges, shifted by `shift` for the
/// second argument. Denser near zero where the ranges are widest relative to
/// the mass.
fn continuous_grid<F: Cdf + ?Sized, G: Cdf + ?Sized>(f: &F, g: &G, shift: f64) -> Vec<f64> {
    let mut ranges = Vec::new();
    if let Some(r) = f.continuous_range() {
        ranges.push((r.0 - shift, r.1 - shift));
    }
    if let Some(r) = g.continuous_range() {
        ranges.push(r);
    }
    let mut pts = Vec::new();
    for (lo, hi) in ranges {
        // the outer parts of a wide normal range carry no mass; sample the
        // central eighth as densely as the whole
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for &(a, b) in &[(lo, hi), (mid - half / 8.0, mid + half / 8.0)] {
            let step = (b - a) / (GRID_POINTS - 1) as f64;
            pts.extend((0..GRID_POINTS).map(|i| a + step * i as f64));
        }
    }
    pts
}

/// Maximizes a function of one variable near `x0` by golden-section search on
/// `[x0 - h, x0 + h]`.
fn refine_max(f: impl Fn(f64) -> f64, x0: f64, h: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (x0 - h, x0 + h);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    f(x0).max(fc).max(fd)
}

/// Sup over a grid followed by local refinement of the best few points.
fn grid_sup(grid: &[f64], h: impl Fn(f64) -> f64) -> f64 {
    if grid.is_empty() {
        return f64::NEG_INFINITY;
    }
    let mut vals: Vec<(f64, usize)> = grid.iter().enumerate().map(|(i, &x)| (h(x), i)).collect();
    let best = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out = best;
    for &(_, i) in vals.iter().take(4) {
        let left = if i > 0 { grid[i] - grid[i - 1] } else { 0.0 };
        let right = if i + 1 < grid.len() { grid[i + 1] - grid[i] } else { 0.0 };
        let width = left.max(right).abs();
        if width > 0.0 {
            out = out.max(refine_max(&h, grid[i], width));
        }
    }
    out
}

/// `sup_x |F(x) - G(x)|`.
///
/// Exact when either argument is a step function (both one-sided limits are
/// compared at every atom); for two continuous laws the sup is located on a
/// grid and refined by golden-section search.
pub fn kolmogorov_distance<F: Cdf + ?Sized, G: Cdf + ?Sized>(f: &F, g: &G) -> f64 {
    let mut sup: f64 = 0.0;
    for &x in f.atoms().iter().chain(g.atoms()) {
        sup = sup
            .max((f.cdf(x) - g.cdf(x)).abs())
            .max((f.cdf_left(x) - g.cdf_left(x)).abs());
    }
    let stepwise = !f.atoms().is_empty() || !g.atoms().is_empty();
    if !stepwise || (f.continuous_range().is_some() && g.continuous_range().is_some()) {
        let grid = continuous_grid(f, g, 0.0);
        sup = sup.max(grid_sup(&grid, |x| (f.cdf(x) - g.cdf(x)).abs()));
    }
    sup.min(1.0)
}

/// `sup_x G(x) - F(x + eps)`, evaluated at every breakpoint of either
/// function (with one-sided limits) and on a grid over continuous parts.
fn band_excess<F: Cdf + ?Sized, G: Cdf + ?Sized>(g: &G, f: &F, eps: f64) -> f64 {
    let mut sup = f64::NEG_INFINITY;
    for &a in g.atoms() {
        sup = sup
            .max(g.cdf(a) - f.cdf(a + eps))
            .max(g.cdf_left(a) - f.cdf_left(a + eps));
    }
    for &b in f.atoms() {
        sup = sup
            .max(g.cdf(b - eps) - f.cdf(b))
            .max(g.cdf_left(b - eps) - f.cdf_left(b));
    }
    if g.continuous_range().is_some() && f.continuous_range().is_some() {
        let grid = continuous_grid(f, g, eps);
        sup = sup.max(grid_sup(&grid, |x| g.cdf(x) - f.cdf(x + eps)));
    }
    sup
}

fn levy_feasible<F: Cdf + ?Sized, G: Cdf + ?Sized>(f: &F, g: &G, eps: f64) -> bool {
    band_excess(g, f, eps) <= eps && band_excess(f, g, eps) <= eps
}

/// Bisection tolerance of [`levy_distance`].
pub const LEVY_TOLERANCE: f64 = 1e-9;

/// `inf { eps > 0 : F(x - eps) - eps <= G(x) <= F(x + eps) + eps for all x }`
/// by bisection on `eps`. The returned value is feasible and within
/// [`LEVY_TOLERANCE`] of the infimum.
pub fn levy_distance<F: Cdf + ?Sized, G: Cdf + ?Sized>(f: &F, g: &G) -> f64 {
    if levy_feasible(f, g, 0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > LEVY_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if levy_feasible(f, g, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn semicircle_values() {
        assert_eq!(semicircle_cdf(0.0), 0.5);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        assert_eq!(semicircle_cdf(-2.0), 0.0);
        assert_eq!(semicircle_cdf(-7.0), 0.0);
        assert_abs_diff_eq!(semicircle_cdf(1.0), 0.8044988905, epsilon = 1e-10);
        assert_abs_diff_eq!(semicircle_cdf(-1.0), 1.0 - 0.8044988905, epsilon = 1e-10);
    }

    #[test]
    fn density_is_the_derivative() {
        let h = 1e-5;
        let mut x = -1.9;
        while x < 1.9 {
            let fd = (semicircle_cdf(x + h) - semicircle_cdf(x - h)) / (2.0 * h);
            assert!((fd - semicircle_density(x)).abs() < 1e-6, "x={x}");
            x += 0.01;
        }
    }

    #[test]
    fn catalan_and_moments() {
        let c: Vec<u64> = (0..8).map(catalan).collect();
        assert_eq!(c, vec![1, 1, 2, 5, 14, 42, 132, 429]);
        assert_eq!(semicircle_moment(2), 1.0);
        assert_eq!(semicircle_moment(4), 2.0);
        assert_eq!(semicircle_moment(8), 14.0);
        assert_eq!(semicircle_moment(5), 0.0);
        assert_eq!(semicircle_moment(0), 1.0);
    }

    #[test]
    fn measure_moment_examples() {
        assert_eq!(measure_moment(&StepMeasure::point_mass(0.0), 4), 0.0);
        let m = StepMeasure::from_weighted([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(measure_moment(&m, 2), 1.0);
        let m = StepMeasure::from_weighted([(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]).unwrap();
        assert_eq!(measure_moment(&m, 4), 8.0);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn kolmogorov_examples() {
        let a = StepMeasure::uniform(&[0.1, 0.7, -0.3]).unwrap();
        assert_eq!(kolmogorov_distance(&a, &a), 0.0);
        let d0 = StepMeasure::point_mass(0.0);
        assert_abs_diff_eq!(kolmogorov_distance(&d0, &Semicircle), 0.5, epsilon = 1e-15);
        assert_eq!(kolmogorov_distance(&d0, &StepMeasure::point_mass(0.3)), 1.0);
        // continuous pair: Phi(sqrt(2) x) vs Phi(x), gap at x = sqrt(ln 2)
        let k = kolmogorov_distance(&Normal::new(0.5f64.sqrt()), &Normal::STANDARD);
        assert_abs_diff_eq!(k, 0.0830320, epsilon = 1e-6);
    }

    #[test]
    fn levy_examples() {
        let d0 = StepMeasure::point_mass(0.0);
        let d3 = StepMeasure::point_mass(0.3);
        assert_eq!(levy_distance(&d0, &d0), 0.0);
        assert_abs_diff_eq!(levy_distance(&d0, &d3), 0.3, epsilon = 2e-9);
        assert_abs_diff_eq!(levy_distance(&d3, &d0), 0.3, epsilon = 2e-9);
        assert_abs_diff_eq!(
            levy_distance(&d0, &Normal::STANDARD),
            0.35958045,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            levy_distance(&Normal::new(0.5f64.sqrt()), &Normal::STANDARD),
            0.06558194,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(levy_distance(&Normal::STANDARD, &Normal::STANDARD), 0.0);
    }

    #[test]
    fn levy_below_kolmogorov() {
        let a = StepMeasure::uniform(&[-1.0, 0.2, 0.25, 1.5]).unwrap();
        let b = StepMeasure::uniform(&[-0.9, 0.0, 1.4]).unwrap();
        let l = levy_distance(&a, &b);
        let k = kolmogorov_distance(&a, &b);
        assert!(l <= k + LEVY_TOLERANCE && k <= 1.0);
        assert!(levy_distance(&a, &Semicircle) <= kolmogorov_distance(&a, &Semicircle) + 1e-9);
    }
}
