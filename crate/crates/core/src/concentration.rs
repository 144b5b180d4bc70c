//! Rank, perturbation and Bernstein inequalities as checkable comparisons,
//! plus the truncation-survival and spectral-concentration experiments.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleSpec, LawFamily, MatrixSample, VarianceProfile};
use crate::error::{io_err, Error, Result};
use crate::metrics::{kolmogorov_distance, levy_distance};
use crate::rng::{keyed, Domain};
use crate::spectra::{eigenvalues, esd, pool, sample_spectra, SpectralSample};

/// Slack allowed when comparing two computed quantities.
pub const BOUND_SLACK: f64 = 1e-12;

/// `lhs <= rhs` with labels describing the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub context: BTreeMap<String, String>,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            satisfied: lhs <= rhs + BOUND_SLACK,
            context: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.context.insert(key.to_string(), value.to_string());
        self
    }
}

fn same_size(a: &MatrixSample, b: &MatrixSample) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

/// Number of singular values of a Hermitian matrix above
/// `n * machine epsilon * largest`.
pub fn numerical_rank(m: &MatrixSample) -> Result<usize> {
    let s = eigenvalues(m)?;
    let largest = s.eigenvalues().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if largest == 0.0 {
        return Ok(0);
    }
    let cut = m.n() as f64 * f64::EPSILON * largest;
    Ok(s.eigenvalues().iter().filter(|x| x.abs() > cut).count())
}

/// `sup |F_A - F_B| <= rank(A - B) / n`.
pub fn rank_bound_check(a: &MatrixSample, b: &MatrixSample) -> Result<BoundCheck> {
    same_size(a, b)?;
    let n = a.n() as f64;
    let lhs = kolmogorov_distance(&esd(&eigenvalues(a)?)?, &esd(&eigenvalues(b)?)?);
    let rank = numerical_rank(&a.sub(b)?)?;
    Ok(BoundCheck::new(lhs, rank as f64 / n)
        .with("inequality", "rank")
        .with("rank", rank))
}

/// `L(F_A, F_B)^3 <= (1/n) tr (A - B)^2`.
pub fn levy_perturbation_check(a: &MatrixSample, b: &MatrixSample) -> Result<BoundCheck> {
    same_size(a, b)?;
    let n = a.n() as f64;
    let l = levy_distance(&esd(&eigenvalues(a)?)?, &esd(&eigenvalues(b)?)?);
    let rhs = a.sub(b)?.frobenius_sq() / n;
    Ok(BoundCheck::new(l.powi(3), rhs)
        .with("inequality", "perturbation")
        .with("levy", l))
}

/// `exp(-x^2 / (2 (s2 + x)))`.
pub fn bernstein_bound(x: f64, s2: f64) -> Result<f64> {
    if !(x > 0.0) || !(s2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Bernstein bound needs x > 0 and s2 >= 0, got x = {x}, s2 = {s2}"
        )));
    }
    Ok((-x * x / (2.0 * (s2 + x))).exp())
}

/// Monte Carlo check `empirical <= bound + 3 se`, `se = sqrt(p (1 - p) / T)`.
fn monte_carlo_check(hits: usize, trials: usize, bound: f64) -> (f64, f64, BoundCheck) {
    let p = hits as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    (p, se, BoundCheck::new(p, bound + 3.0 * se))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub eps: f64,
    /// Frequency of `#{i <= j : |w_ij| > eta} >= eps n`.
    pub empirical: f64,
    pub standard_error: f64,
    /// `exp(-eps n / 8)`.
    pub bound: f64,
    /// Expected exceedance count; the bound needs it to be at most `eps n / 2`.
    pub expected_count: f64,
    pub applicable: bool,
    pub check: BoundCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalTable {
    pub n: usize,
    pub eta: f64,
    pub trials: usize,
    pub rows: Vec<SurvivalRow>,
}

/// Counts entries on or above the diagonal exceeding `eta` in each of
/// `trials` draws and compares the frequency of large counts with the
/// Bernstein-derived bound.
pub fn truncation_survival_experiment(
    spec: &EnsembleSpec,
    eta: f64,
    eps_grid: &[f64],
    trials: usize,
) -> Result<SurvivalTable> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta {eta} must be > 0")));
    }
    spec.validate()?;
    let n = spec.n();
    let counts: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let m = spec.sample(t);
            (0..n)
                .map(|i| (i..n).filter(|&j| m.get(i, j).norm() > eta).count())
                .sum()
        })
        .collect();
    let expected: f64 = (0..n)
        .map(|i| (i..n).map(|j| spec.law_at(i, j).tail_probability(eta)).sum::<f64>())
        .sum();
    let nf = n as f64;
    let rows = eps_grid
        .iter()
        .map(|&eps| {
            let threshold = eps * nf;
            let hits = counts.iter().filter(|&&c| c as f64 >= threshold).count();
            let bound = (-threshold / 8.0).exp();
            let (empirical, standard_error, check) = monte_carlo_check(hits, trials, bound);
            let applicable = expected <= threshold / 2.0;
            SurvivalRow {
                eps,
                empirical,
                standard_error,
                bound,
                expected_count: expected,
                applicable,
                check: check.with("eps", eps).with("applicable", applicable),
            }
        })
        .collect();
    Ok(SurvivalTable {
        n,
        eta,
        trials,
        rows,
    })
}

/// Continuous piecewise-linear function through `knots` (strictly increasing
/// `x`), constant outside them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter("no knots".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) || knots.iter().any(|k| !k.1.is_finite()) {
            return Err(Error::InvalidParameter(
                "knots need strictly increasing x and finite values".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            knots: vec![(0.0, c)],
        }
    }

    /// `0` below `a`, `1` above `b`, linear between.
    pub fn ramp(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, 0.0), (b, 1.0)])
    }

    pub fn total_variation(&self) -> f64 {
        self.knots.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let idx = k.partition_point(|p| p.0 <= x);
        if idx == 0 {
            return k[0].1;
        }
        if idx == k.len() {
            return k[k.len() - 1].1;
        }
        let (x0, y0) = k[idx - 1];
        let (x1, y1) = k[idx];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `int f d mu` for the spectral measure of `s`.
    pub fn integrate(&self, s: &SpectralSample) -> f64 {
        s.eigenvalues().iter().map(|&x| self.eval(x)).sum::<f64>() / s.n() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub t: f64,
    /// Frequency of `|int f d mu_W - mean| >= t` over the trials.
    pub empirical: f64,
    pub standard_error: f64,
    /// `2 exp(-n t^2 / 2)`.
    pub bound: f64,
    pub check: BoundCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTable {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub rows: Vec<ConcentrationRow>,
    /// Kolmogorov distance between the first draw's ESD and the pooled mean.
    pub single_vs_mean: f64,
}

/// `2 exp(-n t^2 / 2)`.
pub fn spectral_concentration_bound(n: usize, t: f64) -> f64 {
    2.0 * (-(n as f64) * t * t / 2.0).exp()
}

/// Deviation frequencies of `int f d mu_W` around its trial mean.
pub fn spectral_concentration_experiment(
    spec: &EnsembleSpec,
    f: &PiecewiseLinear,
    t_grid: &[f64],
    trials: usize,
) -> Result<ConcentrationTable> {
    let tv = f.total_variation();
    if tv > 1.0 + BOUND_SLACK {
        return Err(Error::InvalidParameter(format!("total variation {tv} exceeds 1")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let n = spec.n();
    let spectra = sample_spectra(spec, trials)?;
    let values: Vec<f64> = spectra.iter().map(|s| f.integrate(s)).collect();
    let mean = values.iter().sum::<f64>() / trials as f64;
    let rows = t_grid
        .iter()
        .map(|&t| {
            let hits = values.iter().filter(|v| (*v - mean).abs() >= t).count();
            let bound = spectral_concentration_bound(n, t);
            let (empirical, standard_error, check) = monte_carlo_check(hits, trials, bound);
            ConcentrationRow {
                t,
                empirical,
                standard_error,
                bound,
                check: check.with("t", t),
            }
        })
        .collect();
    let single_vs_mean = kolmogorov_distance(&esd(&spectra[0])?, &pool(&spectra)?);
    Ok(ConcentrationTable {
        n,
        trials,
        mean,
        rows,
        single_vs_mean,
    })
}

/// Columns `t, empirical, bound, satisfied` (with `t` the level `eps` for
/// survival tables).
pub fn write_bound_table<W: Write>(rows: &[(f64, f64, f64, bool)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "empirical", "bound", "satisfied"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err("<csv>"))?;
    Ok(())
}

impl SurvivalTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| (r.eps, r.empirical, r.bound, r.check.satisfied))
            .collect();
        write_bound_table(&rows, writer)
    }
}

impl ConcentrationTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| (r.t, r.empirical, r.bound, r.check.satisfied))
            .collect();
        write_bound_table(&rows, writer)
    }
}

/// Which inequality a [`property_suite`] exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    Rank,
    Perturbation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub inequality: Inequality,
    pub cases: usize,
    pub violations: usize,
    /// Largest `lhs - rhs` seen.
    pub worst_gap: f64,
}

/// Random Hermitian pair for case `case`: `A` a Gaussian Wigner matrix
/// (complex for odd cases), `B = A + sum_l s_l v_l v_l^*` with
/// `1 + case % 3` real Gaussian directions, or for the perturbation suite
/// `B = A + E` with `E` a small Gaussian Wigner matrix.
pub fn random_pair(
    inequality: Inequality,
    n: usize,
    seed: u64,
    case: u64,
) -> Result<(MatrixSample, MatrixSample)> {
    use crate::ensemble::SymmetryClass;
    let class = if case % 2 == 1 {
        SymmetryClass::Complex
    } else {
        SymmetryClass::Real
    };
    let profile = VarianceProfile::uniform(n)?;
    let a = EnsembleSpec::new(profile.clone(), LawFamily::Gaussian)
        .with_class(class)
        .with_seed(seed)
        .sample(case);
    let mut rng = keyed(seed, Domain::Experiment, case);
    let b = match inequality {
        Inequality::Rank => {
            let rank = 1 + (case % 3) as usize;
            let mut delta = vec![0.0; n * n];
            for _ in 0..rank {
                let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let s: f64 = rng.sample::<f64, _>(StandardNormal) / n as f64;
                for i in 0..n {
                    for j in i..n {
                        let x = s * v[i] * v[j];
                        delta[i * n + j] += x;
                        if j != i {
                            delta[j * n + i] += x;
                        }
                    }
                }
            }
            let d = MatrixSample::from_real(n, delta)?;
            a.sub(&d)?
        }
        Inequality::Perturbation => {
            let scale: f64 = rng.random_range(0.01..1.0);
            let e = EnsembleSpec::new(profile.scaled(scale * scale)?, LawFamily::Gaussian)
                .with_class(class)
                .with_seed(seed ^ 0x5eed)
                .sample(case);
            a.sub(&e)?
        }
    };
    Ok((a, b))
}

/// Runs the chosen check on `cases` random pairs of size `n`.
pub fn property_suite(inequality: Inequality, n: usize, cases: usize, seed: u64) -> Result<SuiteSummary> {
    let checks: Vec<BoundCheck> = (0..cases as u64)
        .into_par_iter()
        .map(|case| {
            let (a, b) = random_pair(inequality, n, seed, case)?;
            match inequality {
                Inequality::Rank => rank_bound_check(&a, &b),
                Inequality::Perturbation => levy_perturbation_check(&a, &b),
            }
        })
        .collect::<Result<_>>()?;
    Ok(SuiteSummary {
        inequality,
        cases,
        violations: checks.iter().filter(|c| !c.satisfied).count(),
        worst_gap: checks.iter().map(|c| c.lhs - c.rhs).fold(f64::NEG_INFINITY, f64::max),
    })
}
