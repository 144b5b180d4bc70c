//! Row sums with random signs and their distance to the standard normal law.

use std::io::Write;

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::ensemble::{EnsembleSpec, EntryLaw};
use crate::error::{Error, Result};
use crate::metrics::{kolmogorov_distance, levy_distance, Normal};
use crate::rng::{keyed, Domain};
use crate::spectra::StepMeasure;

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Resample count below which Lévy estimates are too noisy for a 0.01 budget.
pub const RECOMMENDED_RESAMPLES: usize = 10_000;

fn row_key(n: usize, i: usize) -> u64 {
    ((n as u64) << 32) | i as u64
}

/// Draws `resamples` values of `sum_j +-|w_j| 1{|w_j| <= cut}` for one row.
fn draw_row_sums(
    laws: &[EntryLaw],
    seed: u64,
    key: u64,
    resamples: usize,
    cut: Option<f64>,
) -> Vec<f64> {
    let mut entries: ChaCha8Rng = keyed(seed, Domain::RowSum, key);
    let mut signs: ChaCha8Rng = keyed(seed, Domain::Signs, key);
    let active: Vec<&EntryLaw> = laws.iter().filter(|l| !l.is_zero()).collect();
    let mut out = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut sum = 0.0;
        let mut bits = 0u64;
        for (j, law) in active.iter().enumerate() {
            if j % 64 == 0 {
                bits = signs.next_u64();
            }
            let mut a = law.sample(&mut entries).norm();
            if cut.is_some_and(|c| a > c) {
                a = 0.0;
            }
            sum += if bits & 1 == 1 { a } else { -a };
            bits >>= 1;
        }
        out.push(sum);
    }
    out
}

/// Empirical law of `sum_j +-|w_ij|` over `resamples` fresh draws of row `i`
/// and of the signs. Uses streams separate from matrix sampling.
pub fn row_sum_distribution(spec: &EnsembleSpec, i: usize, resamples: usize) -> Result<StepMeasure> {
    let n = spec.n();
    if i >= n {
        return Err(Error::InvalidParameter(format!("row {i} out of range for n = {n}")));
    }
    if resamples == 0 {
        return Err(Error::InvalidParameter("resamples must be >= 1".into()));
    }
    spec.validate()?;
    let laws: Vec<EntryLaw> = (0..n).map(|j| spec.law_at(i, j)).collect();
    StepMeasure::uniform(&draw_row_sums(&laws, spec.seed, row_key(n, i), resamples, None))
}

/// Rows entering a [`RowSumStudy`] and how the rest are treated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowSubset {
    All,
    /// The listed rows; every other row counts with distance 1.
    CountRestAsOne(Vec<usize>),
    /// The listed rows; the average is taken over them only.
    Only(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowSumStudy {
    pub n: usize,
    pub resamples: usize,
    pub rows: Vec<usize>,
    /// `L(F_ni, Phi)` for each entry of `rows`.
    pub levy: Vec<f64>,
    pub average: f64,
    pub subset: RowSubset,
}

impl RowSumStudy {
    /// Columns `row, levy, n, resamples`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["row", "levy", "n", "resamples"])?;
        for (row, l) in self.rows.iter().zip(&self.levy) {
            w.serialize((row, l, self.n, self.resamples))?;
        }
        w.flush().map_err(crate::error::io_err("<csv>"))?;
        Ok(())
    }
}

/// `(1/n) sum_i L(F_ni, Phi)` with each `F_ni` estimated from `resamples`
/// draws. Rows are processed in parallel with per-row streams.
pub fn corollary_lhs(spec: &EnsembleSpec, resamples: usize, subset: RowSubset) -> Result<RowSumStudy> {
    let n = spec.n();
    let rows: Vec<usize> = match &subset {
        RowSubset::All => (0..n).collect(),
        RowSubset::CountRestAsOne(r) | RowSubset::Only(r) => r.clone(),
    };
    if rows.is_empty() {
        return Err(Error::InvalidParameter("empty row subset".into()));
    }
    let levy: Vec<f64> = rows
        .par_iter()
        .map(|&i| {
            let f = row_sum_distribution(spec, i, resamples)?;
            Ok(levy_distance(&f, &Normal::STANDARD))
        })
        .collect::<Result<_>>()?;
    let total: f64 = levy.iter().sum();
    let average = match subset {
        RowSubset::All => total / n as f64,
        RowSubset::CountRestAsOne(_) => (total + (n - rows.len()) as f64) / n as f64,
        RowSubset::Only(_) => total / rows.len() as f64,
    };
    Ok(RowSumStudy {
        n,
        resamples,
        rows,
        levy,
        average,
        subset,
    })
}

/// How the truncated row variance behaves at the largest `n` checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceTrend {
    /// Close to 1: compatible with convergence to the standard normal.
    NearOne,
    /// Close to 0: the row sums collapse to zero and cannot converge to it.
    Vanishing,
    /// Settles elsewhere: a nondegenerate limit other than 1 is excluded.
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindebergFellerRow {
    pub n: usize,
    /// `c_n = sum_j E[|w|^2; |w| <= 1]`.
    pub truncated_variance: f64,
    /// `(eps, sum_j E[|w|^2; eps < |w| <= 1])`.
    pub lindeberg: Vec<(f64, f64)>,
    /// Kolmogorov distance of the sampled `sum_j +-|w_j| 1{|w_j| <= 1} / sqrt(c_n)`
    /// to the standard normal; `None` when `c_n = 0`.
    pub ks_to_normal: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindebergFellerReport {
    pub rows: Vec<LindebergFellerRow>,
    pub trend: VarianceTrend,
}

/// Tolerance used to classify the final truncated variance.
pub const TREND_TOLERANCE: f64 = 0.05;

/// Checks the Lindeberg-Feller setting along `n_grid` for row 0 of the
/// ensembles produced by `spec_at`.
pub fn lindeberg_feller_check<S>(
    spec_at: S,
    n_grid: &[usize],
    eps_grid: &[f64],
    resamples: usize,
) -> Result<LindebergFellerReport>
where
    S: Fn(usize) -> Result<EnsembleSpec>,
{
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("empty n grid".into()));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let spec = spec_at(n)?;
        spec.validate()?;
        let laws: Vec<EntryLaw> = (0..spec.n()).map(|j| spec.law_at(0, j)).collect();
        let c: f64 = laws.iter().map(|l| l.truncated_second_moment(1.0)).sum();
        let lindeberg = eps_grid
            .iter()
            .map(|&eps| {
                let v: f64 = laws
                    .iter()
                    .map(|l| (l.truncated_second_moment(1.0) - l.truncated_second_moment(eps)).max(0.0))
                    .sum();
                (eps, v)
            })
            .collect();
        let ks_to_normal = if c > 0.0 && resamples > 0 {
            let scale = c.sqrt();
            let sums: Vec<f64> = draw_row_sums(&laws, spec.seed, row_key(spec.n(), 0), resamples, Some(1.0))
                .into_iter()
                .map(|s| s / scale)
                .collect();
            Some(kolmogorov_distance(&StepMeasure::uniform(&sums)?, &Normal::STANDARD))
        } else {
            None
        };
        rows.push(LindebergFellerRow {
            n: spec.n(),
            truncated_variance: c,
            lindeberg,
            ks_to_normal,
        });
    }
    let last = rows.last().map_or(0.0, |r| r.truncated_variance);
    let trend = if (last - 1.0).abs() <= TREND_TOLERANCE {
        VarianceTrend::NearOne
    } else if last <= TREND_TOLERANCE {
        VarianceTrend::Vanishing
    } else {
        VarianceTrend::Other
    };
    Ok(LindebergFellerReport { rows, trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{heavy_tail_scale, LawFamily, VarianceProfile};
    use approx::assert_abs_diff_eq;

    fn uniform(n: usize, family: LawFamily) -> EnsembleSpec {
        EnsembleSpec::new(VarianceProfile::uniform(n).unwrap(), family).with_seed(17)
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_abs_diff_eq!(normal_cdf(1.96), 0.9750021049, epsilon = 1e-10);
        for x in [0.3, 1.0, 2.5, 7.0] {
            assert_abs_diff_eq!(normal_cdf(-x), 1.0 - normal_cdf(x), epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_rows_are_point_masses() {
        let spec = uniform(5, LawFamily::Zero);
        assert_eq!(row_sum_distribution(&spec, 2, 50).unwrap(), StepMeasure::point_mass(0.0));
        let study = corollary_lhs(&spec, 100, RowSubset::All).unwrap();
        for l in &study.levy {
            assert_abs_diff_eq!(*l, 0.35958045, epsilon = 1e-7);
        }
    }

    #[test]
    fn rademacher_support() {
        let m = row_sum_distribution(&uniform(4, LawFamily::Rademacher), 0, 2000).unwrap();
        assert_eq!(m.atoms(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn gaussian_rows_are_normal() {
        let r = 4000;
        let m = row_sum_distribution(&uniform(30, LawFamily::Gaussian), 3, r).unwrap();
        assert!(kolmogorov_distance(&m, &Normal::STANDARD) <= 1.36 / (r as f64).sqrt());
        let mean = crate::metrics::measure_moment(&m, 1);
        let var = crate::metrics::measure_moment(&m, 2);
        assert!(mean.abs() <= 3.0 * (var / r as f64).sqrt());
    }

    #[test]
    fn subset_policies() {
        let spec = uniform(4, LawFamily::Zero);
        let l0 = 0.35958045;
        let s = corollary_lhs(&spec, 10, RowSubset::CountRestAsOne(vec![0])).unwrap();
        assert_abs_diff_eq!(s.average, (l0 + 3.0) / 4.0, epsilon = 1e-7);
        let s = corollary_lhs(&spec, 10, RowSubset::Only(vec![0, 1])).unwrap();
        assert_abs_diff_eq!(s.average, l0, epsilon = 1e-7);
    }

    #[test]
    fn lindeberg_feller_trends() {
        let eps = [0.1, 0.5];
        let g = lindeberg_feller_check(|n| Ok(uniform(n, LawFamily::Gaussian)), &[25, 100], &eps, 500).unwrap();
        assert_eq!(g.trend, VarianceTrend::NearOne);
        // n = 25: E[g^2; |g| > 5]
        assert_abs_diff_eq!(g.rows[0].truncated_variance, 1.0 - 1.5440498291e-5, epsilon = 1e-12);
        assert!(1.0 - g.rows[1].truncated_variance < 1e-15);

        let h = lindeberg_feller_check(
            |n| {
                let s = heavy_tail_scale(n)?;
                let profile = VarianceProfile::uniform(n)?.scaled(s * s * n as f64)?;
                Ok(EnsembleSpec::new(profile, LawFamily::HeavyTailCubic))
            },
            &[200, 800],
            &eps,
            0,
        )
        .unwrap();
        for r in &h.rows {
            assert_abs_diff_eq!(r.truncated_variance, 1.0, epsilon = 1e-12);
        }

        let z = lindeberg_feller_check(|n| Ok(uniform(n, LawFamily::Zero)), &[10, 20], &eps, 10).unwrap();
        assert_eq!(z.trend, VarianceTrend::Vanishing);
        assert!(z.rows.iter().all(|r| r.truncated_variance == 0.0 && r.ks_to_normal.is_none()));
    }
}
