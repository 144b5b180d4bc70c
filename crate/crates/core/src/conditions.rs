//! Condition functionals of an ensemble, computed from closed-form entry
//! moments.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleSpec, EntryLaw};
use crate::error::{io_err, Error, Result};
use crate::metrics::Neumaier;

fn check_level(a: f64) -> Result<()> {
    if a >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("truncation level {a} must be >= 0")))
    }
}

/// `E[|w|^2; |w| <= a]`.
pub fn truncated_second_moment(law: &EntryLaw, a: f64) -> Result<f64> {
    check_level(a)?;
    Ok(law.truncated_second_moment(a))
}

/// `E[w; |w| <= a]`.
pub fn truncated_mean(law: &EntryLaw, a: f64) -> Result<Complex64> {
    check_level(a)?;
    Ok(law.truncated_mean(a))
}

/// `P(|w| > eps)`.
pub fn tail_probability(law: &EntryLaw, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} must be > 0")));
    }
    Ok(law.tail_probability(eps))
}

/// `1, 1/2, ..., 2^-10`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..=10).map(|k| 0.5f64.powi(k)).collect()
}

pub const DEFAULT_DELTA_GRID: [f64; 7] = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1];

/// Left-hand sides of the condition functionals at one `n`.
///
/// Functionals that need finite variances are `None` for ensembles without.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub n: usize,
    pub eps_grid: Vec<f64>,
    /// `(1/n) sum_ij E[|w|^2; |w| > eps]`.
    pub lindeberg: Option<Vec<f64>>,
    /// `(1/n) sum_ij P(|w| > eps)`.
    pub weak_lindeberg: Vec<f64>,
    /// `(1/n) sum_ij |E[w; |w| <= 1]|^2`.
    pub weak_zero: f64,
    /// `(1/n) sum_i |sum_j E|w|^2 - 1|`.
    pub row_one: Option<f64>,
    /// `(1/n) sum_i |sum_j E[|w|^2; |w| <= 1] - 1|`.
    pub weak_row_one: f64,
    pub delta_grid: Vec<f64>,
    /// `(1/n)` times the truncated variance carried by the `ceil(delta n)`
    /// heaviest rows.
    pub margin_curve: Vec<f64>,
    /// `max_i sum_j E|w|^2`.
    pub row_bdd_sup: Option<f64>,
    /// `sum_j E|w_ij|^2` per row.
    pub row_sums: Option<Vec<f64>>,
    /// `sum_j E[|w_ij|^2; |w_ij| <= 1]` per row.
    pub truncated_row_sums: Vec<f64>,
}

/// Per-law values shared by all entries with the same law.
struct LawValues {
    second: f64,
    truncated: f64,
    tail_second: Vec<f64>,
    tail_prob: Vec<f64>,
    mean_sq: f64,
}

impl LawValues {
    fn new(law: &EntryLaw, eps_grid: &[f64]) -> Self {
        Self {
            second: law.second_moment(),
            truncated: law.truncated_second_moment(1.0),
            tail_second: eps_grid.iter().map(|&e| law.tail_second_moment(e)).collect(),
            tail_prob: eps_grid.iter().map(|&e| law.tail_probability(e)).collect(),
            mean_sq: law.truncated_mean(1.0).norm_sqr(),
        }
    }
}

fn validate_grids(eps_grid: &[f64], delta_grid: &[f64]) -> Result<()> {
    if eps_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("eps grid values must be > 0".into()));
    }
    if delta_grid.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
        return Err(Error::InvalidParameter("delta grid values must be in (0, 1]".into()));
    }
    Ok(())
}

/// Evaluates every functional exactly. Entries sharing a law (same profile
/// value and diagonal flag) are evaluated once.
pub fn evaluate_conditions(
    spec: &EnsembleSpec,
    eps_grid: &[f64],
    delta_grid: &[f64],
) -> Result<ConditionReport> {
    spec.validate()?;
    validate_grids(eps_grid, delta_grid)?;
    let n = spec.n();
    let nf = n as f64;

    let mut index: HashMap<(u64, bool), usize> = HashMap::new();
    let mut values: Vec<LawValues> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    let mut row_acc = vec![Neumaier::default(); n];
    let mut truncated_acc = vec![Neumaier::default(); n];
    let mut last: Option<((u64, bool), usize)> = None;
    for i in 0..n {
        for j in 0..n {
            let key = (spec.profile.get(i, j).to_bits(), i == j);
            let g = match last {
                Some((k, g)) if k == key => g,
                _ => *index.entry(key).or_insert_with(|| {
                    values.push(LawValues::new(&spec.law_at(i, j), eps_grid));
                    counts.push(0);
                    values.len() - 1
                }),
            };
            last = Some((key, g));
            counts[g] += 1;
            row_acc[i].add(values[g].second);
            truncated_acc[i].add(values[g].truncated);
        }
    }
    let row_sums: Vec<f64> = row_acc.iter().map(Neumaier::value).collect();
    let truncated_row_sums: Vec<f64> = truncated_acc.iter().map(Neumaier::value).collect();
    let total = |f: &dyn Fn(&LawValues) -> f64| -> f64 {
        values
            .iter()
            .zip(&counts)
            .map(|(v, &c)| if c == 0 { 0.0 } else { c as f64 * f(v) })
            .sum::<f64>()
            / nf
    };

    let finite = values.iter().all(|v| v.second.is_finite());
    let lindeberg = finite.then(|| {
        (0..eps_grid.len())
            .map(|e| total(&|v| v.tail_second[e]))
            .collect()
    });
    let weak_lindeberg = (0..eps_grid.len())
        .map(|e| total(&|v| v.tail_prob[e]))
        .collect();
    let weak_zero = total(&|v| v.mean_sq);
    let weak_row_one = truncated_row_sums.iter().map(|s| (s - 1.0).abs()).sum::<f64>() / nf;
    let row_one = finite.then(|| row_sums.iter().map(|s| (s - 1.0).abs()).sum::<f64>() / nf);
    let row_bdd_sup = finite.then(|| row_sums.iter().copied().fold(0.0, f64::max));

    let mut heaviest = truncated_row_sums.clone();
    heaviest.sort_by(|a, b| b.total_cmp(a));
    let margin_curve = delta_grid
        .iter()
        .map(|&d| {
            let m = ((d * nf).ceil() as usize).clamp(1, n);
            heaviest[..m].iter().sum::<f64>() / nf
        })
        .collect();

    Ok(ConditionReport {
        n,
        eps_grid: eps_grid.to_vec(),
        lindeberg,
        weak_lindeberg,
        weak_zero,
        row_one,
        weak_row_one,
        delta_grid: delta_grid.to_vec(),
        margin_curve,
        row_bdd_sup,
        row_sums: finite.then_some(row_sums),
        truncated_row_sums,
    })
}

/// `(1/n) sum_i |sum_j E|w_ij|^2 - 1|`; an error for infinite variances.
pub fn row_one(spec: &EnsembleSpec) -> Result<f64> {
    evaluate_conditions(spec, &[], &[])?
        .row_one
        .ok_or(Error::InfiniteVariance("row_one"))
}

impl ConditionReport {
    /// `(functional, parameter, value)` triples in a fixed order; the
    /// parameter is `None` for scalar functionals.
    pub fn long_rows(&self) -> Vec<(&'static str, Option<f64>, f64)> {
        let mut rows = vec![("n", None, self.n as f64)];
        if let Some(l) = &self.lindeberg {
            rows.extend(self.eps_grid.iter().zip(l).map(|(e, v)| ("lindeberg", Some(*e), *v)));
        }
        rows.extend(
            self.eps_grid
                .iter()
                .zip(&self.weak_lindeberg)
                .map(|(e, v)| ("weak_lindeberg", Some(*e), *v)),
        );
        rows.push(("weak_zero", None, self.weak_zero));
        if let Some(v) = self.row_one {
            rows.push(("row_one", None, v));
        }
        rows.push(("weak_row_one", None, self.weak_row_one));
        rows.extend(self.delta_grid.iter().zip(&self.margin_curve).map(|(d, v)| ("margin", Some(*d), *v)));
        if let Some(v) = self.row_bdd_sup {
            rows.push(("row_bdd_sup", None, v));
        }
        rows
    }

    /// Long format: `functional, parameter, value`; the parameter column is
    /// empty for scalar functionals.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["functional", "parameter", "value"])?;
        for (name, p, v) in self.long_rows() {
            let p = p.map(|p| p.to_string()).unwrap_or_default();
            w.write_record([name, &p, &v.to_string()])?;
        }
        w.flush().map_err(io_err("<csv>"))?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }
}

/// Indices with `values[i] <= eps`, or the index of the smallest value when
/// none qualifies.
pub fn select_good_rows(values: &[f64], eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} must be > 0")));
    }
    if values.is_empty() {
        return Err(Error::EmptyDimension);
    }
    let good: Vec<usize> = (0..values.len()).filter(|&i| values[i] <= eps).collect();
    if !good.is_empty() {
        return Ok(good);
    }
    let best = (0..values.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("nonempty");
    Ok(vec![best])
}
