use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite probability measure on the real line: strictly increasing atoms
/// with positive weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct StepMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl From<StepMeasure> for RawMeasure {
    fn from(m: StepMeasure) -> Self {
        Self {
            atoms: m.atoms,
            weights: m.weights,
        }
    }
}

impl TryFrom<RawMeasure> for StepMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        if raw.atoms.len() != raw.weights.len() {
            return Err(Error::DimensionMismatch {
                left: raw.atoms.len(),
                right: raw.weights.len(),
            });
        }
        Self::from_weighted(raw.atoms.into_iter().zip(raw.weights))
    }
}

const WEIGHT_TOLERANCE: f64 = 1e-12;

impl StepMeasure {
    /// Builds a measure from `(atom, weight)` pairs, coalescing exactly equal
    /// atoms.
    pub fn from_weighted(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("empty measure".into()));
        }
        if pairs
            .iter()
            .any(|&(a, w)| !a.is_finite() || !w.is_finite() || w <= 0.0)
        {
            return Err(Error::InvalidParameter(
                "measure atoms must be finite with positive weights".into(),
            ));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            if atoms.last() == Some(&a) {
                *weights.last_mut().unwrap() += w;
            } else {
                atoms.push(a);
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "measure weights sum to {total}"
            )));
        }
        Ok(Self::with_cumulative(atoms, weights))
    }

    /// Uniform measure on `values` with multiplicity: `(1/N) sum delta_v`.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty measure".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite atom".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let total = sorted.len() as f64;
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        let mut start = 0;
        while start < sorted.len() {
            let mut end = start + 1;
            while end < sorted.len() && sorted[end] == sorted[start] {
                end += 1;
            }
            atoms.push(sorted[start]);
            weights.push((end - start) as f64 / total);
            start = end;
        }
        Ok(Self::with_cumulative(atoms, weights))
    }

    pub fn point_mass(x: f64) -> Self {
        Self::with_cumulative(vec![x], vec![1.0])
    }

    /// Equal-weight mixture of several measures.
    pub fn mixture(parts: &[StepMeasure]) -> Result<Self> {
        let t = parts.len() as f64;
        Self::from_weighted(
            parts
                .iter()
                .flat_map(|m| m.atoms.iter().zip(&m.weights).map(move |(&a, &w)| (a, w / t))),
        )
    }

    fn with_cumulative(atoms: Vec<f64>, weights: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        // weights are validated to sum to one
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self {
            atoms,
            weights,
            cumulative,
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `F(x) = mu(-inf, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `F(x-) = mu(-inf, x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a < x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `(atom, weight)` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["atom", "weight"])?;
        for (a, p) in self.atoms.iter().zip(&self.weights) {
            w.serialize((a, p))?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv>".into(),
            source,
        })?;
        Ok(())
    }
}
