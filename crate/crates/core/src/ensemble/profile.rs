use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Uniform,
    Checkerboard,
    Block,
    Custom,
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "checkerboard" => Ok(Self::Checkerboard),
            "block" => Ok(Self::Block),
            "custom" => Ok(Self::Custom),
            other => Err(Error::UnknownName {
                what: "profile kind",
                value: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Checkerboard => "checkerboard",
            Self::Block => "block",
            Self::Custom => "custom",
        })
    }
}

/// Symmetric array of entry second moments `E|w_ij|^2`.
///
/// For infinite-variance laws the same array carries the squared scale of the
/// law instead. Each index also carries a class label: off-diagonal values
/// depend only on the pair of classes. Built kinds have one or two classes;
/// custom profiles fall back to one class per index unless the off-diagonal
/// part is constant.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceProfile {
    n: usize,
    sigma2: Vec<f64>,
    kind: ProfileKind,
    classes: Vec<usize>,
}

impl VarianceProfile {
    pub fn build(kind: ProfileKind, n: usize) -> Result<Self> {
        match kind {
            ProfileKind::Uniform => Self::uniform(n),
            ProfileKind::Checkerboard => Self::checkerboard(n),
            ProfileKind::Block => Self::block(n),
            ProfileKind::Custom => Err(Error::InvalidParameter(
                "custom profiles are loaded from values, not built".into(),
            )),
        }
    }

    /// All entries `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let v = 1.0 / n as f64;
        Ok(Self {
            n,
            sigma2: vec![v; n * n],
            kind: ProfileKind::Uniform,
            classes: vec![0; n],
        })
    }

    /// `2/n` where `i + j` is even, zero elsewhere.
    pub fn checkerboard(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let v = 2.0 / n as f64;
        let sigma2 = (0..n * n)
            .map(|idx| if (idx / n + idx % n) % 2 == 0 { v } else { 0.0 })
            .collect();
        Ok(Self {
            n,
            sigma2,
            kind: ProfileKind::Checkerboard,
            classes: (0..n).map(|i| i % 2).collect(),
        })
    }

    /// `[[A, B], [B^T, D]]` with `A` of size `floor(n/2)`; every entry `1/n`
    /// except the off-diagonal entries of `D`, which are zero.
    pub fn block(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let half = n / 2;
        let v = 1.0 / n as f64;
        let mut sigma2 = vec![v; n * n];
        for i in half..n {
            for j in half..n {
                if i != j {
                    sigma2[i * n + j] = 0.0;
                }
            }
        }
        Ok(Self {
            n,
            sigma2,
            kind: ProfileKind::Block,
            classes: (0..n).map(|i| usize::from(i >= half)).collect(),
        })
    }

    /// Custom profile from a row-major `n x n` array. Symmetry must be exact.
    pub fn from_values(n: usize, sigma2: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if sigma2.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: sigma2.len(),
                right: n * n,
            });
        }
        for i in 0..n {
            for j in 0..n {
                let value = sigma2[i * n + j];
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidProfileEntry { row: i, col: j, value });
                }
                if j > i && value != sigma2[j * n + i] {
                    return Err(Error::AsymmetricProfile { row: i, col: j });
                }
            }
        }
        let classes = if constant_off_diagonal(n, &sigma2) {
            vec![0; n]
        } else {
            (0..n).collect()
        };
        Ok(Self {
            n,
            sigma2,
            kind: ProfileKind::Custom,
            classes,
        })
    }

    /// Reads `n` lines of `n` comma-separated nonnegative decimals.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for record in rdr.records() {
            let record = record?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|_| {
                        Error::InvalidParameter(format!("not a decimal: `{field}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                left: bad.len(),
                right: n,
            });
        }
        Self::from_values(n, rows.into_iter().flatten().collect())
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(io_err(path))?;
        Self::from_csv_reader(file)
    }

    /// Same shape and classes, every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() || factor < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "profile scale factor {factor}"
            )));
        }
        Ok(Self {
            sigma2: self.sigma2.iter().map(|v| v * factor).collect(),
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sigma2[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.sigma2[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row_sum(i)).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.sigma2.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_row_sum(&self) -> f64 {
        (0..self.n).map(|i| self.row_sum(i)).fold(0.0, f64::max)
    }

    /// Class label of every index.
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.iter().max().map_or(0, |m| m + 1)
    }

    /// Class sizes and the `r x r` table of off-diagonal values.
    ///
    /// Entries for a class paired with itself are zero when the class has a
    /// single member (no off-diagonal pair exists).
    pub fn class_table(&self) -> (Vec<usize>, Vec<f64>) {
        let r = self.class_count();
        let mut sizes = vec![0usize; r];
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); r];
        for (i, &c) in self.classes.iter().enumerate() {
            sizes[c] += 1;
            if members[c].len() < 2 {
                members[c].push(i);
            }
        }
        let mut table = vec![0.0; r * r];
        for a in 0..r {
            for b in 0..r {
                let i = members[a][0];
                let j = if a == b {
                    match members[a].get(1) {
                        Some(&j) => j,
                        None => continue,
                    }
                } else {
                    members[b][0]
                };
                table[a * r + b] = self.get(i, j);
            }
        }
        (sizes, table)
    }
}

fn constant_off_diagonal(n: usize, sigma2: &[f64]) -> bool {
    if n < 2 {
        return true;
    }
    let v = sigma2[1];
    (0..n).all(|i| (0..n).all(|j| i == j || sigma2[i * n + j] == v))
}
