use num_complex::Complex64;

use super::law::{EntryLaw, LawFamily, SymmetryClass};
use super::profile::VarianceProfile;
use crate::error::{Error, Result};
use crate::rng::EntryStreams;

/// Everything needed to draw a matrix: profile, entry family, symmetry class,
/// seed and an optional truncation level.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub profile: VarianceProfile,
    pub family: LawFamily,
    pub class: SymmetryClass,
    pub seed: u64,
    /// When set, every entry is replaced by its truncated, centered version.
    pub truncation: Option<f64>,
}

impl EnsembleSpec {
    pub fn new(profile: VarianceProfile, family: LawFamily) -> Self {
        Self {
            profile,
            family,
            class: SymmetryClass::Real,
            seed: 0,
            truncation: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_class(mut self, class: SymmetryClass) -> Self {
        self.class = class;
        self
    }

    pub fn truncated(mut self, eta: f64) -> Self {
        self.truncation = Some(eta);
        self
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if let Some(eta) = self.truncation {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidParameter(format!("truncation level {eta}")));
            }
        }
        Ok(())
    }

    /// Law of entry `(i, j)`. Diagonal entries are always real.
    pub fn law_at(&self, i: usize, j: usize) -> EntryLaw {
        let class = if i == j { SymmetryClass::Real } else { self.class };
        let law = self.family.law(self.profile.get(i, j).sqrt(), class);
        match self.truncation {
            // validated positive, cannot fail
            Some(eta) => law.truncate_center(eta).unwrap_or(law),
            None => law,
        }
    }

    pub fn has_finite_variance(&self) -> bool {
        self.family.has_finite_variance() || self.truncation.is_some()
    }

    /// Draws trial `trial`. Entry `(i, j)`, `i <= j`, comes from the stream
    /// keyed by `(seed, trial, i, j)`; the lower triangle is its conjugate.
    pub fn sample(&self, trial: u64) -> MatrixSample {
        let n = self.n();
        let streams = EntryStreams::new(self.seed, trial);
        let real = self.class == SymmetryClass::Real;
        let mut re = vec![0.0; n * n];
        let mut im = if real { Vec::new() } else { vec![0.0; n * n] };
        for i in 0..n {
            for j in i..n {
                let law = self.law_at(i, j);
                let w = if law.is_zero() {
                    Complex64::new(0.0, 0.0)
                } else {
                    law.sample(&mut streams.entry(i, j))
                };
                re[i * n + j] = w.re;
                re[j * n + i] = w.re;
                if !real && i != j {
                    im[i * n + j] = w.im;
                    im[j * n + i] = -w.im;
                }
            }
        }
        let entries = if real {
            Entries::Real(re)
        } else {
            Entries::Complex(
                re.into_iter()
                    .zip(im)
                    .map(|(r, i)| Complex64::new(r, i))
                    .collect(),
            )
        };
        MatrixSample { n, entries }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// A dense Hermitian matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSample {
    n: usize,
    entries: Entries,
}

impl MatrixSample {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: Entries::Real(vec![0.0; n * n]),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self {
            n,
            entries: Entries::Real(data),
        }
    }

    pub fn from_real(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: n * n,
            });
        }
        let m = Self {
            n,
            entries: Entries::Real(data),
        };
        m.check_hermitian()?;
        Ok(m)
    }

    pub fn from_complex(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: n * n,
            });
        }
        let m = Self {
            n,
            entries: Entries::Complex(data),
        };
        m.check_hermitian()?;
        Ok(m)
    }

    /// Exact (bitwise) conjugate symmetry with a real diagonal.
    pub fn check_hermitian(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let a = self.get(i, j);
                let b = self.get(j, i);
                if a != b.conj() {
                    return Err(Error::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn is_real(&self) -> bool {
        matches!(self.entries, Entries::Real(_))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match &self.entries {
            Entries::Real(d) => Complex64::new(d[i * self.n + j], 0.0),
            Entries::Complex(d) => d[i * self.n + j],
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    /// `sum |w_ij|^2 = tr W^2`.
    pub fn frobenius_sq(&self) -> f64 {
        match &self.entries {
            Entries::Real(d) => d.iter().map(|x| x * x).sum(),
            Entries::Complex(d) => d.iter().map(|x| x.norm_sqr()).sum(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.entries {
            Entries::Real(d) => d.iter().fold(0.0, |m, x| m.max(x.abs())),
            Entries::Complex(d) => d.iter().fold(0.0, |m, x| m.max(x.norm())),
        }
    }

    /// Largest absolute row sum; bounds every eigenvalue (Gershgorin).
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let entries = match (&self.entries, &other.entries) {
            (Entries::Real(a), Entries::Real(b)) => {
                Entries::Real(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            _ => Entries::Complex(
                (0..self.n * self.n)
                    .map(|k| self.get(k / self.n, k % self.n) - other.get(k / self.n, k % self.n))
                    .collect(),
            ),
        };
        Ok(Self { n: self.n, entries })
    }

    /// `tr W^k` by repeated dense multiplication. Intended for small matrices.
    pub fn trace_power(&self, k: u32) -> f64 {
        let n = self.n;
        if k == 0 {
            return n as f64;
        }
        let w: Vec<Complex64> = (0..n * n).map(|idx| self.get(idx / n, idx % n)).collect();
        let mut acc = w.clone();
        for _ in 1..k {
            let mut next = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for l in 0..n {
                    let a = acc[i * n + l];
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..n {
                        next[i * n + j] += a * w[l * n + j];
                    }
                }
            }
            acc = next;
        }
        (0..n).map(|i| acc[i * n + i].re).sum()
    }
}
