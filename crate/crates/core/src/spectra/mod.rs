//! Eigenvalues of Hermitian samples and the empirical / mean spectral
//! measures built from them.

mod eigen;
mod measure;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use eigen::{symmetric_eigenvalues, EigenSolver};
pub use measure::StepMeasure;

use crate::ensemble::{EnsembleSpec, MatrixSample};
use crate::error::{Error, Result};

/// Eigenvalues of one matrix, sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    eigenvalues: Vec<f64>,
}

impl SpectralSample {
    /// Wraps precomputed eigenvalues (any order).
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self { eigenvalues }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `sum lambda_i^k`.
    pub fn power_sum(&self, k: u32) -> f64 {
        self.eigenvalues.iter().map(|x| x.powi(k as i32)).sum()
    }
}

pub fn eigenvalues(m: &MatrixSample) -> Result<SpectralSample> {
    eigenvalues_with(m, EigenSolver::default())
}

pub fn eigenvalues_with(m: &MatrixSample, solver: EigenSolver) -> Result<SpectralSample> {
    Ok(SpectralSample::new(eigen::solve(m, solver)?))
}

/// `(1/n) sum delta_{lambda_i}`.
pub fn esd(s: &SpectralSample) -> Result<StepMeasure> {
    StepMeasure::uniform(&s.eigenvalues)
}

/// Spectra of trials `0..trials`, in trial order. Trials run on the current
/// rayon pool; each matrix is dropped as soon as its eigenvalues are known.
pub fn sample_spectra(spec: &EnsembleSpec, trials: usize) -> Result<Vec<SpectralSample>> {
    sample_spectra_with(spec, trials, EigenSolver::default())
}

pub fn sample_spectra_with(
    spec: &EnsembleSpec,
    trials: usize,
    solver: EigenSolver,
) -> Result<Vec<SpectralSample>> {
    spec.validate()?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| eigenvalues_with(&spec.sample(t), solver))
        .collect()
}

/// Pools the eigenvalues of several spectra into one measure, each with
/// weight `1 / (trials n)`.
pub fn pool(spectra: &[SpectralSample]) -> Result<StepMeasure> {
    if spectra.is_empty() {
        return Err(Error::InvalidParameter("no spectra to pool".into()));
    }
    let all: Vec<f64> = spectra
        .iter()
        .flat_map(|s| s.eigenvalues.iter().copied())
        .collect();
    StepMeasure::uniform(&all)
}

/// Pooled estimator of the mean spectral measure over `trials` draws.
pub fn mean_esd(spec: &EnsembleSpec, trials: usize) -> Result<StepMeasure> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    pool(&sample_spectra(spec, trials)?)
}
