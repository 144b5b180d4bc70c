//! Spectral statistics of Hermitian Wigner matrices with a variance profile.
//!
//! The crate samples heterogeneous Wigner ensembles, computes their
//! empirical and mean spectral measures, and compares them with the
//! semicircle law. Alongside the simulation it evaluates the row-sum,
//! Lindeberg and margin functionals in closed form, and carries an exact
//! combinatorial moment engine (canonical closed walks, tree-injection sums,
//! Dyck paths) that predicts the moments the simulation should see.
//!
//! | module | contents |
//! |---|---|
//! | [`ensemble`] | profiles, entry laws, sampling, truncation |
//! | [`spectra`] | eigenvalues, empirical and mean spectral measures |
//! | [`metrics`] | semicircle reference, moments, Kolmogorov and Lévy distances |
//! | [`conditions`] | condition functionals for a given ensemble |
//! | [`walks`] | canonical walks, tree sums, moment predictions, Dyck paths |
//! | [`concentration`] | rank/perturbation/Bernstein checks and experiments |
//! | [`gauss`] | row-sum Gaussian convergence |
//! | [`scenario`] | scenario catalog, n-sweeps and result files |
//!
//! Runnable walkthroughs live in `examples/`.

pub mod concentration;
pub mod conditions;
pub mod ensemble;
pub mod error;
pub mod gauss;
pub mod metrics;
pub mod rng;
pub mod scenario;
pub mod spectra;
pub mod walks;

pub use error::{Error, Result};
