//! Variance profiles, entry laws, Hermitian sampling and the
//! truncation/centering reduction.

mod law;
mod profile;
mod sample;
mod truncation;

pub use law::{Atom, EntryLaw, LawFamily, SymmetryClass};
pub use profile::{ProfileKind, VarianceProfile};
pub use sample::{EnsembleSpec, Entries, MatrixSample};
pub use truncation::{
    heavy_tail_constant, heavy_tail_scale, threshold_sequence, truncate_center,
    THRESHOLD_GRID_FLOOR,
};
