//! Sharp spectral bounds on resolvent norms of non-normal matrices.
//!
//! The library computes `sup`-norm bounds on `(zI - A)^-1` for Hilbert-space
//! contractions and power-bounded matrices from spectral data alone, together
//! with the dense linear-algebra oracles (eigenvalues, singular values, direct
//! inverses) that cross-check every closed form.

pub mod blaschke;
pub mod bounds;
pub mod error;
pub mod io;
pub mod linalg;
pub mod markov;
pub mod matrix;
pub mod model;
pub mod sampling;
pub mod toeplitz;
pub mod verify;

pub use blaschke::{SmoothedInterpolant, Spectrum};
pub use error::{Error, ParseError, Result};
pub use matrix::ComplexMatrix;
