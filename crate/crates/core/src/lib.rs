//! Circulant-type, Toeplitz and Hankel random matrices: construction,
//! spectra, finite-n trace moments, and limiting *-moments evaluated through
//! pair-partition combinatorics.

pub mod dense;
pub mod ensembles;
pub mod error;
pub mod esd;
pub mod limits;
pub mod operator;
pub mod partitions;
pub mod rng;
pub mod spectra;
pub mod verify;
pub mod word;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
