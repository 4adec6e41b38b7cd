//! Determinants, spectra and definiteness of symmetric pentadiagonal
//! Toeplitz matrices with perturbed corners, and the MA(1) cumulant
//! generating function built on them. See [`matrix`] for the family.

pub mod cli;
pub mod definiteness;
pub mod determinant;
pub mod error;
pub mod logscalar;
pub mod ma1;
pub mod matrix;
pub mod oracle;
pub mod quadrature;
pub mod rng;
