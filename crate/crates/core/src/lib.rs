//! Numerical calculus for Colombeau-type nonlinear generalized functions in one
//! dimension: sampled grids, smoothing test objects, embeddings of
//! distributions, asymptotic quotient checks and the Fourier transform on
//! representatives.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod fourier;
pub mod grid;
pub mod jet;
pub mod mollifier;
pub mod quotient;
pub mod verify;
pub mod workbench;

pub use error::{Error, Result};
pub use workbench::Workbench;
