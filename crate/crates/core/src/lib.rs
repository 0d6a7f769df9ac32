//! Semi-supervised nonnegative matrix factorization.
//!
//! Jointly factors a data matrix `X ≈ AS` and a label matrix `Y ≈ BS` through
//! a shared representation `S`, with each fit measured by either the squared
//! Frobenius norm or the generalized I-divergence. The crate also carries the
//! pieces needed around the solver: classification on top of a fitted model,
//! synthetic maximum-likelihood experiments, text preprocessing into TF-IDF
//! matrices, and topic-alignment scoring.

pub mod classify;
pub mod divergence;
pub mod error;
pub mod evalcluster;
pub mod io;
pub mod matrix;
pub mod rng;
pub mod solver;
pub mod synth;
pub mod textprep;

pub use divergence::{ErrorFunction, ModelVariant, ObjectiveSpec};
pub use error::{Result, SsnmfError};
pub use matrix::{DenseMatrix, Shape};
pub use solver::{fit, mu_step, FactorState, FitResult, SsnmfConfig};
