//! Column-subset approximation of a data matrix, from two directions.
//!
//! * [`cursampler`] draws columns at random with probabilities given by the
//!   normalized statistical leverage scores of the top-`k` right singular
//!   subspace (randomized CUR, column side only).
//! * [`glsolver`] solves the deterministic convex counterparts: group-lasso
//!   self-regression (GL-REG) and group-lasso sparse PCA (GL-SPCA), both with a
//!   row-grouped penalty so whole columns of `X` drop out of the model.
//! * [`matcore`] provides the SVD contract and the two reconstruction errors
//!   the methods are judged by.
//! * [`synthbench`] generates the synthetic signal-plus-noise benchmarks and
//!   aggregates reconstruction error and zero-identification precision over
//!   seeded trials.
//!
//! Column indices are 0-based everywhere.

pub mod cursampler;
pub mod error;
pub mod glsolver;
pub mod matcore;
pub mod synthbench;

pub use error::{Error, Result};
pub use matcore::{ColumnIndexSet, DenseMatrix, SvdFactors};
