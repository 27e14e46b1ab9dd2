//! Integrated density of states and localization-landscape counting for
//! disordered Jacobi operators on graphs.

// `!(x > 0.0)` is used on purpose so NaN is rejected too; index loops read
// closer to the algebra in the factorization kernels
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod curve;
pub mod error;
pub mod graph;
pub mod landscape;
pub mod numeric;
pub mod operator;
pub mod pipeline;
pub mod spectral;
pub mod zoo;

pub use error::{Error, Result};
