//! Disorder sampling and assembly of the restricted Jacobi operator `H^A`.

mod disorder;
mod jacobi;

pub use disorder::{sample_disorder, Disorder, DisorderConfig, MuDist, VDist};
pub use jacobi::{assemble, BoundaryMode, JacobiOperator};
