//! Eigenvalue counting by inertia, dense reference spectra, and Green's
//! function / Poisson kernel computations on balls.

mod inertia;
mod kernel;
mod ldlt;
mod sparse;

pub use inertia::{count_leq, dense_spectrum, ids_curve, InertiaCounter, InertiaResult, DENSE_LIMIT, PIVOT_TOL};
pub use kernel::{
    ball_green, band1d_kernel_bounds, harmonic_weight_1d, poisson_kernel, BallKernel, HarmonicWeight,
    KernelBoundsReport,
};
pub use ldlt::{BandLdlt, Inertia};
pub use sparse::SparseSymmetric;
