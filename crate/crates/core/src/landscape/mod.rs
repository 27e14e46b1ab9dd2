//! The landscape function `u = (H^A)^{-1} 1` and the counting function built
//! from its effective potential `1/u`.

mod counting;
mod solve;

pub use counting::{counting_curve_landscape, landscape_counting, LandscapeCounter, RadiusPolicy};
pub use solve::{solve_landscape, uncertainty_identity_residual, LandscapeFunction, SolveMethod, SOLVE_TOL};
