//! Polygonal homographic orbits: configurations whose shape stays similar to
//! itself while rotating about and sliding along the z-axis.

pub mod criterion;
pub mod polygon;
pub mod triangle;

pub use criterion::{
    build_matrices, check_criterion, check_criterion_grid, default_r_grid, delta_gamma, kernels,
    reduced_coefficients, solve_masses, solve_masses_with_tol, CriterionReport, KernelPair,
    MassSolution,
};
pub use polygon::{embed, embed_state, regular_angles, PolygonConfig};
pub use triangle::{triangle_sign_test, SignBranch, SignReport};
