//! The n-body problem on surfaces of constant curvature.
//!
//! Bodies live on the sphere (`kappa > 0`) or the upper sheet of the
//! hyperboloid (`kappa < 0`) and attract under the cotangent potential. The
//! crate provides the equations of motion with a projected RK4 integrator,
//! tests for polygonal homographic orbits, and the fixed points of three
//! bodies on a great circle.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod geometry;
pub mod homographic;
pub mod io;
pub mod linalg;

pub use dynamics::{
    acceleration, angular_momentum, conserved, force_function, force_gradient, hamiltonian,
    integrate, step, Body, ConservedQuantities, HaltReason, ReducedState, SystemState, Trajectory,
};
pub use equilibria::{EquatorTriangle, FixedPointSolution, IsoscelesResult};
pub use error::{Error, Result};
pub use geometry::{Curvature, SurfacePoint, Vec3};
pub use homographic::{CriterionReport, MassSolution, PolygonConfig, SignReport};
