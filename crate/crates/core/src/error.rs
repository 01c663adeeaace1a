use thiserror::Error;

/// Errors raised by the geometry, dynamics, criterion and equilibrium routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid curvature {0}: the problem is only defined for kappa != 0")]
    InvalidCurvature(f64),

    #[error("point ({x}, {y}, {z}) is not on the surface of curvature {kappa}")]
    OffSurface { x: f64, y: f64, z: f64, kappa: f64 },

    #[error("collision singularity between bodies {i} and {j}")]
    CollisionSingularity { i: usize, j: usize },

    #[error("antipodal singularity between bodies {i} and {j}")]
    AntipodalSingularity { i: usize, j: usize },

    #[error("configuration lies on the equator (1 - kappa r^2 = {0:e})")]
    EquatorSingularity(f64),

    #[error("criterion violated: {quantity} spread {spread:e} exceeds {tol:e}")]
    CriterionViolation {
        quantity: &'static str,
        spread: f64,
        tol: f64,
    },

    #[error("numerical blow-up: coordinate magnitude {0:e}")]
    NumericalBlowup(f64),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("singular matrix in linear solve")]
    SingularMatrix,

    #[error("triangle is not acute: largest arc {max_gap} >= pi")]
    NotAcute { max_gap: f64 },

    #[error("triangle admits no positive fixed-point masses: {0:?}")]
    InfeasibleTriangle([f64; 3]),

    #[error("{what} residual {residual:e} exceeds {tol:e}")]
    ResidualTooLarge {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("fixed points on a great circle require kappa > 0, got {0}")]
    NonPositiveCurvature(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for the collision, antipodal, equator and blow-up classes.
    pub fn is_singularity(&self) -> bool {
        matches!(
            self,
            Error::CollisionSingularity { .. }
                | Error::AntipodalSingularity { .. }
                | Error::EquatorSingularity(_)
                | Error::NumericalBlowup(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
