//! Fixed points and relative equilibria of three bodies on a great circle of
//! the sphere.
//!
//! With zero velocities, body `i` on the equator feels
//! `sum_j m_j (q_j - a_ij q_i) / (1 - a_ij^2)^{3/2}` (times `kappa^{3/2}`),
//! where `a_ij` is the cosine of the central angle. Writing `q_ij` and
//! `qbar_ij` for the x and y parts of each term, a fixed point needs
//! `sum_j m_j q_ij = 0` and `sum_j m_j qbar_ij = 0` for every body.

use std::f64::consts::{PI, TAU};

use crate::dynamics::{acceleration, Body, SystemState};
use crate::error::{Error, Result};
use crate::geometry::{Curvature, Vec3};

/// Pairs whose central angle is within this of pi are antipodal.
pub const ANTIPODAL_GAP_TOL: f64 = 1e-12;
/// Every arc between neighbours must be below `pi - ACUTE_MARGIN`.
pub const ACUTE_MARGIN: f64 = 1e-9;
/// Relative tolerance for the redundant equations of the fixed-point system.
pub const SYSTEM_RESIDUAL_TOL: f64 = 1e-10;
/// Acceleration residual allowed at a fixed point, relative to the force scale.
pub const ACCEL_RESIDUAL_TOL: f64 = 1e-10;

/// Three bodies on the equator `z = 0` of the sphere of curvature `kappa > 0`.
///
/// Body order is kept as given; angles are reduced to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquatorTriangle {
    curvature: Curvature,
    angles: [f64; 3],
}

impl EquatorTriangle {
    pub fn new(curvature: Curvature, angles: [f64; 3]) -> Result<Self> {
        if !curvature.is_sphere() {
            return Err(Error::NonPositiveCurvature(curvature.kappa()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "angles must be finite, got {angles:?}"
            )));
        }
        let angles = angles.map(|a| a.rem_euclid(TAU));
        for i in 0..3 {
            for j in i + 1..3 {
                let d = (angles[j] - angles[i]).abs();
                let central = d.min(TAU - d);
                if (central - PI).abs() < ANTIPODAL_GAP_TOL {
                    return Err(Error::AntipodalSingularity { i, j });
                }
                if central < ANTIPODAL_GAP_TOL {
                    return Err(Error::CollisionSingularity { i, j });
                }
            }
        }
        let max_gap = arcs(&angles).into_iter().fold(0.0, f64::max);
        if max_gap >= PI - ACUTE_MARGIN {
            return Err(Error::NotAcute { max_gap });
        }
        Ok(Self { curvature, angles })
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn angles(&self) -> [f64; 3] {
        self.angles
    }

    pub fn positions(&self) -> [Vec3; 3] {
        let r = self.curvature.radius();
        self.angles
            .map(|t| Vec3::new(r * t.cos(), r * t.sin(), 0.0))
    }
}

/// The three arcs between cyclically consecutive bodies.
fn arcs(angles: &[f64; 3]) -> [f64; 3] {
    let mut s = *angles;
    s.sort_by(f64::total_cmp);
    [s[1] - s[0], s[2] - s[1], s[0] + TAU - s[2]]
}

/// `a[i][j]`, `q[i][j]`, `q_bar[i][j]`; diagonals are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub a: [[f64; 3]; 3],
    pub q: [[f64; 3]; 3],
    pub q_bar: [[f64; 3]; 3],
}

/// `a_ij = kappa (x_i x_j + y_i y_j)` and
/// `(q_ij, qbar_ij) = ((x_j, y_j) - a_ij (x_i, y_i)) / (1 - a_ij^2)^{3/2}`.
pub fn equator_coefficients(t: &EquatorTriangle) -> Result<CoefficientSet> {
    let k = t.curvature.kappa();
    let p = t.positions();
    let mut out = CoefficientSet {
        a: [[0.0; 3]; 3],
        q: [[0.0; 3]; 3],
        q_bar: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let a = k * (p[i].x * p[j].x + p[i].y * p[j].y);
            if (a.abs() - 1.0).abs() < ANTIPODAL_GAP_TOL {
                return Err(if a > 0.0 {
                    Error::CollisionSingularity { i, j }
                } else {
                    Error::AntipodalSingularity { i, j }
                });
            }
            let w = (1.0 - a) * (1.0 + a);
            let w32 = w * w.sqrt();
            out.a[i][j] = a;
            out.q[i][j] = (p[j].x - a * p[i].x) / w32;
            out.q_bar[i][j] = (p[j].y - a * p[i].y) / w32;
        }
    }
    Ok(out)
}

fn det3(q: &[[f64; 3]; 3]) -> (f64, f64) {
    (q[0][1] * q[1][2] * q[2][0], q[0][2] * q[1][0] * q[2][1])
}

/// `q_12 q_23 q_31 + q_13 q_21 q_32`, the determinant of the x-part system.
pub fn det_a(t: &EquatorTriangle) -> Result<f64> {
    let (p1, p2) = det3(&equator_coefficients(t)?.q);
    Ok(p1 + p2)
}

/// `|det A|` relative to the larger of its two product terms.
pub fn det_a_residual(t: &EquatorTriangle) -> Result<f64> {
    let (p1, p2) = det3(&equator_coefficients(t)?.q);
    let scale = p1.abs().max(p2.abs());
    Ok(if scale == 0.0 {
        0.0
    } else {
        (p1 + p2).abs() / scale
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolution {
    pub triangle: EquatorTriangle,
    /// Normalized so the third mass is 1.
    pub masses: [f64; 3],
    pub det_a_residual: f64,
    /// Relative residual of the equation not used in the solve.
    pub third_row_residual: f64,
    /// Worst relative residual over all six component equations.
    pub system_residual: f64,
    /// Max acceleration norm of the bodies released at rest.
    pub accel_residual: f64,
}

/// Positive masses that make the triangle a fixed point.
///
/// Each body's force is tangent to the circle, so only one of its x/y
/// equations carries information; the better-conditioned one is used (the
/// x-part when `|y_i| >= |x_i|`). The third mass is fixed at 1, the first two
/// equations give the others, and the rest are checked as residuals.
pub fn solve_fixed_point_masses(t: &EquatorTriangle) -> Result<FixedPointSolution> {
    let cs = equator_coefficients(t)?;
    let p = t.positions();
    let rows: [[f64; 3]; 3] = std::array::from_fn(|i| {
        if p[i].y.abs() >= p[i].x.abs() {
            cs.q[i]
        } else {
            cs.q_bar[i]
        }
    });
    let m3 = 1.0;
    let m2 = -rows[0][2] * m3 / rows[0][1];
    let m1 = -rows[1][2] * m3 / rows[1][0];
    let masses = [m1, m2, m3];
    if !masses.iter().all(|m| m.is_finite() && *m > 0.0) {
        return Err(Error::InfeasibleTriangle(masses));
    }

    // Residuals are measured against the total pull on the body, so a row
    // that is identically zero (a body on an axis) does not count as violated.
    let pull: [f64; 3] = std::array::from_fn(|i| {
        (0..3)
            .filter(|&j| j != i)
            .map(|j| masses[j] * cs.q[i][j].hypot(cs.q_bar[i][j]))
            .sum()
    });
    let row_residual = |row: &[f64; 3], i: usize| {
        let sum: f64 = (0..3).filter(|&j| j != i).map(|j| row[j] * masses[j]).sum();
        sum.abs() / pull[i]
    };
    let third_row_residual = row_residual(&rows[2], 2);
    if third_row_residual > SYSTEM_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge {
            what: "third fixed-point equation",
            residual: third_row_residual,
            tol: SYSTEM_RESIDUAL_TOL,
        });
    }
    let system_residual = (0..3)
        .flat_map(|i| [row_residual(&cs.q[i], i), row_residual(&cs.q_bar[i], i)])
        .fold(0.0, f64::max);
    if system_residual > SYSTEM_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge {
            what: "fixed-point system",
            residual: system_residual,
            tol: SYSTEM_RESIDUAL_TOL,
        });
    }

    let state = at_rest(t, &masses)?;
    let accel_residual = acceleration(&state)?
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    let force_scale = pull.iter().fold(0.0f64, |a, &b| a.max(b)) * t.curvature.kappa().powf(1.5);
    if accel_residual > ACCEL_RESIDUAL_TOL * force_scale.max(1.0) {
        return Err(Error::ResidualTooLarge {
            what: "fixed-point acceleration",
            residual: accel_residual,
            tol: ACCEL_RESIDUAL_TOL,
        });
    }

    Ok(FixedPointSolution {
        triangle: *t,
        masses,
        det_a_residual: det_a_residual(t)?,
        third_row_residual,
        system_residual,
        accel_residual,
    })
}

fn at_rest(t: &EquatorTriangle, masses: &[f64; 3]) -> Result<SystemState> {
    let bodies = t
        .positions()
        .iter()
        .zip(masses)
        .map(|(p, &m)| Body::at_rest(m, *p))
        .collect();
    SystemState::new(t.curvature, bodies)
}

/// The fixed point set rotating rigidly: `v_i = speed (-sin theta_i, cos theta_i, 0)`.
pub fn make_relative_equilibrium(f: &FixedPointSolution, speed: f64) -> Result<SystemState> {
    if !speed.is_finite() {
        return Err(Error::InvalidInput(format!(
            "speed must be finite, got {speed}"
        )));
    }
    let t = &f.triangle;
    let bodies = t
        .positions()
        .iter()
        .zip(t.angles)
        .zip(f.masses)
        .map(|((p, th), m)| Body::new(m, *p, Vec3::new(-th.sin(), th.cos(), 0.0) * speed))
        .collect();
    SystemState::new(t.curvature, bodies)
}

#[derive(Debug, Clone, PartialEq)]
pub enum IsoscelesResult {
    /// Base bodies of mass `M` at `(+-x, y, 0)`, apex of mass `m` at
    /// `(0, -kappa^{-1/2}, 0)`. The triangle lists the base bodies first.
    Feasible {
        y: f64,
        x: f64,
        triangle: EquatorTriangle,
    },
    /// `M / m >= 4`.
    Infeasible { ratio: f64 },
}

impl IsoscelesResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

/// Whether an isosceles fixed point with base masses `big_m` and apex mass `m`
/// exists; if so, where it sits (`big_m = 4 kappa m y^2`).
pub fn isosceles_classify(big_m: f64, m: f64, kappa: f64) -> Result<IsoscelesResult> {
    for (name, v) in [("M", big_m), ("m", m), ("kappa", kappa)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let ratio = big_m / m;
    if ratio >= 4.0 {
        return Ok(IsoscelesResult::Infeasible { ratio });
    }
    let y = (big_m / (4.0 * kappa * m)).sqrt();
    let x = (1.0 / kappa - y * y).sqrt();
    let theta = y.atan2(x);
    let triangle = EquatorTriangle::new(Curvature::new(kappa)?, [theta, PI - theta, 1.5 * PI])?;
    Ok(IsoscelesResult::Feasible { y, x, triangle })
}

/// `x'' = -(M - 4 kappa m y^2) / (4 kappa^{1/2} x^2 y)` and
/// `y'' = (M - 4 kappa m y^2) / (4 kappa^{1/2} x y^2)` for the base body at
/// `(x, y, 0)` released at rest.
pub fn isosceles_accelerations(x: f64, y: f64, big_m: f64, m: f64, kappa: f64) -> (f64, f64) {
    let excess = big_m - 4.0 * kappa * m * y * y;
    let ks = kappa.sqrt();
    (
        -excess / (4.0 * ks * x * x * y),
        excess / (4.0 * ks * x * y * y),
    )
}
