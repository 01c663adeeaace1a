//! Compatibility analysis for three bodies off the equator.
//!
//! With `Delta = [[0,a,b],[a,0,c],[b,c,0]]` and
//! `Gamma = [[0,u,v],[-u,0,w],[-v,-w,0]]`, antisymmetry forces `gamma = 0`,
//! so positive masses must span the kernel of `Gamma`, the ray through
//! `(w, -v, u)`. That needs the sign pattern `u, w > 0 > v` (or the reverse),
//! and `Delta (w, -v, u)` must have equal entries, which gives the three
//! cross-multiplied ratio conditions
//!
//! ```text
//! (a - c) v = b (u - w)
//! (b - a) w = c (u + v)
//! (c - b) u = -a (v + w)
//! ```
//!
//! Any two of them imply the third.

use super::criterion::build_matrices;
use super::polygon::PolygonConfig;
use crate::error::{Error, Result};

/// Relative tolerance on each ratio condition.
pub const RATIO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignBranch {
    /// `u, w > 0` and `v < 0`.
    PositiveOuter,
    /// `u, w < 0` and `v > 0`.
    NegativeOuter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub sign_branch: Option<SignBranch>,
    /// Normalized residuals of the three ratio conditions.
    pub ratio_residuals: [f64; 3],
    pub ratios_hold: bool,
    /// Both the sign pattern and the ratio conditions hold.
    pub orbit_possible: bool,
}

impl SignReport {
    /// Candidate masses on the kernel of `Gamma`, oriented positive when possible.
    pub fn kernel_direction(&self) -> [f64; 3] {
        let k = [self.w, -self.v, self.u];
        if self.u < 0.0 {
            k.map(|x| -x)
        } else {
            k
        }
    }
}

fn residual(lhs: f64, rhs: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

pub fn triangle_sign_test(p: &PolygonConfig) -> Result<SignReport> {
    if p.len() != 3 {
        return Err(Error::InvalidPolygon(format!(
            "sign test needs 3 vertices, got {}",
            p.len()
        )));
    }
    p.require_off_equator()?;
    let (d, g) = build_matrices(p)?;
    let (a, b, c) = (d[(0, 1)], d[(0, 2)], d[(1, 2)]);
    let (u, v, w) = (g[(0, 1)], g[(0, 2)], g[(1, 2)]);

    let sign_branch = if u > 0.0 && w > 0.0 && v < 0.0 {
        Some(SignBranch::PositiveOuter)
    } else if u < 0.0 && w < 0.0 && v > 0.0 {
        Some(SignBranch::NegativeOuter)
    } else {
        None
    };

    let ratio_residuals = [
        residual(
            (a - c) * v,
            b * (u - w),
            (a * v).abs() + (c * v).abs() + (b * u).abs() + (b * w).abs(),
        ),
        residual(
            (b - a) * w,
            c * (u + v),
            (b * w).abs() + (a * w).abs() + (c * u).abs() + (c * v).abs(),
        ),
        residual(
            (c - b) * u,
            -a * (v + w),
            (c * u).abs() + (b * u).abs() + (a * v).abs() + (a * w).abs(),
        ),
    ];
    let ratios_hold = ratio_residuals.iter().all(|&r| r <= RATIO_TOL);
    Ok(SignReport {
        a,
        b,
        c,
        u,
        v,
        w,
        sign_branch,
        ratio_residuals,
        ratios_hold,
        orbit_possible: sign_branch.is_some() && ratios_hold,
    })
}
