use std::f64::consts::TAU;

use crate::dynamics::{Body, SystemState};
use crate::error::{Error, Result};
use crate::geometry::{Curvature, SurfacePoint, Vec3};

/// Minimum angular separation between two vertices.
pub const ANGLE_SEPARATION_TOL: f64 = 1e-12;
/// `|1 - kappa r^2|` below this puts the polygon on the equator.
pub const EQUATOR_TOL: f64 = 1e-12;

/// A polygon orthogonal to the z-axis, inscribed in the circle of xy-radius
/// `r` at common height `z`, with vertex `i` at phase `omega + alpha_i`.
///
/// Phases are reduced mod 2pi and sorted on construction. Per-body data such
/// as masses must be supplied in that sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonConfig {
    curvature: Curvature,
    r: f64,
    omega: f64,
    alphas: Vec<f64>,
    hemisphere: i32,
}

impl PolygonConfig {
    pub fn new(
        curvature: Curvature,
        r: f64,
        omega: f64,
        alphas: &[f64],
        hemisphere: i32,
    ) -> Result<Self> {
        if alphas.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                alphas.len()
            )));
        }
        if !(r > 0.0) || !r.is_finite() || !omega.is_finite() {
            return Err(Error::InvalidPolygon(format!(
                "bad size/phase r={r}, omega={omega}"
            )));
        }
        if hemisphere != 1 && hemisphere != -1 {
            return Err(Error::InvalidPolygon(format!(
                "hemisphere must be +1 or -1, got {hemisphere}"
            )));
        }
        if !curvature.is_sphere() && hemisphere != 1 {
            return Err(Error::InvalidPolygon(
                "the hyperboloid has only the upper sheet".into(),
            ));
        }
        let kr2 = curvature.kappa() * r * r;
        if kr2 > 1.0 + EQUATOR_TOL {
            return Err(Error::InvalidPolygon(format!(
                "kappa r^2 = {kr2} exceeds 1: circle does not fit on the sphere"
            )));
        }

        let mut sorted = Vec::with_capacity(alphas.len());
        for &a in alphas {
            if !a.is_finite() {
                return Err(Error::InvalidPolygon(format!("angle {a} is not finite")));
            }
            sorted.push(a.rem_euclid(TAU));
        }
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        for k in 0..n {
            let gap = if k + 1 < n {
                sorted[k + 1] - sorted[k]
            } else {
                sorted[0] + TAU - sorted[k]
            };
            if gap < ANGLE_SEPARATION_TOL {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {} and {} coincide",
                    k + 1,
                    (k + 1) % n + 1
                )));
            }
        }

        let p = Self {
            curvature,
            r,
            omega,
            alphas: sorted,
            hemisphere,
        };
        if p.is_equatorial() {
            for i in 0..n {
                for j in i + 1..n {
                    if ((p.alphas[j] - p.alphas[i]) - std::f64::consts::PI).abs()
                        < ANGLE_SEPARATION_TOL
                    {
                        return Err(Error::InvalidPolygon(format!(
                            "vertices {} and {} are antipodal on the equator",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(p)
    }

    /// Regular n-gon with phases `2 pi k / n`.
    pub fn regular(
        curvature: Curvature,
        n: usize,
        r: f64,
        omega: f64,
        hemisphere: i32,
    ) -> Result<Self> {
        Self::new(curvature, r, omega, &regular_angles(n), hemisphere)
    }

    /// Same shape at a different size.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(self.curvature, r, self.omega, &self.alphas, self.hemisphere)
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn hemisphere(&self) -> i32 {
        self.hemisphere
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `1 - kappa r^2`, the factor that vanishes on the equator.
    pub fn equator_factor(&self) -> f64 {
        1.0 - self.curvature.kappa() * self.r * self.r
    }

    pub fn is_equatorial(&self) -> bool {
        self.equator_factor().abs() <= EQUATOR_TOL
    }

    /// Signed common height `z`, from `z^2 = sigma/kappa - sigma r^2`.
    pub fn height(&self) -> f64 {
        if self.is_equatorial() {
            return 0.0;
        }
        let z2 = self.equator_factor() / self.curvature.kappa().abs();
        f64::from(self.hemisphere) * z2.sqrt()
    }

    pub(crate) fn require_off_equator(&self) -> Result<()> {
        if self.is_equatorial() {
            Err(Error::EquatorSingularity(self.equator_factor()))
        } else {
            Ok(())
        }
    }
}

/// `[0, 2pi/n, ..., 2pi (n-1)/n]`.
pub fn regular_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Vertex positions of the polygon.
pub fn embed(p: &PolygonConfig) -> Vec<SurfacePoint> {
    let z = p.height();
    p.alphas
        .iter()
        .map(|a| {
            let phase = p.omega + a;
            SurfacePoint {
                coords: Vec3::new(p.r * phase.cos(), p.r * phase.sin(), z),
                curvature: p.curvature,
            }
        })
        .collect()
}

/// Full state of a polygon moving with size rate `r_dot` and angular rate
/// `omega_dot`; velocities follow from differentiating the representation.
pub fn embed_state(
    p: &PolygonConfig,
    masses: &[f64],
    r_dot: f64,
    omega_dot: f64,
) -> Result<SystemState> {
    if masses.len() != p.len() {
        return Err(Error::InvalidInput(format!(
            "{} masses for {} vertices",
            masses.len(),
            p.len()
        )));
    }
    let z = p.height();
    if z == 0.0 && r_dot != 0.0 {
        return Err(Error::EquatorSingularity(p.equator_factor()));
    }
    let z_dot = if z == 0.0 {
        0.0
    } else {
        -p.curvature.sigma() * p.r * r_dot / z
    };
    let bodies = embed(p)
        .into_iter()
        .zip(p.alphas.iter())
        .zip(masses)
        .map(|((pt, a), &m)| {
            let (sn, cs) = (p.omega + a).sin_cos();
            let v = Vec3::new(
                r_dot * cs - p.r * omega_dot * sn,
                r_dot * sn + p.r * omega_dot * cs,
                z_dot,
            );
            Body::new(m, pt.coords, v)
        })
        .collect();
    SystemState::new(p.curvature, bodies)
}
