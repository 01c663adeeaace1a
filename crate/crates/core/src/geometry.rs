//! Primitives on the surfaces `kappa (x^2 + y^2 + sigma z^2) = 1`.
//!
//! For `kappa > 0` the surface is a sphere of radius `kappa^{-1/2}`; for
//! `kappa < 0` it is the upper sheet of a two-sheeted hyperboloid (Weierstrass
//! model). Every quantity here uses the sigma-signed bilinear form, so the two
//! cases share one code path.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Ambient coordinates in R^3 (or R^{2,1} when `kappa < 0`).
pub type Vec3 = Vector3<f64>;

/// Relative tolerance for membership on the surface.
pub const SURFACE_TOL: f64 = 1e-12;
/// Absolute tolerance for tangency of a velocity.
pub const TANGENCY_TOL: f64 = 1e-14;

/// Returns `+1` for positive curvature and `-1` for negative curvature.
pub fn signum(kappa: f64) -> Result<i32> {
    if kappa > 0.0 {
        Ok(1)
    } else if kappa < 0.0 {
        Ok(-1)
    } else {
        Err(Error::InvalidCurvature(kappa))
    }
}

/// Nonzero curvature together with its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature {
    kappa: f64,
    sigma: f64,
}

impl Curvature {
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidCurvature(kappa));
        }
        let sigma = f64::from(signum(kappa)?);
        Ok(Self { kappa, sigma })
    }

    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The sign of kappa as a float, ready for arithmetic.
    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn is_sphere(&self) -> bool {
        self.kappa > 0.0
    }

    /// `|kappa|^{-1/2}`: the sphere radius, or the hyperboloid's apex height.
    #[inline]
    pub fn radius(&self) -> f64 {
        self.kappa.abs().sqrt().recip()
    }
}

/// `a_x b_x + a_y b_y + sigma a_z b_z`.
#[inline]
pub fn inner(a: &Vec3, b: &Vec3, c: Curvature) -> f64 {
    a.x * b.x + a.y * b.y + c.sigma * a.z * b.z
}

/// The sigma-signed cross product.
#[inline]
pub fn cross(a: &Vec3, b: &Vec3, c: Curvature) -> Vec3 {
    Vec3::new(
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        c.sigma * (a.x * b.y - a.y * b.x),
    )
}

/// True iff `|kappa <p,p> - 1| <= tol`.
#[inline]
pub fn on_surface(p: &Vec3, c: Curvature, tol: f64) -> bool {
    (c.kappa * inner(p, p, c) - 1.0).abs() <= tol
}

/// Removes the component of `v` along the surface normal at `q`.
///
/// `q` must already lie on the surface.
#[inline]
pub fn tangent_project(q: &SurfacePoint, v: &Vec3) -> Vec3 {
    let c = q.curvature;
    v - q.coords * (c.kappa * inner(&q.coords, v, c))
}

/// `kappa <q_i, q_j>`; the cosine of the central angle when `kappa > 0`,
/// the hyperbolic cosine of the geodesic distance when `kappa < 0`.
#[inline]
pub fn pair_cosine(qi: &SurfacePoint, qj: &SurfacePoint) -> f64 {
    let c = qi.curvature;
    c.kappa * inner(&qi.coords, &qj.coords, c)
}

/// Scales `p` back onto the surface along the ray through the origin.
///
/// Fails when `kappa <p,p> <= 0`, i.e. the point has left the cone over the
/// hyperboloid, or when a hyperbolic point falls to the lower sheet.
pub fn renormalize(p: &Vec3, c: Curvature) -> Result<Vec3> {
    let s = c.kappa * inner(p, p, c);
    if !(s > 0.0) || !s.is_finite() {
        return Err(off_surface(p, c));
    }
    let out = p / s.sqrt();
    if !c.is_sphere() && out.z <= 0.0 {
        return Err(off_surface(p, c));
    }
    Ok(out)
}

fn off_surface(p: &Vec3, c: Curvature) -> Error {
    Error::OffSurface {
        x: p.x,
        y: p.y,
        z: p.z,
        kappa: c.kappa,
    }
}

/// A point known to lie on `M^2_kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub coords: Vec3,
    pub curvature: Curvature,
}

impl SurfacePoint {
    /// Validates membership to [`SURFACE_TOL`] and, for `kappa < 0`, the upper sheet.
    pub fn new(coords: Vec3, curvature: Curvature) -> Result<Self> {
        let upper = curvature.is_sphere() || coords.z > 0.0;
        if !coords.iter().all(|v| v.is_finite())
            || !upper
            || !on_surface(&coords, curvature, SURFACE_TOL)
        {
            return Err(off_surface(&coords, curvature));
        }
        Ok(Self { coords, curvature })
    }

    /// Projects an arbitrary point onto the surface first.
    pub fn from_ray(coords: &Vec3, curvature: Curvature) -> Result<Self> {
        Ok(Self {
            coords: renormalize(coords, curvature)?,
            curvature,
        })
    }

    /// Point at geodesic polar coordinates around the pole `(0, 0, |kappa|^{-1/2})`.
    pub fn from_polar(curvature: Curvature, rho: f64, phi: f64) -> Self {
        let r0 = curvature.radius();
        let (radial, height) = if curvature.is_sphere() {
            (rho.sin(), rho.cos())
        } else {
            (rho.sinh(), rho.cosh())
        };
        Self {
            coords: Vec3::new(
                r0 * radial * phi.cos(),
                r0 * radial * phi.sin(),
                r0 * height,
            ),
            curvature,
        }
    }
}
