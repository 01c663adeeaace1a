//! Equations of motion under the cotangent potential.
//!
//! The state stores velocities; momenta `p_i = m_i q'_i` only appear in the
//! energy and angular-momentum integrals.

mod integrator;
mod reduced;

pub use integrator::{integrate, step, HaltReason, Sample, Trajectory, BLOWUP_LIMIT};
pub use reduced::{
    embed_reduced, integrate_reduced, reduced_rhs, ReducedSample, ReducedState, REDUCED_SPREAD_TOL,
};

use crate::error::{Error, Result};
use crate::geometry::{cross, inner, Curvature, SurfacePoint, Vec3, SURFACE_TOL};

/// Pairs with `|kappa <q_i,q_j> - 1|` below this are treated as collisions.
pub const COLLISION_GUARD: f64 = 1e-12;
/// On the sphere, pairs with `kappa <q_i,q_j> < -1 + ANTIPODAL_GUARD` are antipodal.
pub const ANTIPODAL_GUARD: f64 = 1e-12;
/// Tangency tolerance for a body's velocity, `|kappa <q, q'>|`.
pub const BODY_TANGENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Body {
    pub mass: f64,
    pub position: Vec3,
    pub velocity: Vec3,
}

impl Body {
    pub fn new(mass: f64, position: Vec3, velocity: Vec3) -> Self {
        Self {
            mass,
            position,
            velocity,
        }
    }

    pub fn at_rest(mass: f64, position: Vec3) -> Self {
        Self::new(mass, position, Vec3::zeros())
    }
}

/// Positions, velocities and masses of n bodies on one surface.
///
/// Fields are public so tests and finite-difference probes can perturb a
/// state; [`SystemState::new`] and [`SystemState::validate`] enforce the
/// invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub curvature: Curvature,
    pub bodies: Vec<Body>,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedQuantities {
    pub energy: f64,
    pub angular_momentum: Vec3,
}

impl SystemState {
    pub fn new(curvature: Curvature, bodies: Vec<Body>) -> Result<Self> {
        let s = Self {
            curvature,
            bodies,
            time: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.bodies.iter().map(|b| b.mass).collect()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.bodies.iter().map(|b| b.position).collect()
    }

    pub fn velocities(&self) -> Vec<Vec3> {
        self.bodies.iter().map(|b| b.velocity).collect()
    }

    pub fn point(&self, i: usize) -> SurfacePoint {
        SurfacePoint {
            coords: self.bodies[i].position,
            curvature: self.curvature,
        }
    }

    /// `kappa <q_i, q_j>`.
    pub fn pair_cosine(&self, i: usize, j: usize) -> f64 {
        let c = self.curvature;
        c.kappa() * inner(&self.bodies[i].position, &self.bodies[j].position, c)
    }

    /// All `kappa <q_i, q_j>` for `i < j`, row-major.
    pub fn pair_cosines(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.pair_cosine(i, j));
            }
        }
        out
    }

    /// Checks masses, surface membership, tangency and the singularity guards.
    pub fn validate(&self) -> Result<()> {
        if self.bodies.is_empty() {
            return Err(Error::InvalidInput(
                "a system needs at least one body".into(),
            ));
        }
        let c = self.curvature;
        for (i, b) in self.bodies.iter().enumerate() {
            if !(b.mass > 0.0) || !b.mass.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "mass of body {} must be positive, got {}",
                    i + 1,
                    b.mass
                )));
            }
            SurfacePoint::new(b.position, c)?;
            if !b.velocity.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "velocity of body {} is not finite",
                    i + 1
                )));
            }
            let tangency = (c.kappa() * inner(&b.position, &b.velocity, c)).abs();
            if tangency > BODY_TANGENCY_TOL {
                return Err(Error::InvalidInput(format!(
                    "velocity of body {} is not tangent (|kappa q.v| = {tangency:e})",
                    i + 1
                )));
            }
        }
        check_pairs(c, &self.positions())
    }
}

/// Collision and antipodal guards on raw positions.
pub(crate) fn check_pairs(c: Curvature, q: &[Vec3]) -> Result<()> {
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            classify_pair(c, c.kappa() * inner(&q[i], &q[j], c), i, j)?;
        }
    }
    Ok(())
}

#[inline]
fn classify_pair(c: Curvature, a: f64, i: usize, j: usize) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::NumericalBlowup(a));
    }
    if (a - 1.0).abs() < COLLISION_GUARD {
        return Err(Error::CollisionSingularity { i, j });
    }
    if c.is_sphere() && a < -1.0 + ANTIPODAL_GUARD {
        return Err(Error::AntipodalSingularity { i, j });
    }
    Ok(())
}

// Error for a nonpositive Gram-type denominator.
fn degenerate_pair(c: Curvature, a: f64, i: usize, j: usize) -> Error {
    if c.is_sphere() && a < 0.0 {
        Error::AntipodalSingularity { i, j }
    } else {
        Error::CollisionSingularity { i, j }
    }
}

/// The force function `U_kappa`, with `-U` the potential energy.
///
/// Uses the homogeneous form that stays meaningful slightly off the surface,
/// so it can be differentiated numerically.
pub fn force_function(s: &SystemState) -> Result<f64> {
    let c = s.curvature;
    let q = s.positions();
    let norms: Vec<f64> = q.iter().map(|p| c.kappa() * inner(p, p, c)).collect();
    let scale = c.kappa().abs().sqrt();
    let mut u = 0.0;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let a = c.kappa() * inner(&q[i], &q[j], c);
            let den = c.sigma() * (norms[i] * norms[j] - a * a);
            if !(den > 0.0) {
                return Err(degenerate_pair(c, a, i, j));
            }
            u += s.bodies[i].mass * s.bodies[j].mass * scale * a / den.sqrt();
        }
    }
    Ok(u)
}

/// Gradient of `U_kappa` with respect to `q_i`, expressed so that the
/// directional derivative along `v` is `inner(grad, v)`.
pub fn force_gradient(i: usize, s: &SystemState) -> Result<Vec3> {
    let c = s.curvature;
    let bi = &s.bodies[i];
    let ni = c.kappa() * inner(&bi.position, &bi.position, c);
    let scale = c.kappa().abs().powf(1.5);
    let mut g = Vec3::zeros();
    for (j, bj) in s.bodies.iter().enumerate() {
        if j == i {
            continue;
        }
        let nj = c.kappa() * inner(&bj.position, &bj.position, c);
        let a = c.kappa() * inner(&bi.position, &bj.position, c);
        let den = c.sigma() * (ni * nj - a * a);
        if !(den > 0.0) {
            return Err(degenerate_pair(c, a, i, j));
        }
        let w = bi.mass * bj.mass * scale * nj / (den * den.sqrt());
        g += (bj.position * ni - bi.position * a) * w;
    }
    Ok(g)
}

/// Accelerations from raw arrays; shared by [`acceleration`] and the integrator.
pub(crate) fn accelerations_into(
    c: Curvature,
    masses: &[f64],
    q: &[Vec3],
    v: &[Vec3],
    out: &mut [Vec3],
) -> Result<()> {
    let n = q.len();
    let scale = c.kappa().abs().powf(1.5);
    for o in out.iter_mut() {
        *o = Vec3::zeros();
    }
    for i in 0..n {
        for j in i + 1..n {
            let a = c.kappa() * inner(&q[i], &q[j], c);
            classify_pair(c, a, i, j)?;
            // sigma (1 - a^2), factored to keep precision near collisions
            let d = c.sigma() * (1.0 - a) * (1.0 + a);
            let f = scale / (d * d.sqrt());
            out[i] += (q[j] - q[i] * a) * (masses[j] * f);
            out[j] += (q[i] - q[j] * a) * (masses[i] * f);
        }
    }
    for i in 0..n {
        out[i] -= q[i] * (c.kappa() * inner(&v[i], &v[i], c));
    }
    Ok(())
}

/// Second derivatives `q''_i` for every body.
pub fn acceleration(s: &SystemState) -> Result<Vec<Vec3>> {
    let mut out = vec![Vec3::zeros(); s.len()];
    accelerations_into(
        s.curvature,
        &s.masses(),
        &s.positions(),
        &s.velocities(),
        &mut out,
    )?;
    Ok(out)
}

/// Kinetic energy minus the force function.
pub fn hamiltonian(s: &SystemState) -> Result<f64> {
    let c = s.curvature;
    let kinetic: f64 = s
        .bodies
        .iter()
        .map(|b| {
            0.5 * b.mass
                * inner(&b.velocity, &b.velocity, c)
                * (c.kappa() * inner(&b.position, &b.position, c))
        })
        .sum();
    Ok(kinetic - force_function(s)?)
}

/// `sum_i m_i q_i (x) q'_i` with the sigma-signed cross product.
pub fn angular_momentum(s: &SystemState) -> Vec3 {
    let c = s.curvature;
    s.bodies
        .iter()
        .map(|b| cross(&b.position, &b.velocity, c) * b.mass)
        .sum()
}

pub fn conserved(s: &SystemState) -> Result<ConservedQuantities> {
    Ok(ConservedQuantities {
        energy: hamiltonian(s)?,
        angular_momentum: angular_momentum(s),
    })
}

/// Largest `|kappa <q,q> - 1|` and `|kappa <q,q'>|` over the bodies.
pub fn constraint_violation(s: &SystemState) -> (f64, f64) {
    let c = s.curvature;
    s.bodies.iter().fold((0.0f64, 0.0f64), |(sv, tv), b| {
        let on = (c.kappa() * inner(&b.position, &b.position, c) - 1.0).abs();
        let tan = (c.kappa() * inner(&b.position, &b.velocity, c)).abs();
        (sv.max(on), tv.max(tan))
    })
}

/// True when every body lies on the surface to [`SURFACE_TOL`].
pub fn on_surface(s: &SystemState) -> bool {
    constraint_violation(s).0 <= SURFACE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn sphere() -> Curvature {
        Curvature::new(1.0).unwrap()
    }

    fn two_at_angle(theta: f64, m: f64) -> SystemState {
        SystemState::new(
            sphere(),
            vec![
                Body::at_rest(m, Vec3::x()),
                Body::at_rest(m, Vec3::new(theta.cos(), theta.sin(), 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn force_function_vanishes_at_right_angle() {
        assert_abs_diff_eq!(
            force_function(&two_at_angle(FRAC_PI_2, 1.0)).unwrap(),
            0.0,
            epsilon = 1e-16
        );
    }

    #[test]
    fn force_function_is_cotangent_of_central_angle() {
        let u = force_function(&two_at_angle(FRAC_PI_3, 1.0)).unwrap();
        assert_abs_diff_eq!(u, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        let u2 = force_function(&two_at_angle(FRAC_PI_3, 2.0)).unwrap();
        assert_abs_diff_eq!(u2, 4.0 * u, epsilon = 1e-15);
    }

    #[test]
    fn gradient_at_right_angle_points_along_partner() {
        let s = two_at_angle(FRAC_PI_2, 1.0);
        let g = force_gradient(0, &s).unwrap();
        assert_abs_diff_eq!(g.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.z, 0.0, epsilon = 1e-15);
        assert!(g.y > 0.0);
    }

    #[test]
    fn gradient_of_lonely_body_is_zero() {
        let s = SystemState::new(sphere(), vec![Body::at_rest(1.0, Vec3::z())]).unwrap();
        assert_eq!(force_gradient(0, &s).unwrap(), Vec3::zeros());
    }

    #[test]
    fn lonely_body_accelerates_centripetally() {
        let v = Vec3::new(0.3, -0.4, 0.0);
        let s = SystemState::new(sphere(), vec![Body::new(2.0, Vec3::z(), v)]).unwrap();
        let a = acceleration(&s).unwrap();
        assert_eq!(a[0], -Vec3::z() * v.dot(&v));
    }

    #[test]
    fn acceleration_respects_differentiated_constraint() {
        for &kv in &[1.0, -1.0, 2.5] {
            let c = Curvature::new(kv).unwrap();
            let p0 = SurfacePoint::from_polar(c, 0.4, 0.1);
            let p1 = SurfacePoint::from_polar(c, 0.9, 2.0);
            let p2 = SurfacePoint::from_polar(c, 0.6, 4.0);
            let v = |p: &SurfacePoint, w: Vec3| crate::geometry::tangent_project(p, &w);
            let s = SystemState::new(
                c,
                vec![
                    Body::new(1.0, p0.coords, v(&p0, Vec3::new(0.2, 0.1, 0.3))),
                    Body::new(2.0, p1.coords, v(&p1, Vec3::new(-0.1, 0.4, 0.0))),
                    Body::new(0.5, p2.coords, v(&p2, Vec3::new(0.0, -0.3, 0.2))),
                ],
            )
            .unwrap();
            let acc = acceleration(&s).unwrap();
            for (b, a) in s.bodies.iter().zip(&acc) {
                let lhs = kv * inner(&b.position, a, c);
                let rhs = -kv * inner(&b.velocity, &b.velocity, c);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let s = two_at_angle(FRAC_PI_3, 1.0);
        assert_eq!(hamiltonian(&s).unwrap(), -force_function(&s).unwrap());
        let one = SystemState::new(sphere(), vec![Body::new(1.0, Vec3::z(), Vec3::x())]).unwrap();
        assert_eq!(hamiltonian(&one).unwrap(), 0.5);
    }

    #[test]
    fn angular_momentum_examples() {
        assert_eq!(angular_momentum(&two_at_angle(1.0, 1.0)), Vec3::zeros());
        let s = SystemState::new(
            sphere(),
            vec![Body::new(1.0, Vec3::x(), Vec3::new(0.0, 0.7, 0.0))],
        )
        .unwrap();
        assert_eq!(angular_momentum(&s), Vec3::new(0.0, 0.0, 0.7));
    }

    #[test]
    fn singular_states_are_rejected() {
        let c = sphere();
        let coll = SystemState::new(
            c,
            vec![Body::at_rest(1.0, Vec3::x()), Body::at_rest(1.0, Vec3::x())],
        );
        assert_eq!(
            coll.unwrap_err(),
            Error::CollisionSingularity { i: 0, j: 1 }
        );
        let anti = SystemState::new(
            c,
            vec![
                Body::at_rest(1.0, Vec3::x()),
                Body::at_rest(1.0, -Vec3::x()),
            ],
        );
        assert_eq!(
            anti.unwrap_err(),
            Error::AntipodalSingularity { i: 0, j: 1 }
        );
        let h = Curvature::new(-1.0).unwrap();
        let coll_h = SystemState::new(
            h,
            vec![Body::at_rest(1.0, Vec3::z()), Body::at_rest(1.0, Vec3::z())],
        );
        assert_eq!(
            coll_h.unwrap_err(),
            Error::CollisionSingularity { i: 0, j: 1 }
        );
    }

    #[test]
    fn invalid_bodies_are_rejected() {
        let c = sphere();
        assert!(SystemState::new(c, vec![Body::at_rest(0.0, Vec3::z())]).is_err());
        assert!(SystemState::new(c, vec![Body::new(1.0, Vec3::z(), Vec3::z())]).is_err());
        assert!(SystemState::new(c, vec![]).is_err());
    }
}
