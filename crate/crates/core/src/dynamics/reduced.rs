//! Size/angle equations for polygonal homographic motion.
//!
//! A polygon `q_i = (r cos(omega + alpha_i), r sin(omega + alpha_i), z)` moves
//! under the full equations exactly when
//!
//! ```text
//! r'' = r (1 - kappa r^2) omega'^2 - kappa r r'^2 / (1 - kappa r^2) - Delta
//! r omega'' + 2 r' omega' = Gamma
//! ```
//!
//! with `Delta` and `Gamma` shared by every vertex.

use super::SystemState;
use crate::error::{Error, Result};
use crate::geometry::Curvature;
use crate::homographic::criterion::{reduced_coefficients, spread};
use crate::homographic::polygon::{embed_state, PolygonConfig, EQUATOR_TOL};

/// Allowed spread of `Delta_i` or `Gamma_i`, relative to `max(1, max |x|)`.
pub const REDUCED_SPREAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub r: f64,
    pub r_dot: f64,
    pub omega: f64,
    pub omega_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSample {
    pub t: f64,
    pub state: ReducedState,
}

fn check_shared(name: &'static str, v: &[f64]) -> Result<f64> {
    let scale = v.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let s = spread(v);
    let tol = REDUCED_SPREAD_TOL * scale;
    if !(s <= tol) {
        return Err(Error::CriterionViolation {
            quantity: name,
            spread: s,
            tol,
        });
    }
    Ok(v[0])
}

/// Returns `(r'', omega'')`.
pub fn reduced_rhs(
    rs: &ReducedState,
    masses: &[f64],
    angles: &[f64],
    c: Curvature,
) -> Result<(f64, f64)> {
    if !(rs.r > 0.0) {
        return Err(Error::InvalidInput(format!(
            "size must be positive, got {}",
            rs.r
        )));
    }
    let factor = 1.0 - c.kappa() * rs.r * rs.r;
    if factor.abs() < EQUATOR_TOL {
        return Err(Error::EquatorSingularity(factor));
    }
    if factor < 0.0 {
        return Err(Error::InvalidInput(format!(
            "kappa r^2 = {} is beyond the equator",
            1.0 - factor
        )));
    }
    let (deltas, gammas) = reduced_coefficients(masses, angles, c, rs.r)?;
    let delta = check_shared("Delta", &deltas)?;
    let gamma = check_shared("Gamma", &gammas)?;
    let r_ddot = rs.r * factor * rs.omega_dot * rs.omega_dot
        - c.kappa() * rs.r * rs.r_dot * rs.r_dot / factor
        - delta;
    let omega_ddot = (gamma - 2.0 * rs.r_dot * rs.omega_dot) / rs.r;
    Ok((r_ddot, omega_ddot))
}

fn deriv(y: &[f64; 4], masses: &[f64], angles: &[f64], c: Curvature) -> Result<[f64; 4]> {
    let rs = ReducedState {
        r: y[0],
        r_dot: y[1],
        omega: y[2],
        omega_dot: y[3],
    };
    let (rdd, wdd) = reduced_rhs(&rs, masses, angles, c)?;
    Ok([y[1], rdd, y[3], wdd])
}

/// Classical RK4 on `(r, r', omega, omega')` with a fixed step, sampled at every step.
pub fn integrate_reduced(
    rs: &ReducedState,
    masses: &[f64],
    angles: &[f64],
    c: Curvature,
    dt: f64,
    t_end: f64,
) -> Result<Vec<ReducedSample>> {
    if !(dt > 0.0) || !dt.is_finite() || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bad integration window dt={dt}, t_end={t_end}"
        )));
    }
    let steps = if t_end == 0.0 {
        0
    } else {
        ((t_end / dt).round() as usize).max(1)
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(ReducedSample { t: 0.0, state: *rs });
    if steps == 0 {
        return Ok(out);
    }
    let h = t_end / steps as f64;
    let mut y = [rs.r, rs.r_dot, rs.omega, rs.omega_dot];
    let add =
        |y: &[f64; 4], k: &[f64; 4], s: f64| std::array::from_fn::<f64, 4, _>(|i| y[i] + s * k[i]);
    for step in 1..=steps {
        let k1 = deriv(&y, masses, angles, c)?;
        let k2 = deriv(&add(&y, &k1, 0.5 * h), masses, angles, c)?;
        let k3 = deriv(&add(&y, &k2, 0.5 * h), masses, angles, c)?;
        let k4 = deriv(&add(&y, &k3, h), masses, angles, c)?;
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        out.push(ReducedSample {
            t: step as f64 * h,
            state: ReducedState {
                r: y[0],
                r_dot: y[1],
                omega: y[2],
                omega_dot: y[3],
            },
        });
    }
    Ok(out)
}

/// Full state of the polygon described by `rs`, on the upper hemisphere or sheet.
pub fn embed_reduced(
    rs: &ReducedState,
    masses: &[f64],
    angles: &[f64],
    c: Curvature,
) -> Result<SystemState> {
    let p = PolygonConfig::new(c, rs.r, rs.omega, angles, 1)?;
    embed_state(&p, masses, rs.r_dot, rs.omega_dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::acceleration;
    use crate::homographic::polygon::regular_angles;

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn released_polygon_contracts() {
        for &(kv, r) in &[(1.0, 0.5), (-1.0, 0.8)] {
            let rs = ReducedState {
                r,
                r_dot: 0.0,
                omega: 0.0,
                omega_dot: 0.0,
            };
            let (rdd, wdd) = reduced_rhs(&rs, &[1.0; 5], &regular_angles(5), k(kv)).unwrap();
            assert!(rdd < 0.0);
            assert!(wdd.abs() < 1e-12);
        }
    }

    #[test]
    fn relative_equilibrium_speed_balances() {
        let c = k(1.0);
        let r = 0.6;
        let angles = regular_angles(4);
        let masses = [1.0; 4];
        let (d, _) = reduced_coefficients(&masses, &angles, c, r).unwrap();
        let w = (d[0] / (r * (1.0 - r * r))).sqrt();
        let rs = ReducedState {
            r,
            r_dot: 0.0,
            omega: 0.0,
            omega_dot: w,
        };
        let (rdd, wdd) = reduced_rhs(&rs, &masses, &angles, c).unwrap();
        assert!(rdd.abs() < 1e-12 && wdd.abs() < 1e-12);
    }

    #[test]
    fn matches_full_acceleration_at_an_instant() {
        let c = k(1.0);
        let angles = regular_angles(3);
        let masses = [1.0; 3];
        let rs = ReducedState {
            r: 0.55,
            r_dot: 0.2,
            omega: 0.4,
            omega_dot: 1.3,
        };
        let (rdd, wdd) = reduced_rhs(&rs, &masses, &angles, c).unwrap();
        let s = embed_reduced(&rs, &masses, &angles, c).unwrap();
        let acc = acceleration(&s).unwrap();
        let (sn, cs) = (rs.omega + angles[0]).sin_cos();
        // xy part of the second derivative of body 1
        let ax = (rdd - rs.r * rs.omega_dot.powi(2)) * cs
            - (rs.r * wdd + 2.0 * rs.r_dot * rs.omega_dot) * sn;
        let ay = (rdd - rs.r * rs.omega_dot.powi(2)) * sn
            + (rs.r * wdd + 2.0 * rs.r_dot * rs.omega_dot) * cs;
        assert!((acc[0].x - ax).abs() < 1e-12, "{} vs {ax}", acc[0].x);
        assert!((acc[0].y - ay).abs() < 1e-12, "{} vs {ay}", acc[0].y);
    }

    #[test]
    fn errors() {
        let c = k(1.0);
        let ang = regular_angles(3);
        let at = |r| ReducedState {
            r,
            r_dot: 0.0,
            omega: 0.0,
            omega_dot: 0.0,
        };
        assert!(matches!(
            reduced_rhs(&at(1.0), &[1.0; 3], &ang, c),
            Err(Error::EquatorSingularity(_))
        ));
        assert!(matches!(
            reduced_rhs(&at(0.5), &[1.0, 2.0, 1.0], &ang, c),
            Err(Error::CriterionViolation { .. })
        ));
        assert!(reduced_rhs(&at(0.0), &[1.0; 3], &ang, c).is_err());
    }
}
