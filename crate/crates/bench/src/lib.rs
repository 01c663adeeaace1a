//! Fixtures shared by the benchmarks.

use curved_nbody::dynamics::Body;
use curved_nbody::equilibria::EquatorTriangle;
use curved_nbody::geometry::{tangent_project, Curvature, SurfacePoint, Vec3};
use curved_nbody::homographic::{regular_angles, PolygonConfig};
use curved_nbody::SystemState;

pub fn curvature(kappa: f64) -> Curvature {
    Curvature::new(kappa).expect("nonzero curvature")
}

/// `n` bodies of slightly different masses on a ring, with a swirl.
pub fn ring_state(n: usize, kappa: f64) -> SystemState {
    let c = curvature(kappa);
    let bodies = regular_angles(n)
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let p = SurfacePoint::from_polar(c, 0.6 * c.radius(), a + 0.05 * i as f64);
            let v = tangent_project(&p, &Vec3::new(-a.sin(), a.cos(), 0.1));
            Body::new(1.0 + 0.1 * i as f64, p.coords, v)
        })
        .collect();
    SystemState::new(c, bodies).expect("ring is regular")
}

/// A perturbed `n`-gon at half the curvature radius.
pub fn polygon(n: usize, kappa: f64) -> PolygonConfig {
    let c = curvature(kappa);
    let angles: Vec<f64> = regular_angles(n)
        .iter()
        .enumerate()
        .map(|(i, a)| a + 0.1 * (i as f64).sin())
        .collect();
    PolygonConfig::new(c, 0.5 * c.radius(), 0.0, &angles, 1).expect("well separated")
}

pub fn acute_triangle() -> EquatorTriangle {
    EquatorTriangle::new(curvature(1.0), [0.3, 2.0, 4.4]).expect("acute")
}
