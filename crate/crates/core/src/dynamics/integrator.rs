use std::fmt;

use super::{accelerations_into, conserved, ConservedQuantities, SystemState};
use crate::error::{Error, Result};
use crate::geometry::{inner, renormalize, Vec3};

/// Any coordinate beyond this magnitude aborts a step.
pub const BLOWUP_LIMIT: f64 = 1e12;

/// Why an integration stopped before `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    Collision { i: usize, j: usize },
    Antipodal { i: usize, j: usize },
    Blowup,
    OffSurface,
}

impl HaltReason {
    fn from_error(e: &Error) -> Option<Self> {
        match *e {
            Error::CollisionSingularity { i, j } => Some(Self::Collision { i, j }),
            Error::AntipodalSingularity { i, j } => Some(Self::Antipodal { i, j }),
            Error::NumericalBlowup(_) => Some(Self::Blowup),
            Error::OffSurface { .. } => Some(Self::OffSurface),
            _ => None,
        }
    }

    /// Short machine-readable tag.
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Collision { .. } => "collision",
            Self::Antipodal { .. } => "antipodal",
            Self::Blowup => "blowup",
            Self::OffSurface => "off_surface",
        }
    }
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: SystemState,
    pub conserved: ConservedQuantities,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub halted: Option<HaltReason>,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("trajectory always holds the initial state")
    }

    /// Max `|H(t) - H(0)| / |H(0)|`, or the absolute drift when `H(0) = 0`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.first().conserved.energy;
        let denom = if h0 == 0.0 { 1.0 } else { h0.abs() };
        self.samples
            .iter()
            .map(|s| (s.conserved.energy - h0).abs() / denom)
            .fold(0.0, f64::max)
    }

    /// Max absolute drift over the three angular-momentum components.
    pub fn momentum_drift(&self) -> f64 {
        let c0 = self.first().conserved.angular_momentum;
        self.samples
            .iter()
            .map(|s| (s.conserved.angular_momentum - c0).amax())
            .fold(0.0, f64::max)
    }
}

struct Phase {
    q: Vec<Vec3>,
    v: Vec<Vec3>,
}

/// One classical RK4 step on `(q, q')`, followed by projection of each
/// position back onto the surface and each velocity onto its tangent plane.
pub fn step(s: &SystemState, dt: f64) -> Result<SystemState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let c = s.curvature;
    let n = s.len();
    let masses = s.masses();
    let y0 = Phase {
        q: s.positions(),
        v: s.velocities(),
    };

    let mut acc = vec![Vec3::zeros(); n];
    let mut deriv = |y: &Phase| -> Result<Phase> {
        accelerations_into(c, &masses, &y.q, &y.v, &mut acc)?;
        Ok(Phase {
            q: y.v.clone(),
            v: acc.clone(),
        })
    };
    let shifted = |d: &Phase, h: f64| Phase {
        q: y0.q.iter().zip(&d.q).map(|(a, b)| a + b * h).collect(),
        v: y0.v.iter().zip(&d.v).map(|(a, b)| a + b * h).collect(),
    };

    let k1 = deriv(&y0)?;
    let k2 = deriv(&shifted(&k1, 0.5 * dt))?;
    let k3 = deriv(&shifted(&k2, 0.5 * dt))?;
    let k4 = deriv(&shifted(&k3, dt))?;

    let w = dt / 6.0;
    let mut next = s.clone();
    for i in 0..n {
        let q = y0.q[i] + (k1.q[i] + (k2.q[i] + k3.q[i]) * 2.0 + k4.q[i]) * w;
        let v = y0.v[i] + (k1.v[i] + (k2.v[i] + k3.v[i]) * 2.0 + k4.v[i]) * w;
        let big = q.amax().max(v.amax());
        if !(big <= BLOWUP_LIMIT) {
            return Err(Error::NumericalBlowup(big));
        }
        let q = renormalize(&q, c)?;
        let v = v - q * (c.kappa() * inner(&q, &v, c));
        next.bodies[i].position = q;
        next.bodies[i].velocity = v;
    }
    next.time = s.time + dt;
    Ok(next)
}

/// Integrates from `s.time` to `t_end` with fixed steps.
///
/// The step count is `round((t_end - t0) / dt)` and the step is adjusted so
/// the last sample lands on `t_end`. A sample is recorded every
/// `observer_stride` steps and at the final step. Singularities end the run
/// early with [`Trajectory::halted`] set; only invalid arguments are errors.
pub fn integrate(
    s: &SystemState,
    dt: f64,
    t_end: f64,
    observer_stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bad integration window dt={dt}, t_end={t_end}"
        )));
    }
    if t_end < s.time {
        return Err(Error::InvalidInput(format!(
            "t_end {t_end} precedes the initial time {}",
            s.time
        )));
    }
    let stride = observer_stride.max(1);
    let t0 = s.time;
    let mut samples = vec![Sample {
        state: s.clone(),
        conserved: conserved(s)?,
    }];
    let span = t_end - t0;
    let steps = if span == 0.0 {
        0
    } else {
        ((span / dt).round() as usize).max(1)
    };
    if steps == 0 {
        return Ok(Trajectory {
            samples,
            halted: None,
        });
    }
    let h = span / steps as f64;

    let mut cur = s.clone();
    let mut halted = None;
    for k in 1..=steps {
        let stepped = step(&cur, h).and_then(|mut next| {
            next.time = t0 + k as f64 * h;
            let cq = conserved(&next)?;
            Ok((next, cq))
        });
        match stepped {
            Ok((next, cq)) => {
                if k % stride == 0 || k == steps {
                    samples.push(Sample {
                        state: next.clone(),
                        conserved: cq,
                    });
                }
                cur = next;
            }
            Err(e) => match HaltReason::from_error(&e) {
                Some(reason) => {
                    halted = Some(reason);
                    break;
                }
                None => return Err(e),
            },
        }
    }
    Ok(Trajectory { samples, halted })
}
