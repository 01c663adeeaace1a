use nalgebra::{DMatrix, DVector};

use super::polygon::PolygonConfig;
use crate::error::{Error, Result};
use crate::geometry::Curvature;

/// `c_ji` at or below this is a collision.
pub const KERNEL_COLLISION_TOL: f64 = 1e-15;
/// `2 - c_ji kappa r^2` at or below this is an antipodal pair.
pub const KERNEL_ANTIPODAL_TOL: f64 = 1e-15;
/// Relative tolerance on `|Gamma m| / |m|` for a feasible mass vector.
pub const GAMMA_RESIDUAL_TOL: f64 = 1e-9;
/// Masses at or below this fraction of the largest count as non-positive.
pub const POSITIVE_MASS_FRACTION: f64 = 1e-12;

/// The pair weights of vertex j acting on vertex i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPair {
    pub mu: f64,
    pub nu: f64,
}

/// `mu = 1 / (c^{1/2} (2 - c kappa r^2)^{3/2})` and
/// `nu = s / (c^{3/2} (2 - c kappa r^2)^{3/2})`, with
/// `c = 1 - cos(alpha_j - alpha_i)` and `s = sin(alpha_j - alpha_i)`.
pub fn kernels(alpha_i: f64, alpha_j: f64, kappa: f64, r: f64) -> Result<KernelPair> {
    kernels_indexed(alpha_i, alpha_j, kappa, r, 0, 1)
}

pub(crate) fn kernels_indexed(
    alpha_i: f64,
    alpha_j: f64,
    kappa: f64,
    r: f64,
    i: usize,
    j: usize,
) -> Result<KernelPair> {
    let d = alpha_j - alpha_i;
    // 1 - cos d, in the cancellation-free form
    let half = (0.5 * d).sin();
    let c = 2.0 * half * half;
    if c <= KERNEL_COLLISION_TOL {
        return Err(Error::CollisionSingularity { i, j });
    }
    let t = 2.0 - c * kappa * r * r;
    if t <= KERNEL_ANTIPODAL_TOL {
        return Err(Error::AntipodalSingularity { i, j });
    }
    let t32 = t * t.sqrt();
    Ok(KernelPair {
        mu: 1.0 / (c.sqrt() * t32),
        nu: d.sin() / (c * c.sqrt() * t32),
    })
}

fn check_masses(masses: &[f64], n: usize) -> Result<()> {
    if masses.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} masses for {n} vertices",
            masses.len()
        )));
    }
    if let Some(m) = masses.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "masses must be positive, got {m}"
        )));
    }
    Ok(())
}

/// The matrices `Delta[i][j] = mu_ji` and `Gamma[i][j] = nu_ji`, zero diagonal.
pub fn build_matrices(p: &PolygonConfig) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = p.len();
    let a = p.alphas();
    let k = p.curvature().kappa();
    let mut delta = DMatrix::zeros(n, n);
    let mut gamma = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let kp = kernels_indexed(a[i], a[j], k, p.r(), i, j)?;
                delta[(i, j)] = kp.mu;
                gamma[(i, j)] = kp.nu;
            }
        }
    }
    Ok((delta, gamma))
}

/// `delta_i = sum_j m_j mu_ji` and `gamma_i = sum_j m_j nu_ji`.
pub fn delta_gamma(masses: &[f64], p: &PolygonConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    check_masses(masses, p.len())?;
    let (delta, gamma) = build_matrices(p)?;
    let m = DVector::from_column_slice(masses);
    Ok((
        (&delta * &m).as_slice().to_vec(),
        (&gamma * &m).as_slice().to_vec(),
    ))
}

/// The coefficients of the size and angle equations,
/// `Delta_i = sum_j m_j (1 - kappa r^2) / (c^{1/2} r^2 (2 - c kappa r^2)^{3/2})`
/// and `Gamma_i = sum_j m_j s / (c^{3/2} r^2 (2 - c kappa r^2)^{3/2})`,
/// for vertices at phases `alphas` (any order) on the circle of size `r`.
pub fn reduced_coefficients(
    masses: &[f64],
    alphas: &[f64],
    curvature: Curvature,
    r: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = alphas.len();
    check_masses(masses, n)?;
    let kr2 = curvature.kappa() * r * r;
    let factor = 1.0 - kr2;
    if factor.abs() <= super::polygon::EQUATOR_TOL {
        return Err(Error::EquatorSingularity(factor));
    }
    let r2 = r * r;
    let mut big_delta = vec![0.0; n];
    let mut big_gamma = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = alphas[j] - alphas[i];
            let c = 1.0 - d.cos();
            if c <= KERNEL_COLLISION_TOL {
                return Err(Error::CollisionSingularity { i, j });
            }
            let t = 2.0 - c * kr2;
            if t <= KERNEL_ANTIPODAL_TOL {
                return Err(Error::AntipodalSingularity { i, j });
            }
            let t32 = t.powf(1.5);
            big_delta[i] += masses[j] * factor / (c.sqrt() * r2 * t32);
            big_gamma[i] += masses[j] * d.sin() / (c.powf(1.5) * r2 * t32);
        }
    }
    Ok((big_delta, big_gamma))
}

pub(crate) fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    hi - lo
}

/// Outcome of the delta/gamma equality test at one size `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub r: f64,
    pub deltas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub delta_matrix: DMatrix<f64>,
    pub gamma_matrix: DMatrix<f64>,
    pub delta_spread: f64,
    pub gamma_spread: f64,
    pub tol: f64,
    pub verdict: bool,
}

/// Tests `delta_1 = ... = delta_n` and `gamma_1 = ... = gamma_n` at the
/// polygon's current size. Spreads are `max - min`, compared to `tol`.
pub fn check_criterion(masses: &[f64], p: &PolygonConfig, tol: f64) -> Result<CriterionReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    check_masses(masses, p.len())?;
    p.require_off_equator()?;
    let (delta_matrix, gamma_matrix) = build_matrices(p)?;
    let m = DVector::from_column_slice(masses);
    let deltas = (&delta_matrix * &m).as_slice().to_vec();
    let gammas = (&gamma_matrix * &m).as_slice().to_vec();
    let delta_spread = spread(&deltas);
    let gamma_spread = spread(&gammas);
    Ok(CriterionReport {
        r: p.r(),
        verdict: delta_spread <= tol && gamma_spread <= tol,
        deltas,
        gammas,
        delta_matrix,
        gamma_matrix,
        delta_spread,
        gamma_spread,
        tol,
    })
}

/// Runs [`check_criterion`] at every size in `r_grid`.
pub fn check_criterion_grid(
    masses: &[f64],
    shape: &PolygonConfig,
    r_grid: &[f64],
    tol: f64,
) -> Result<Vec<CriterionReport>> {
    if r_grid.is_empty() {
        return Err(Error::InvalidInput("empty r grid".into()));
    }
    r_grid
        .iter()
        .map(|&r| check_criterion(masses, &shape.with_r(r)?, tol))
        .collect()
}

/// Nine sizes evenly spanning `[0.1, 0.9] |kappa|^{-1/2}`.
pub fn default_r_grid(c: Curvature) -> Vec<f64> {
    let r_max = c.radius();
    (0..9).map(|k| (0.1 + 0.1 * k as f64) * r_max).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassSolution {
    pub masses: Vec<f64>,
    /// `|Gamma m|_2`.
    pub gamma_residual: f64,
    pub feasible: bool,
}

/// Solves `Delta m = (delta_target, ..., delta_target)` and tests whether the
/// solution is positive and annihilated by `Gamma`.
pub fn solve_masses(p: &PolygonConfig, delta_target: f64) -> Result<MassSolution> {
    solve_masses_with_tol(p, delta_target, GAMMA_RESIDUAL_TOL)
}

/// [`solve_masses`] with an explicit relative tolerance on `|Gamma m| / |m|`.
pub fn solve_masses_with_tol(
    p: &PolygonConfig,
    delta_target: f64,
    rel_tol: f64,
) -> Result<MassSolution> {
    if !(delta_target > 0.0) || !delta_target.is_finite() {
        return Err(Error::InvalidInput(format!(
            "delta target must be positive, got {delta_target}"
        )));
    }
    p.require_off_equator()?;
    let (delta, gamma) = build_matrices(p)?;
    let rhs = DVector::from_element(p.len(), delta_target);
    let m = delta.lu().solve(&rhs).ok_or(Error::SingularMatrix)?;
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    let gamma_residual = (&gamma * &m).norm();
    let max_m = m.max();
    let positive = max_m > 0.0 && m.iter().all(|&v| v > POSITIVE_MASS_FRACTION * max_m);
    Ok(MassSolution {
        feasible: positive && gamma_residual <= rel_tol * m.norm(),
        masses: m.as_slice().to_vec(),
        gamma_residual,
    })
}
