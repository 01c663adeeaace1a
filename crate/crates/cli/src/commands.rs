//! The five subcommands. Each returns an exit code and writes its summary to `out`.

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use curved_nbody::dynamics::integrate;
use curved_nbody::equilibria::{
    isosceles_classify, make_relative_equilibrium, solve_fixed_point_masses, EquatorTriangle,
    IsoscelesResult,
};
use curved_nbody::geometry::{inner, renormalize, tangent_project, Curvature, SurfacePoint, Vec3};
use curved_nbody::homographic::criterion::GAMMA_RESIDUAL_TOL;
use curved_nbody::homographic::{
    check_criterion_grid, default_r_grid, embed_state, regular_angles, solve_masses_with_tol,
    PolygonConfig,
};
use curved_nbody::io::{write_trajectory, Report};
use curved_nbody::{Body, Error, SystemState};

use crate::config::{ConfigError, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SINGULAR: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Default spread tolerance for the criterion check.
pub const CRITERION_TOL: f64 = 1e-9;

/// Hand-written positions and velocities are snapped onto the surface and its
/// tangent planes when they miss by less than this.
const SNAP_TOL: f64 = 1e-6;

pub const SIMULATE_KEYS: &[&str] = &[
    "kappa",
    "masses",
    "positions",
    "velocities",
    "angles",
    "regular",
    "r",
    "omega",
    "r_dot",
    "omega_dot",
    "hemisphere",
    "dt",
    "t_end",
    "stride",
    "output",
];
pub const CRITERION_KEYS: &[&str] = &[
    "kappa",
    "masses",
    "angles",
    "regular",
    "r_grid",
    "hemisphere",
    "tol",
    "output",
];
pub const SOLVE_MASSES_KEYS: &[&str] = &[
    "kappa",
    "angles",
    "regular",
    "r",
    "hemisphere",
    "delta_target",
    "gamma_tol",
];
pub const FIXED_POINT_KEYS: &[&str] =
    &["kappa", "angles", "speed", "emit", "dt", "t_end", "stride"];
pub const ISOSCELES_KEYS: &[&str] = &["M", "m", "kappa"];

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Core(e) if e.is_singularity() => EXIT_SINGULAR,
            CliError::Core(
                Error::NotAcute { .. }
                | Error::InfeasibleTriangle(_)
                | Error::CriterionViolation { .. }
                | Error::ResidualTooLarge { .. }
                | Error::SingularMatrix,
            ) => EXIT_INFEASIBLE,
            CliError::Core(_) => EXIT_INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CmdResult = Result<i32, CliError>;

fn header(report: &mut Report, cmd: &str) {
    report.comment(&format!("curved-nbody {} {cmd}", env!("CARGO_PKG_VERSION")));
}

fn curvature(cfg: &RunConfig) -> Result<Curvature, CliError> {
    Ok(Curvature::new(cfg.require_real("kappa")?)?)
}

fn bad(msg: String) -> CliError {
    CliError::Config(ConfigError(msg))
}

fn hemisphere(cfg: &RunConfig) -> Result<i32, CliError> {
    let h = cfg.integer("hemisphere", 1)?;
    if h != 1 && h != -1 {
        return Err(bad(format!(
            "{}: 'hemisphere' must be 1 or -1, got {h}",
            cfg.origin("hemisphere")
        )));
    }
    Ok(h as i32)
}

fn positive_list(cfg: &RunConfig, key: &str) -> Result<Vec<f64>, CliError> {
    let v = cfg.require_reals(key)?;
    if let Some(x) = v.iter().find(|x| !(**x > 0.0)) {
        return Err(bad(format!(
            "{}: every entry of '{key}' must be positive, got {x}",
            cfg.origin(key)
        )));
    }
    Ok(v)
}

/// Vertex angles from `angles` or `regular = n`.
fn polygon_angles(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    match (cfg.reals("angles")?, cfg.has("regular")) {
        (Some(_), true) => Err(bad("give either 'angles' or 'regular', not both".into())),
        (Some(a), false) => Ok(a),
        (None, true) => {
            let n = cfg.integer("regular", 0)?;
            if n < 3 {
                return Err(bad(format!(
                    "{}: 'regular' needs at least 3 vertices, got {n}",
                    cfg.origin("regular")
                )));
            }
            Ok(regular_angles(n as usize))
        }
        (None, false) => Err(bad("missing required key 'angles' (or 'regular')".into())),
    }
}

/// Angles reduced to [0, 2 pi) and sorted, with masses carried along.
fn sort_vertices(angles: &[f64], masses: &[f64]) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    if angles.len() != masses.len() {
        return Err(bad(format!(
            "{} masses for {} angles",
            masses.len(),
            angles.len()
        )));
    }
    let mut pairs: Vec<(f64, f64)> = angles
        .iter()
        .map(|a| a.rem_euclid(2.0 * PI))
        .zip(masses.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

fn triples(cfg: &RunConfig, key: &str, n: usize) -> Result<Option<Vec<Vec3>>, CliError> {
    let Some(v) = cfg.reals(key)? else {
        return Ok(None);
    };
    if v.len() != 3 * n {
        return Err(bad(format!(
            "{}: '{key}' needs 3 numbers per body ({} for {n} bodies), got {}",
            cfg.origin(key),
            3 * n,
            v.len()
        )));
    }
    Ok(Some(
        v.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect(),
    ))
}

fn explicit_state(cfg: &RunConfig, c: Curvature, masses: &[f64]) -> Result<SystemState, CliError> {
    let n = masses.len();
    let positions = triples(cfg, "positions", n)?.expect("caller checked");
    let velocities = triples(cfg, "velocities", n)?.unwrap_or_else(|| vec![Vec3::zeros(); n]);
    let mut bodies = Vec::with_capacity(n);
    for (i, ((p, v), &m)) in positions.iter().zip(&velocities).zip(masses).enumerate() {
        let miss = (c.kappa() * inner(p, p, c) - 1.0).abs();
        if miss > SNAP_TOL {
            return Err(bad(format!(
                "body {} position is off the surface by {miss:e}",
                i + 1
            )));
        }
        let q = SurfacePoint::new(renormalize(p, c)?, c)?;
        let scale = v.norm().max(1.0);
        let normal = (c.kappa() * inner(&q.coords, v, c)).abs();
        if normal > SNAP_TOL * scale {
            return Err(bad(format!(
                "body {} velocity is not tangent ({normal:e})",
                i + 1
            )));
        }
        bodies.push(Body::new(m, q.coords, tangent_project(&q, v)));
    }
    Ok(SystemState::new(c, bodies)?)
}

fn polygon_state(cfg: &RunConfig, c: Curvature, masses: &[f64]) -> Result<SystemState, CliError> {
    let (angles, masses) = sort_vertices(&polygon_angles(cfg)?, masses)?;
    let r = cfg.positive("r", None)?;
    let p = PolygonConfig::new(c, r, cfg.real_or("omega", 0.0)?, &angles, hemisphere(cfg)?)?;
    Ok(embed_state(
        &p,
        &masses,
        cfg.real_or("r_dot", 0.0)?,
        cfg.real_or("omega_dot", 0.0)?,
    )?)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| bad(format!("cannot create {}: {e}", path.display())))
}

pub fn simulate(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let c = curvature(cfg)?;
    let masses = positive_list(cfg, "masses")?;
    let dt = cfg.positive("dt", None)?;
    let t_end = cfg.positive("t_end", None)?;
    let stride = cfg.integer("stride", 1)?;
    if stride < 1 {
        return Err(bad(format!(
            "{}: 'stride' must be at least 1, got {stride}",
            cfg.origin("stride")
        )));
    }
    let built = if cfg.has("positions") {
        if cfg.has("angles") || cfg.has("regular") {
            return Err(bad(
                "give either 'positions' or a polygon ('angles'/'regular'), not both".into(),
            ));
        }
        explicit_state(cfg, c, &masses)
    } else {
        polygon_state(cfg, c, &masses)
    };
    let start = match built {
        Ok(s) => s,
        Err(CliError::Core(e)) if e.is_singularity() => {
            let reason = match e {
                Error::CollisionSingularity { .. } => "collision",
                Error::AntipodalSingularity { .. } => "antipodal",
                Error::EquatorSingularity(_) => "equator",
                _ => "blowup",
            };
            writeln!(out, "drift_H=0 drift_c=0 halted={reason}")?;
            return Ok(EXIT_SINGULAR);
        }
        Err(e) => return Err(e),
    };

    let traj = integrate(&start, dt, t_end, stride as usize)?;
    if let Some(path) = cfg.path("output") {
        let mut w = create(&path)?;
        write_trajectory(&mut w, &traj)?;
        w.flush()?;
    }
    let halted = traj.halted.map_or("none", |h| h.as_str());
    writeln!(
        out,
        "drift_H={:e} drift_c={:e} halted={halted}",
        traj.energy_drift(),
        traj.momentum_drift()
    )?;
    Ok(if traj.halted.is_some() {
        EXIT_SINGULAR
    } else {
        EXIT_OK
    })
}

pub fn criterion(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let c = curvature(cfg)?;
    let (angles, masses) = sort_vertices(&polygon_angles(cfg)?, &positive_list(cfg, "masses")?)?;
    let grid = match cfg.reals("r_grid")? {
        Some(g) if g.is_empty() => return Err(bad("'r_grid' is empty".into())),
        Some(g) => g,
        None => default_r_grid(c),
    };
    let tol = cfg.tolerance("tol", CRITERION_TOL)?;
    let shape = PolygonConfig::new(c, grid[0], 0.0, &angles, hemisphere(cfg)?)?;
    let reports = check_criterion_grid(&masses, &shape, &grid, tol)?;

    let mut report = Report::new();
    header(&mut report, "criterion");
    report
        .real("kappa", c.kappa())
        .reals("angles", &angles)
        .reals("masses", &masses)
        .real("tol", tol)
        .blank();
    for rep in &reports {
        report
            .real("r", rep.r)
            .reals("deltas", &rep.deltas)
            .reals("gammas", &rep.gammas)
            .real("delta_spread", rep.delta_spread)
            .real("gamma_spread", rep.gamma_spread)
            .value("verdict", rep.verdict)
            .blank();
    }
    let passed = reports.iter().filter(|r| r.verdict).count();
    let all = passed == reports.len();
    report
        .value("grid_points", reports.len())
        .value("passed", passed)
        .value("verdict", all);

    match cfg.path("output") {
        Some(path) => {
            let mut w = create(&path)?;
            w.write_all(report.as_str().as_bytes())?;
            w.flush()?;
            writeln!(out, "verdict={all} passed={passed}/{}", reports.len())?;
        }
        None => out.write_all(report.as_str().as_bytes())?,
    }
    Ok(if all { EXIT_OK } else { EXIT_INFEASIBLE })
}

pub fn solve_masses(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let c = curvature(cfg)?;
    let mut angles: Vec<f64> = polygon_angles(cfg)?
        .iter()
        .map(|a| a.rem_euclid(2.0 * PI))
        .collect();
    angles.sort_by(f64::total_cmp);
    let r = cfg.positive("r", None)?;
    let target = cfg.positive("delta_target", Some(1.0))?;
    let tol = cfg.tolerance("gamma_tol", GAMMA_RESIDUAL_TOL)?;
    let p = PolygonConfig::new(c, r, 0.0, &angles, hemisphere(cfg)?)?;
    let sol = solve_masses_with_tol(&p, target, tol)?;

    let mut report = Report::new();
    header(&mut report, "solve-masses");
    report
        .reals("angles", p.alphas())
        .reals("masses", &sol.masses)
        .real("gamma_residual", sol.gamma_residual)
        .value("feasible", sol.feasible);
    out.write_all(report.as_str().as_bytes())?;
    Ok(if sol.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

pub fn fixed_point(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let c = curvature(cfg)?;
    let angles = cfg.require_reals("angles")?;
    let angles: [f64; 3] = angles.as_slice().try_into().map_err(|_| {
        bad(format!(
            "{}: 'angles' needs exactly 3 entries, got {}",
            cfg.origin("angles"),
            angles.len()
        ))
    })?;
    if !c.is_sphere() {
        return Err(Error::NonPositiveCurvature(c.kappa()).into());
    }
    let sol = solve_fixed_point_masses(&EquatorTriangle::new(c, angles)?)?;

    let mut report = Report::new();
    header(&mut report, "fixed-point");
    report
        .reals("angles", &sol.triangle.angles())
        .reals("masses", &sol.masses)
        .real("det_a_residual", sol.det_a_residual)
        .real("system_residual", sol.system_residual)
        .real("accel_residual", sol.accel_residual)
        .value("feasible", true);
    out.write_all(report.as_str().as_bytes())?;

    if let Some(path) = cfg.path("emit") {
        let speed = cfg.real_or("speed", 0.0)?;
        let state = make_relative_equilibrium(&sol, speed)?;
        let flat = |v: Vec<Vec3>| v.iter().flat_map(|p| [p.x, p.y, p.z]).collect::<Vec<_>>();
        let mut emitted = Report::new();
        header(&mut emitted, "simulate");
        emitted
            .real("kappa", c.kappa())
            .reals("masses", &state.masses())
            .reals("positions", &flat(state.positions()))
            .reals("velocities", &flat(state.velocities()))
            .real("dt", cfg.positive("dt", Some(1e-3))?)
            .real("t_end", cfg.positive("t_end", Some(10.0))?)
            .value("stride", cfg.integer("stride", 100)?);
        let mut w = create(&path)?;
        w.write_all(emitted.as_str().as_bytes())?;
        w.flush()?;
        writeln!(out, "emitted={}", path.display())?;
    }
    Ok(EXIT_OK)
}

pub fn isosceles(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let big_m = cfg.positive("M", None)?;
    let m = cfg.positive("m", None)?;
    let kappa = cfg.positive("kappa", None)?;
    let mut report = Report::new();
    header(&mut report, "isosceles");
    let code = match isosceles_classify(big_m, m, kappa)? {
        IsoscelesResult::Feasible { y, x, triangle } => {
            report
                .value("feasible", true)
                .real("y", y)
                .real("x", x)
                .reals("angles", &triangle.angles());
            EXIT_OK
        }
        IsoscelesResult::Infeasible { ratio } => {
            report.value("feasible", false).real("mass_ratio", ratio);
            EXIT_INFEASIBLE
        }
    };
    out.write_all(report.as_str().as_bytes())?;
    Ok(code)
}
