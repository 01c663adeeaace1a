//! Text formats: trajectory CSV and line-oriented `key=value` reports.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::dynamics::{Sample, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// One CSV row: time, energy, angular momentum, then per-body position and velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub energy: f64,
    pub angular_momentum: Vec3,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
}

impl TrajectoryRow {
    pub fn from_sample(s: &Sample) -> Self {
        Self {
            t: s.state.time,
            energy: s.conserved.energy,
            angular_momentum: s.conserved.angular_momentum,
            positions: s.state.positions(),
            velocities: s.state.velocities(),
        }
    }
}

/// `t,H,cx,cy,cz,x1,y1,z1,vx1,vy1,vz1,...` with 1-based body indices.
pub fn csv_header(n: usize) -> String {
    let mut h = String::from("t,H,cx,cy,cz");
    for i in 1..=n {
        write!(h, ",x{i},y{i},z{i},vx{i},vy{i},vz{i}").unwrap();
    }
    h
}

// 17 significant digits: enough to round-trip every f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_row(row: &TrajectoryRow) -> String {
    let mut fields = vec![row.t, row.energy];
    fields.extend(row.angular_momentum.iter());
    for (q, v) in row.positions.iter().zip(&row.velocities) {
        fields.extend(q.iter());
        fields.extend(v.iter());
    }
    fields
        .into_iter()
        .map(fmt_f64)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn write_trajectory<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    let n = traj.first().state.len();
    writeln!(w, "{}", csv_header(n))?;
    for s in &traj.samples {
        writeln!(w, "{}", format_row(&TrajectoryRow::from_sample(s)))?;
    }
    Ok(())
}

pub fn parse_trajectory(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty trajectory file".into()))?;
    let cols = header.split(',').count();
    if cols < 5 || (cols - 5) % 6 != 0 {
        return Err(Error::InvalidInput(format!(
            "line 1: unexpected header with {cols} columns"
        )));
    }
    let n = (cols - 5) / 6;
    if header.trim() != csv_header(n) {
        return Err(Error::InvalidInput("line 1: unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidInput(format!("line {}: {e}", idx + 1)))?;
        if vals.len() != cols {
            return Err(Error::InvalidInput(format!(
                "line {}: expected {cols} fields, got {}",
                idx + 1,
                vals.len()
            )));
        }
        let v3 = |k: usize| Vec3::new(vals[k], vals[k + 1], vals[k + 2]);
        rows.push(TrajectoryRow {
            t: vals[0],
            energy: vals[1],
            angular_momentum: v3(2),
            positions: (0..n).map(|i| v3(5 + 6 * i)).collect(),
            velocities: (0..n).map(|i| v3(8 + 6 * i)).collect(),
        });
    }
    Ok(rows)
}

/// A `key=value` report with `#` comment lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, c: &str) -> &mut Self {
        writeln!(self.text, "# {c}").unwrap();
        self
    }

    pub fn value(&mut self, key: &str, v: impl std::fmt::Display) -> &mut Self {
        writeln!(self.text, "{key}={v}").unwrap();
        self
    }

    pub fn real(&mut self, key: &str, v: f64) -> &mut Self {
        self.value(key, fmt_f64(v))
    }

    pub fn reals(&mut self, key: &str, v: &[f64]) -> &mut Self {
        let joined = v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",");
        self.value(key, joined)
    }

    pub fn blank(&mut self) -> &mut Self {
        self.text.push('\n');
        self
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// One `key=value` entry with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Parses `key=value` lines, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!(
                "line {}: expected key=value, got {line:?}",
                idx + 1
            ))
        })?;
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::InvalidInput(format!("line {}: empty key", idx + 1)));
        }
        out.push(Entry {
            line: idx + 1,
            key: key.to_string(),
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}
