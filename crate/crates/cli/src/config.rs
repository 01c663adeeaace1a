//! Flat `key=value` configuration with `--key value` overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use curved_nbody::io::parse_key_values;

/// Environment variable that multiplies every tolerance.
pub const TOL_SCALE_VAR: &str = "CURVED_NBODY_TOL_SCALE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Line(usize),
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    entries: BTreeMap<String, (String, Origin)>,
    tol_scale: f64,
}

impl RunConfig {
    /// Reads the optional file, then applies `--key value` / `--key=value` overrides.
    pub fn load(
        file: Option<&Path>,
        overrides: &[String],
        allowed: &[&str],
    ) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig {
            entries: BTreeMap::new(),
            tol_scale: tol_scale_from_env()?,
        };
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            cfg.merge_text(&text)?;
        }
        cfg.merge_flags(overrides)?;
        for (key, (_, origin)) in &cfg.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError(format!(
                    "{origin}: unknown key '{key}' (expected one of: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(cfg)
    }

    fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let entries = parse_key_values(text)
            .map_err(|e| ConfigError(e.to_string().replace("invalid input: ", "")))?;
        for e in entries {
            self.entries.insert(e.key, (e.value, Origin::Line(e.line)));
        }
        Ok(())
    }

    fn merge_flags(&mut self, args: &[String]) -> Result<(), ConfigError> {
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(body) = arg.strip_prefix("--") else {
                return Err(ConfigError(format!("expected --key value, got '{arg}'")));
            };
            let (key, value) = match body.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it
                        .next()
                        .ok_or_else(|| ConfigError(format!("flag --{body} is missing a value")))?;
                    (body.to_string(), v.clone())
                }
            };
            if key.is_empty() {
                return Err(ConfigError(format!("empty flag name in '{arg}'")));
            }
            self.entries.insert(key, (value, Origin::Flag));
        }
        Ok(())
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&(String, Origin)> {
        self.entries.get(key)
    }

    fn parse_real(key: &str, s: &str, origin: Origin) -> Result<f64, ConfigError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("{origin}: '{key}' expects a number, got '{s}'")))?;
        if !v.is_finite() {
            return Err(ConfigError(format!(
                "{origin}: '{key}' must be finite, got '{s}'"
            )));
        }
        Ok(v)
    }

    pub fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key)
            .map(|(s, o)| Self::parse_real(key, s, *o))
            .transpose()
    }

    pub fn real_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.real(key)?.unwrap_or(default))
    }

    pub fn require_real(&self, key: &str) -> Result<f64, ConfigError> {
        self.real(key)?
            .ok_or_else(|| ConfigError(format!("missing required key '{key}'")))
    }

    pub fn positive(&self, key: &str, default: Option<f64>) -> Result<f64, ConfigError> {
        let v = match default {
            Some(d) => self.real_or(key, d)?,
            None => self.require_real(key)?,
        };
        if !(v > 0.0) {
            let origin = self
                .raw(key)
                .map_or(String::from("default"), |(_, o)| o.to_string());
            return Err(ConfigError(format!(
                "{origin}: '{key}' must be positive, got {v}"
            )));
        }
        Ok(v)
    }

    /// A tolerance, scaled by the environment override.
    pub fn tolerance(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.positive(key, Some(default))? * self.tol_scale)
    }

    pub fn reals(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some((s, o)) = self.raw(key) else {
            return Ok(None);
        };
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| Self::parse_real(key, t, *o))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn require_reals(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.reals(key)?
            .ok_or_else(|| ConfigError(format!("missing required key '{key}'")))
    }

    pub fn integer(&self, key: &str, default: i64) -> Result<i64, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some((s, o)) => s
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("{o}: '{key}' expects an integer, got '{s}'"))),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.raw(key).map(|(s, _)| s.as_str())
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.text(key).map(PathBuf::from)
    }

    /// Where a key came from, for error messages.
    pub fn origin(&self, key: &str) -> String {
        self.raw(key)
            .map_or(String::from("default"), |(_, o)| o.to_string())
    }
}

fn tol_scale_from_env() -> Result<f64, ConfigError> {
    match std::env::var(TOL_SCALE_VAR) {
        Err(_) => Ok(1.0),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(ConfigError(format!(
                "{TOL_SCALE_VAR} must be a positive number, got '{s}'"
            ))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, flags: &[&str]) -> Result<RunConfig, ConfigError> {
        let mut c = RunConfig {
            tol_scale: 1.0,
            ..Default::default()
        };
        c.merge_text(text)?;
        c.merge_flags(&flags.iter().map(|s| s.to_string()).collect::<Vec<_>>())?;
        Ok(c)
    }

    #[test]
    fn flags_override_file_values() {
        let c = cfg("kappa = 1\n# note\nr=0.5\n", &["--kappa", "-1", "--r=0.25"]).unwrap();
        assert_eq!(c.require_real("kappa").unwrap(), -1.0);
        assert_eq!(c.require_real("r").unwrap(), 0.25);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = cfg("kappa=1\n\nbogus line\n", &[]).unwrap_err();
        assert!(e.0.contains("line 3"), "{e}");
        let c = cfg("kappa=1\nr=abc\n", &[]).unwrap();
        let e = c.require_real("r").unwrap_err();
        assert!(e.0.contains("line 2"), "{e}");
    }

    #[test]
    fn lists_and_missing_values() {
        let c = cfg("masses = 1, 2.5 ,3\n", &[]).unwrap();
        assert_eq!(c.require_reals("masses").unwrap(), vec![1.0, 2.5, 3.0]);
        assert!(c.require_reals("angles").is_err());
        assert!(cfg("", &["--kappa"]).is_err());
        assert!(cfg("", &["kappa", "1"]).is_err());
    }

    #[test]
    fn rejects_non_finite_and_non_positive() {
        let c = cfg("dt=nan\nt_end=-1\n", &[]).unwrap();
        assert!(c.require_real("dt").is_err());
        assert!(c.positive("t_end", None).is_err());
    }
}
