use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use super::output::fmt_float;
use super::parse_rational;
use crate::dirac::{GridSpec, LabParams, DEFAULT_MARGIN, DEFAULT_TOL};
use crate::expfit::{BasisSpec, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: String, reason: String },
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.to_string(), reason: reason.into() }
}

/// Settings for the spectral and trace experiments, read from flat
/// `key = value` text.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t_grid: Vec<f64>,
    pub k_max: u32,
    pub levels: usize,
    /// Grid spacing; absent means domain length / 4000.
    pub h: Option<f64>,
    pub rho_margin_factor: f64,
    pub tol: f64,
    pub lambda: f64,
    pub lambda0: f64,
    pub windows: Vec<(f64, f64)>,
    pub mass_window: f64,
    pub mass_levels: usize,
    pub smooth_basis: BasisSpec,
    pub log_basis: BasisSpec,
    pub output_dir: PathBuf,
}

const KEYS: &[&str] = &[
    "t_grid",
    "k_max",
    "levels",
    "h",
    "rho_margin_factor",
    "tol",
    "lambda",
    "lambda0",
    "windows",
    "mass_window",
    "mass_levels",
    "smooth_basis",
    "log_basis",
    "output_dir",
];

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: FromStr>(key: &str, s: &str) -> Result<T, ConfigError> {
    s.trim().parse().map_err(|_| bad(key, format!("cannot parse `{}`", s.trim())))
}

fn real(key: &str, s: &str) -> Result<f64, ConfigError> {
    let x: f64 = number(key, s)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, "must be finite"))
    }
}

fn basis(key: &str, value: &str) -> Result<BasisSpec, ConfigError> {
    let monomials = list(value)
        .map(|entry| {
            let (z, k) = entry.split_once(':').ok_or_else(|| bad(key, format!("`{entry}` is not `z:k`")))?;
            let z = parse_rational(z.trim()).map_err(|e| bad(key, e))?;
            Ok(Monomial::new(z, number(key, k)?))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    Ok(BasisSpec::new(monomials))
}

fn fmt_basis(b: &BasisSpec) -> String {
    b.monomials.iter().map(|m| format!("{}:{}", m.z, m.k)).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey { line: i + 1, key: key.to_string() });
            }
            if entries.insert(key, value.trim()).is_some() {
                return Err(ConfigError::DuplicateKey { line: i + 1, key: key.to_string() });
            }
        }
        let get = |k| entries.get(k).copied();

        let t_grid = list(get("t_grid").ok_or(ConfigError::Missing("t_grid"))?)
            .map(|s| real("t_grid", s))
            .collect::<Result<Vec<_>, _>>()?;
        let windows = get("windows")
            .map(|v| {
                list(v)
                    .map(|w| {
                        let (a, b) = w.split_once(':').ok_or_else(|| bad("windows", format!("`{w}` is not `a:b`")))?;
                        Ok((real("windows", a)?, real("windows", b)?))
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()
            })
            .transpose()?
            .unwrap_or_default();
        let config = RunConfig {
            t_grid,
            k_max: get("k_max").map(|v| number("k_max", v)).transpose()?.unwrap_or(10),
            levels: get("levels").map(|v| number("levels", v)).transpose()?.unwrap_or(40),
            h: get("h").map(|v| real("h", v)).transpose()?,
            rho_margin_factor: get("rho_margin_factor")
                .map(|v| real("rho_margin_factor", v))
                .transpose()?
                .unwrap_or(DEFAULT_MARGIN),
            tol: get("tol").map(|v| real("tol", v)).transpose()?.unwrap_or(DEFAULT_TOL),
            lambda: get("lambda").map(|v| real("lambda", v)).transpose()?.unwrap_or(-1.0),
            lambda0: get("lambda0").map(|v| real("lambda0", v)).transpose()?.unwrap_or(-2.0),
            windows,
            mass_window: get("mass_window").map(|v| real("mass_window", v)).transpose()?.unwrap_or(0.1),
            mass_levels: get("mass_levels").map(|v| number("mass_levels", v)).transpose()?.unwrap_or(1),
            smooth_basis: get("smooth_basis")
                .map(|v| basis("smooth_basis", v))
                .transpose()?
                .unwrap_or_else(BasisSpec::default_smooth),
            log_basis: get("log_basis")
                .map(|v| basis("log_basis", v))
                .transpose()?
                .unwrap_or_else(BasisSpec::default_log),
            output_dir: PathBuf::from(get("output_dir").unwrap_or("out")),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.t_grid.is_empty() {
            return Err(bad("t_grid", "must list at least one value"));
        }
        for (i, &t) in self.t_grid.iter().enumerate() {
            if t < 0.0 {
                return Err(bad("t_grid", format!("{t} is negative")));
            }
            if self.t_grid[..i].contains(&t) {
                return Err(bad("t_grid", format!("{t} appears twice")));
            }
        }
        if self.levels == 0 {
            return Err(bad("levels", "must be at least 1"));
        }
        if let Some(h) = self.h {
            if !(h > 0.0) {
                return Err(bad("h", "must be positive"));
            }
        }
        if !(self.rho_margin_factor >= 50.0) {
            return Err(bad("rho_margin_factor", "must be at least 50"));
        }
        if !(self.tol > 0.0) {
            return Err(bad("tol", "must be positive"));
        }
        if let Some((a, b)) = self.windows.iter().find(|(a, b)| !(a < b)) {
            return Err(bad("windows", format!("{a}:{b} is empty")));
        }
        if !(self.mass_window > 0.0) {
            return Err(bad("mass_window", "must be positive"));
        }
        Ok(())
    }

    pub fn serialize(&self) -> String {
        let floats = |v: &[f64]| v.iter().map(|&x| fmt_float(x)).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("t_grid", floats(&self.t_grid));
        put("k_max", self.k_max.to_string());
        put("levels", self.levels.to_string());
        if let Some(h) = self.h {
            put("h", fmt_float(h));
        }
        put("rho_margin_factor", fmt_float(self.rho_margin_factor));
        put("tol", fmt_float(self.tol));
        put("lambda", fmt_float(self.lambda));
        put("lambda0", fmt_float(self.lambda0));
        if !self.windows.is_empty() {
            let w: Vec<String> = self.windows.iter().map(|(a, b)| format!("{}:{}", fmt_float(*a), fmt_float(*b))).collect();
            put("windows", w.join(", "));
        }
        put("mass_window", fmt_float(self.mass_window));
        put("mass_levels", self.mass_levels.to_string());
        put("smooth_basis", fmt_basis(&self.smooth_basis));
        put("log_basis", fmt_basis(&self.log_basis));
        put("output_dir", self.output_dir.display().to_string());
        s
    }

    pub fn lab_params(&self) -> LabParams {
        LabParams {
            k_max: self.k_max,
            levels: self.levels,
            grid: self.h.map_or(GridSpec::default(), GridSpec::Spacing),
            margin: self.rho_margin_factor,
            tol: self.tol,
            vector_levels: 0,
        }
    }
}
