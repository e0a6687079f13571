//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::ModelParams;
use crate::error::{Error, Result};
use crate::riemann::Dimension;
use crate::rootfinder::{DEFAULT_MAX_ITER, DEFAULT_TOL};

pub const KEYS: [&str; 15] = [
    "dimension",
    "theta0",
    "c",
    "b",
    "epsilon",
    "eps_ladder",
    "tol",
    "max_iter",
    "scan_min",
    "scan_max",
    "grid_n",
    "energy_re",
    "energy_im",
    "out",
    "format",
];

pub const MIN_GRID: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidConfig(format!(
                "format must be csv or json, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Raw key/value pairs before validation. Later insertions win.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigMap(pub BTreeMap<String, String>);

impl ConfigMap {
    pub fn parse(text: &str) -> Result<ConfigMap> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            let key = k.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidConfig(format!("line {}: unknown key {key:?}", n + 1)));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(ConfigMap(map))
    }

    pub fn load(path: &Path) -> Result<ConfigMap> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        ConfigMap::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn merge(&mut self, other: &ConfigMap) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {v:?}"))),
        }
    }
}

/// Validated settings for one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: ModelParams,
    /// Set when `epsilon` was given; `params.epsilon` is 0 otherwise.
    pub epsilon_given: bool,
    pub eps_ladder: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub scan_min: f64,
    pub scan_max: f64,
    pub grid_n: usize,
    #[serde(with = "crate::riemann::complex_serde")]
    pub energy: Complex64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Parses a ladder given either as a comma separated list or as
/// `start:stop:count`, log-spaced from start down to stop.
pub fn parse_ladder(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("eps_ladder: cannot parse {text:?}"));
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if n < 2 || !(start > 0.0) || !(stop > 0.0) {
            return Err(bad());
        }
        let (l0, l1) = (start.log10(), stop.log10());
        return Ok((0..n)
            .map(|k| 10f64.powf(l0 + (l1 - l0) * k as f64 / (n - 1) as f64))
            .collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

impl RunConfig {
    pub fn from_map(map: &ConfigMap) -> Result<RunConfig> {
        let d: u8 = map
            .get("dimension")?
            .ok_or_else(|| Error::InvalidConfig("dimension is required".into()))?;
        let d = Dimension::try_from(d).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let theta0: f64 = map
            .get("theta0")?
            .ok_or_else(|| Error::InvalidConfig("theta0 is required".into()))?;
        let c: f64 = map
            .get("c")?
            .ok_or_else(|| Error::InvalidConfig("c is required".into()))?;
        let b: f64 = map.get("b")?.unwrap_or(1.0);
        let epsilon: Option<f64> = map.get("epsilon")?;
        let eps_ladder = match map.0.get("eps_ladder") {
            Some(s) => parse_ladder(s)?,
            None => Vec::new(),
        };
        let format = match map.0.get("format") {
            Some(s) => s.parse()?,
            None => Format::Csv,
        };
        let out = map
            .0
            .get("out")
            .filter(|s| !s.is_empty() && s.as_str() != "-")
            .map(PathBuf::from);
        let cfg = RunConfig {
            params: ModelParams::new(d, theta0, c, epsilon.unwrap_or(0.0)).with_b(b),
            epsilon_given: epsilon.is_some(),
            eps_ladder,
            tol: map.get("tol")?.unwrap_or(DEFAULT_TOL),
            max_iter: map.get("max_iter")?.unwrap_or(DEFAULT_MAX_ITER),
            scan_min: map.get("scan_min")?.unwrap_or(1e-6),
            scan_max: map.get("scan_max")?.unwrap_or(10.0),
            grid_n: map.get("grid_n")?.unwrap_or(128),
            energy: Complex64::new(
                map.get("energy_re")?.unwrap_or(-0.5),
                map.get("energy_im")?.unwrap_or(0.0),
            ),
            out,
            format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if self.eps_ladder.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidConfig("eps_ladder entries must be positive".into()));
        }
        if self.eps_ladder.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidConfig("eps_ladder must be strictly decreasing".into()));
        }
        if self.grid_n < MIN_GRID {
            return Err(Error::InvalidConfig(format!("grid_n must be at least {MIN_GRID}")));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.scan_min > 0.0 && self.scan_min < self.scan_max && self.scan_max.is_finite()) {
            return Err(Error::InvalidConfig("need 0 < scan_min < scan_max".into()));
        }
        if !(self.energy.re.is_finite() && self.energy.im.is_finite()) {
            return Err(Error::InvalidConfig("energy must be finite".into()));
        }
        Ok(())
    }

    /// Parameters for a single-point command; epsilon must have been given.
    pub fn point_params(&self) -> Result<ModelParams> {
        if !self.epsilon_given {
            return Err(Error::InvalidConfig("epsilon is required for this command".into()));
        }
        Ok(self.params)
    }

    pub fn ladder(&self) -> Result<&[f64]> {
        if self.eps_ladder.is_empty() {
            return Err(Error::InvalidConfig("eps_ladder is required for this command".into()));
        }
        Ok(&self.eps_ladder)
    }

    /// The configuration as `key = value` text that parses back to `self`.
    /// Floats use the shortest representation that round-trips.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let p = &self.params;
        m.insert("dimension".into(), p.d.to_string());
        m.insert("theta0".into(), format!("{:?}", p.theta0));
        m.insert("c".into(), format!("{:?}", p.c));
        m.insert("b".into(), format!("{:?}", p.b));
        if self.epsilon_given {
            m.insert("epsilon".into(), format!("{:?}", p.epsilon));
        }
        if !self.eps_ladder.is_empty() {
            let l: Vec<String> = self.eps_ladder.iter().map(|e| format!("{e:?}")).collect();
            m.insert("eps_ladder".into(), l.join(","));
        }
        m.insert("tol".into(), format!("{:?}", self.tol));
        m.insert("max_iter".into(), self.max_iter.to_string());
        m.insert("scan_min".into(), format!("{:?}", self.scan_min));
        m.insert("scan_max".into(), format!("{:?}", self.scan_max));
        m.insert("grid_n".into(), self.grid_n.to_string());
        m.insert("energy_re".into(), format!("{:?}", self.energy.re));
        m.insert("energy_im".into(), format!("{:?}", self.energy.im));
        if let Some(o) = &self.out {
            m.insert("out".into(), o.display().to_string());
        }
        m.insert("format".into(), self.format.to_string());
        m
    }

    pub fn echo_text(&self) -> String {
        self.echo().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// The same run at a different epsilon.
    pub fn at_epsilon(&self, epsilon: f64) -> RunConfig {
        let mut c = self.clone();
        c.params = c.params.with_epsilon(epsilon);
        c.epsilon_given = true;
        c
    }
}
