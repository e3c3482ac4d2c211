//! Flat `key = value` run configuration shared by the audit and evolve
//! commands, plus the deterministic digest that manifests reference.

use crate::error::{Error, Result};
use crate::evolution::{Integrator, SolverConfig};
use crate::lattice::Dealias;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const CONFIG_KEYS: &[&str] = &[
    "resolution",
    "viscosity",
    "dt",
    "t_end",
    "s_values",
    "dealias",
    "integrator",
    "seed_count",
    "spectrum_slope",
    "initial",
    "amplitude",
    "sample_every",
    "out_dir",
    "seed",
];

/// Parse `key = value` lines; `#` starts a comment, blank lines are
/// skipped, keys must be known and unique.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected 'key = value', got '{line}'", i + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("line {}: unknown key '{key}'", i + 1)));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text)
}

/// SHA-256 over the canonicalized (sorted, normalized) pairs.
pub fn config_digest(map: &BTreeMap<String, String>) -> String {
    let mut canonical = String::new();
    for (k, v) in map {
        let _ = writeln!(canonical, "{k}={v}");
    }
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let mut hex = String::new();
    for byte in hasher.finalize() {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

fn get_parsed<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T> {
    match map.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse()
            .map_err(|_| Error::Config(format!("bad value '{raw}' for key '{key}'"))),
    }
}

fn parse_s_values(map: &BTreeMap<String, String>, default: &[f64]) -> Result<Vec<f64>> {
    match map.get("s_values") {
        None => Ok(default.to_vec()),
        Some(raw) => raw
            .split(',')
            .map(|piece| {
                piece
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad s value '{piece}'")))
            })
            .collect(),
    }
}

/// Field source for evolve runs.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    TaylorGreen,
    Random,
    File(PathBuf),
}

impl InitialCondition {
    fn parse(text: &str) -> Result<Self> {
        match text {
            "taylor_green" => Ok(InitialCondition::TaylorGreen),
            "random" => Ok(InitialCondition::Random),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(InitialCondition::File(path.into())),
                _ => Err(Error::Config(format!(
                    "initial must be taylor_green, random or file:<path>, got '{other}'"
                ))),
            },
        }
    }
}

/// Settings consumed by `lab audit`.
#[derive(Clone, Debug)]
pub struct AuditRunConfig {
    pub resolution: usize,
    pub seed_count: u64,
    pub spectrum_slope: f64,
    pub s_values: Vec<f64>,
    pub dealias: Dealias,
    pub out_dir: PathBuf,
    pub digest: String,
}

impl AuditRunConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let dealias = match map.get("dealias") {
            None => Dealias::None,
            Some(raw) => Dealias::parse(raw)?,
        };
        let cfg = AuditRunConfig {
            resolution: get_parsed(map, "resolution", 8usize)?,
            seed_count: get_parsed(map, "seed_count", 20u64)?,
            spectrum_slope: get_parsed(map, "spectrum_slope", 3.0f64)?,
            s_values: parse_s_values(map, &[1.25, 1.5, 2.0, 2.5])?,
            dealias,
            out_dir: PathBuf::from(
                map.get("out_dir").cloned().unwrap_or_else(|| "lab_out".into()),
            ),
            digest: config_digest(map),
        };
        if cfg.seed_count == 0 {
            return Err(Error::Config("seed_count must be at least 1".into()));
        }
        if cfg.s_values.iter().any(|&s| !(s > 0.5)) {
            return Err(Error::Config(
                "audit s values must exceed 1/2 (homogeneous machinery)".into(),
            ));
        }
        Ok(cfg)
    }
}

/// Settings consumed by `lab evolve`.
#[derive(Clone, Debug)]
pub struct EvolveRunConfig {
    pub solver: SolverConfig,
    pub initial: InitialCondition,
    pub amplitude: f64,
    pub spectrum_slope: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub digest: String,
}

impl EvolveRunConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let dealias = match map.get("dealias") {
            None => Dealias::TwoThirds,
            Some(raw) => Dealias::parse(raw)?,
        };
        let integrator = match map.get("integrator") {
            None => Integrator::IfRk4,
            Some(raw) => Integrator::parse(raw)?,
        };
        let solver = SolverConfig {
            n: get_parsed(map, "resolution", 16usize)?,
            nu: get_parsed(map, "viscosity", 1.0f64)?,
            dt: get_parsed(map, "dt", 1e-3f64)?,
            t_end: get_parsed(map, "t_end", 0.5f64)?,
            s_values: parse_s_values(map, &[1.5])?,
            dealias,
            integrator,
            sample_every: get_parsed(map, "sample_every", 10usize)?,
        };
        solver.validate()?;
        let initial = match map.get("initial") {
            None => InitialCondition::TaylorGreen,
            Some(raw) => InitialCondition::parse(raw)?,
        };
        let amplitude = get_parsed(map, "amplitude", 1e-4f64)?;
        if !(amplitude > 0.0) {
            return Err(Error::Config(format!(
                "amplitude must be positive, got {amplitude}"
            )));
        }
        Ok(EvolveRunConfig {
            solver,
            initial,
            amplitude,
            spectrum_slope: get_parsed(map, "spectrum_slope", 3.0f64)?,
            seed: get_parsed(map, "seed", 1u64)?,
            out_dir: PathBuf::from(
                map.get("out_dir").cloned().unwrap_or_else(|| "lab_out".into()),
            ),
            digest: config_digest(map),
        })
    }
}
