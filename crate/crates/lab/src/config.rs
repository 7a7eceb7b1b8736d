//! Experiment configuration: a flat TOML file of `key = value` pairs, resolved
//! per command with precedence flags > file > defaults. `CARNOT_LAB_OUTPUT`
//! sits between flags and file for the output directory.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

pub const OUTPUT_ENV: &str = "CARNOT_LAB_OUTPUT";
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_OUTPUT_DIR: &str = "carnot-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = LabError;

    fn from_str(s: &str) -> LabResult<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(LabError::Usage(format!("format must be json or csv, got {other:?}"))),
        }
    }
}

/// Values read from a config file. Only scalars and arrays of scalars are allowed.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    table: toml::Table,
}

impl Settings {
    pub fn parse(text: &str) -> LabResult<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| LabError::Usage(format!("config is not valid TOML: {e}")))?;
        for (key, value) in &table {
            let nested = match value {
                toml::Value::Table(_) => true,
                toml::Value::Array(items) => items
                    .iter()
                    .any(|v| matches!(v, toml::Value::Table(_) | toml::Value::Array(_))),
                _ => false,
            };
            if nested {
                return Err(LabError::Usage(format!("config key {key:?} must be a scalar or flat list")));
            }
        }
        Ok(Self { table })
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn bad(key: &str, want: &str, got: &toml::Value) -> LabError {
        LabError::Usage(format!("config key {key:?} must be {want}, got {got}"))
    }

    pub fn f64(&self, key: &str) -> LabResult<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(*x)),
            Some(toml::Value::Integer(n)) => Ok(Some(*n as f64)),
            Some(v) => Err(Self::bad(key, "a number", v)),
        }
    }

    pub fn u64(&self, key: &str) -> LabResult<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(n)) if *n >= 0 => Ok(Some(*n as u64)),
            Some(v) => Err(Self::bad(key, "a non-negative integer", v)),
        }
    }

    pub fn string(&self, key: &str) -> LabResult<Option<String>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(Self::bad(key, "a string", v)),
        }
    }

    /// A list of numbers, given either as a TOML array or a comma-separated string.
    pub fn f64_list(&self, key: &str) -> LabResult<Option<Vec<f64>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    toml::Value::Float(x) => Ok(*x),
                    toml::Value::Integer(n) => Ok(*n as f64),
                    other => Err(Self::bad(key, "a list of numbers", other)),
                })
                .collect::<LabResult<Vec<_>>>()
                .map(Some),
            Some(toml::Value::String(s)) => parse_f64_list(s).map(Some),
            Some(v) => Err(Self::bad(key, "a list of numbers", v)),
        }
    }
}

pub fn parse_f64_list(s: &str) -> LabResult<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| LabError::Usage(format!("not a number: {part:?} in {s:?}")))
        })
        .collect()
}

pub fn parse_triple(s: &str) -> LabResult<[f64; 3]> {
    let v = parse_f64_list(s)?;
    <[f64; 3]>::try_from(v).map_err(|_| LabError::Usage(format!("expected three numbers, got {s:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyConfig {
    /// `uniformN`, `file:PATH` or comma-separated weights.
    pub dist: String,
    pub q: f64,
    pub renormalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaddConfig {
    pub x: f64,
    pub y: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    /// Matrix entries (a, c, b).
    Matrix,
    /// Exponential coordinates (x, y, z).
    Exp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupConfig {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub coords: Coords,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdistConfig {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub segments: usize,
    pub tol: f64,
    pub norm: carnot_core::subriemannian::NormKind,
    /// Random survey size; 0 computes the single pair `a`, `b`.
    pub pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Square,
    /// Closed polyline read from `file` (CSV rows `x,y`).
    Polygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyConfig {
    pub shape: Shape,
    pub radius: f64,
    pub samples: usize,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeConfig {
    pub metric: carnot_core::subriemannian::BallMetric,
    pub radii: Vec<f64>,
    pub samples: usize,
    pub segments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PansuConfig {
    /// `square`, `identity` or `custom-polynomial` with `coeffs`.
    pub map: String,
    pub coeffs: Vec<f64>,
    pub kind: carnot_core::pansu::MapKind,
    pub base: [f64; 3],
    pub dir: [f64; 3],
    pub convention: carnot_core::pansu::Convention,
    /// Either `dyadic:N` or a comma-separated decreasing list of scales.
    pub schedule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub group: carnot_core::cayley::Group,
    pub radius: u32,
    /// Extra or replacement generators; empty means the standard set.
    pub gens: Vec<[i64; 3]>,
    pub fit_window: (u32, u32),
    pub mem_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub volume_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandConfig {
    Entropy(EntropyConfig),
    Qadd(QaddConfig),
    Group(GroupConfig),
    Ccdist(CcdistConfig),
    Holonomy(HolonomyConfig),
    Volume(VolumeConfig),
    Pansu(PansuConfig),
    Growth(GrowthConfig),
    VerifyAll(VerifyConfig),
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Entropy(_) => "entropy",
            CommandConfig::Qadd(_) => "qadd",
            CommandConfig::Group(_) => "group",
            CommandConfig::Ccdist(_) => "ccdist",
            CommandConfig::Holonomy(_) => "holonomy",
            CommandConfig::Volume(_) => "volume",
            CommandConfig::Pansu(_) => "pansu",
            CommandConfig::Growth(_) => "growth",
            CommandConfig::VerifyAll(_) => "verify-all",
        }
    }
}

/// Fully resolved configuration of one run.
///
/// The output directory says where results go, not what they are, so it is
/// left out of the serialised echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub format: Format,
    pub command: CommandConfig,
}

/// Resolves the output directory: flag, then environment, then file, then default.
pub fn resolve_output_dir(flag: Option<PathBuf>, env: Option<String>, settings: &Settings) -> LabResult<PathBuf> {
    if let Some(dir) = flag {
        return Ok(dir);
    }
    if let Some(dir) = env.filter(|s| !s.is_empty()) {
        return Ok(PathBuf::from(dir));
    }
    Ok(settings
        .string("output_dir")?
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_settings() {
        let s = Settings::parse("seed = 7\nradii = [0.5, 1, 2]\ntol = \"x\"\ngens = \"1,2\"").unwrap();
        assert_eq!(s.u64("seed").unwrap(), Some(7));
        assert_eq!(s.f64_list("radii").unwrap(), Some(vec![0.5, 1.0, 2.0]));
        assert!(s.f64("tol").is_err());
        assert_eq!(s.f64_list("gens").unwrap(), Some(vec![1.0, 2.0]));
        assert_eq!(s.f64("missing").unwrap(), None);
        assert!(Settings::parse("[section]\nkey = 1").is_err());
    }

    #[test]
    fn output_dir_precedence() {
        let s = Settings::parse("output_dir = \"from-file\"").unwrap();
        let flag = Some(PathBuf::from("flag"));
        assert_eq!(resolve_output_dir(flag, Some("env".into()), &s).unwrap(), PathBuf::from("flag"));
        assert_eq!(resolve_output_dir(None, Some("env".into()), &s).unwrap(), PathBuf::from("env"));
        assert_eq!(resolve_output_dir(None, None, &s).unwrap(), PathBuf::from("from-file"));
        assert_eq!(
            resolve_output_dir(None, None, &Settings::default()).unwrap(),
            PathBuf::from(DEFAULT_OUTPUT_DIR)
        );
    }

    #[test]
    fn config_round_trips() {
        let cfg = ExperimentConfig {
            seed: 3,
            output_dir: PathBuf::new(),
            format: Format::Csv,
            command: CommandConfig::Qadd(QaddConfig { x: 0.5, y: 0.25, q: 2.0 }),
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"name\":\"qadd\""));
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
