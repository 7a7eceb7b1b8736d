use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::ledger::LEDGER_VERSION;

pub const TOOL: &str = "carnot-lab";

/// Self-describing result of one run. Re-running `config` reproduces `payload`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub payload: Value,
    pub ledger_version: u32,
    /// Discrepancy-ledger entries this run exercises.
    pub ledger: Vec<String>,
}

impl ReportBundle {
    pub fn new(config: ExperimentConfig, payload: Value, ledger: &[&str]) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: config.command.name().to_string(),
            config,
            payload,
            ledger_version: LEDGER_VERSION,
            ledger: ledger.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> LabResult<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn bundle_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.json", self.command))
    }

    /// Writes `<command>.json` into `dir` and returns its path.
    pub fn write(&self, dir: &Path) -> LabResult<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = self.bundle_path(dir);
        std::fs::write(&path, self.to_json()?)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut bundle: ReportBundle = serde_json::from_str(&text)?;
        if let Some(dir) = path.parent() {
            bundle.config.output_dir = dir.to_path_buf();
        }
        Ok(bundle)
    }
}

fn num(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn array<'a>(v: &'a Value, key: &str) -> LabResult<&'a Vec<Value>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| LabError::Unsupported(format!("payload has no array {key:?}")))
}

/// Plot-ready CSV for tabular payloads.
///
/// * growth: `r,count`
/// * volume: `log_r,log_vol,fit_log_vol,residual`
/// * ccdist survey: `pair,lower,value,upper`; single pair: the witness path `t,x,y,z`
/// * verify-all: `id,title,passed`
pub fn emit_plot_table(bundle: &ReportBundle) -> LabResult<String> {
    let p = &bundle.payload;
    let mut out = String::new();
    match bundle.command.as_str() {
        "growth" => {
            out.push_str("r,count\n");
            let table = p
                .get("table")
                .ok_or_else(|| LabError::Unsupported("growth payload has no table".into()))?;
            for (r, n) in array(table, "radii")?.iter().zip(array(table, "counts")?) {
                writeln!(out, "{},{}", num(r), num(n)).unwrap();
            }
        }
        "volume" => {
            out.push_str("log_r,log_vol,fit_log_vol,residual\n");
            let slope = p["fit"]["slope"].as_f64().unwrap_or(f64::NAN);
            let intercept = p["fit"]["intercept"].as_f64().unwrap_or(f64::NAN);
            for row in array(p, "rows")? {
                let (r, v) = (row["radius"].as_f64(), row["volume"].as_f64());
                let (Some(r), Some(v)) = (r, v) else {
                    return Err(LabError::Unsupported("volume row without radius/volume".into()));
                };
                let (x, y) = (r.ln(), v.ln());
                let fit = intercept + slope * x;
                writeln!(out, "{x},{y},{fit},{}", y - fit).unwrap();
            }
        }
        "ccdist" => {
            if let Some(pairs) = p.get("pairs").and_then(Value::as_array) {
                out.push_str("pair,lower,value,upper\n");
                for (i, pair) in pairs.iter().enumerate() {
                    writeln!(out, "{i},{},{},{}", num(&pair["lower"]), num(&pair["dist"]), num(&pair["upper"])).unwrap();
                }
            } else {
                out.push_str("t,x,y,z\n");
                for row in array(p, "path")? {
                    let cells: Vec<String> = row
                        .as_array()
                        .ok_or_else(|| LabError::Unsupported("path rows must be arrays".into()))?
                        .iter()
                        .map(num)
                        .collect();
                    writeln!(out, "{}", cells.join(",")).unwrap();
                }
            }
        }
        "verify-all" => {
            out.push_str("id,title,passed\n");
            for c in array(p, "criteria")? {
                let title = c["title"].as_str().unwrap_or_default().replace('"', "'");
                writeln!(out, "{},\"{}\",{}", num(&c["id"]), title, num(&c["passed"])).unwrap();
            }
        }
        other => return Err(LabError::Unsupported(format!("{other} payload is not tabular"))),
    }
    Ok(out)
}
