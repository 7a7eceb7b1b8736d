//! Command-line surface. Every flag is optional so that an explicit flag can
//! be told apart from a config-file value or a default.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::bundle::emit_plot_table;
use crate::commands::{run, RunOutput};
use crate::config::*;
use crate::error::{LabError, LabResult};

#[derive(Debug, Parser)]
#[command(name = "carnot-lab", version, about = "Heisenberg-group and q-entropy experiments")]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for report bundles (overrides CARNOT_LAB_OUTPUT and the config file).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Stdout format: the JSON bundle or its plot table as CSV.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat TOML file of key = value defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tsallis, BGS and Abe entropies of a distribution.
    Entropy(EntropyArgs),
    /// q-addition of two reals.
    Qadd(QaddArgs),
    /// Products, inverses and commutators in the Heisenberg group.
    Group(GroupArgs),
    /// Carnot–Carathéodory distance for one pair or a random survey.
    Ccdist(CcdistArgs),
    /// Holonomy of a closed planar loop and its isoperimetric defect.
    Holonomy(HolonomyArgs),
    /// Monte Carlo ball volumes and their scaling exponent.
    Volume(VolumeArgs),
    /// Numerical Pansu derivative.
    Pansu(PansuArgs),
    /// Word-metric ball growth.
    Growth(GrowthArgs),
    /// Runs every acceptance criterion and emits the pass/fail matrix.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// uniformN, file:PATH or comma-separated weights.
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct QaddArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// First element as three comma-separated numbers.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, value_enum)]
    pub coords: Option<Coords>,
}

#[derive(Debug, Args)]
pub struct CcdistArgs {
    /// Start point x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// End point x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long)]
    pub segments: Option<usize>,
    /// Endpoint tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// l2, l1 or linf.
    #[arg(long)]
    pub norm: Option<String>,
    /// Number of random pairs to survey instead of a single pair.
    #[arg(long)]
    pub pairs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HolonomyArgs {
    #[arg(long, value_enum)]
    pub shape: Option<Shape>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// CSV of x,y rows for the polygon shape.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    /// cc or euclidean.
    #[arg(long)]
    pub metric: Option<String>,
    /// Comma-separated radii.
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub segments: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PansuArgs {
    /// square, identity, or custom-polynomial c0,c1,... (also written custom-polynomial:c0,c1,...).
    #[arg(long, num_args = 1..=2)]
    pub map: Option<Vec<String>>,
    /// heis_to_abelian or abelian_to_abelian.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dir: Option<String>,
    /// source_graded or source_linear.
    #[arg(long)]
    pub convention: Option<String>,
    /// dyadic:N or a comma-separated decreasing list of scales.
    #[arg(long)]
    pub schedule: Option<String>,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    /// heis_Z or z3.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub radius: Option<u32>,
    /// Generators as a,c,b triples separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    pub gens: Option<String>,
    /// r_min,r_max.
    #[arg(long)]
    pub fit_window: Option<String>,
    /// Memory budget in bytes.
    #[arg(long)]
    pub mem_budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Monte Carlo samples per radius in the volume criterion.
    #[arg(long)]
    pub samples: Option<usize>,
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn parse_with<T: FromStr>(s: String, what: &str) -> LabResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| LabError::Usage(format!("bad {what}: {e}")))
}

fn triple(flag: Option<String>, s: &Settings, key: &str, default: [f64; 3]) -> LabResult<[f64; 3]> {
    match flag {
        Some(text) => parse_triple(&text),
        None => match s.f64_list(key)? {
            Some(v) => <[f64; 3]>::try_from(v)
                .map_err(|_| LabError::Usage(format!("config key {key:?} needs three numbers"))),
            None => Ok(default),
        },
    }
}

fn parse_gens(text: &str) -> LabResult<Vec<[i64; 3]>> {
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let parts: Vec<i64> = t
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| LabError::Usage(format!("generator {t:?} must be three integers")))?;
            <[i64; 3]>::try_from(parts).map_err(|_| LabError::Usage(format!("generator {t:?} must be three integers")))
        })
        .collect()
}

fn window(text: &str) -> LabResult<(u32, u32)> {
    let v: Vec<u32> = text
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| LabError::Usage(format!("fit window must be r_min,r_max, got {text:?}")))?;
    match v[..] {
        [lo, hi] => Ok((lo, hi)),
        _ => Err(LabError::Usage(format!("fit window must be r_min,r_max, got {text:?}"))),
    }
}

/// Applies flags over config-file values over defaults.
pub fn resolve(cli: Cli, env_output: Option<String>) -> LabResult<ExperimentConfig> {
    let s = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let seed = pick(cli.seed, s.u64("seed")?, DEFAULT_SEED);
    let output_dir = resolve_output_dir(cli.output_dir, env_output, &s)?;
    let format = match cli.format {
        Some(f) => f,
        None => s.string("format")?.map(|f| f.parse()).transpose()?.unwrap_or_default(),
    };
    let command = match cli.command {
        Command::Entropy(a) => CommandConfig::Entropy(EntropyConfig {
            dist: pick(a.dist, s.string("dist")?, "uniform2".into()),
            q: pick(a.q, s.f64("q")?, 2.0),
            renormalize: a.renormalize || s.string("renormalize")?.is_some_and(|v| v == "true"),
        }),
        Command::Qadd(a) => CommandConfig::Qadd(QaddConfig {
            x: a.x.or(s.f64("x")?).ok_or_else(|| LabError::Usage("qadd needs --x".into()))?,
            y: a.y.or(s.f64("y")?).ok_or_else(|| LabError::Usage("qadd needs --y".into()))?,
            q: pick(a.q, s.f64("q")?, 1.0),
        }),
        Command::Group(a) => CommandConfig::Group(GroupConfig {
            a: triple(a.a, &s, "a", [1.0, 0.0, 0.0])?,
            b: triple(a.b, &s, "b", [0.0, 1.0, 0.0])?,
            coords: match a.coords {
                Some(c) => c,
                None => match s.string("coords")?.as_deref() {
                    None | Some("matrix") => Coords::Matrix,
                    Some("exp") => Coords::Exp,
                    Some(other) => return Err(LabError::Usage(format!("coords must be matrix or exp, got {other:?}"))),
                },
            },
        }),
        Command::Ccdist(a) => CommandConfig::Ccdist(CcdistConfig {
            a: triple(a.a, &s, "a", [0.0; 3])?,
            b: triple(a.b, &s, "b", [0.0, 0.0, 1.0])?,
            segments: pick(a.segments, s.u64("segments")?.map(|n| n as usize), 64),
            tol: pick(a.tol, s.f64("tol")?, 1e-6),
            norm: parse_with(pick(a.norm, s.string("norm")?, "l2".into()), "norm")?,
            pairs: pick(a.pairs, s.u64("pairs")?.map(|n| n as usize), 0),
        }),
        Command::Holonomy(a) => CommandConfig::Holonomy(HolonomyConfig {
            shape: match a.shape {
                Some(sh) => sh,
                None => match s.string("shape")?.as_deref() {
                    None | Some("circle") => Shape::Circle,
                    Some("square") => Shape::Square,
                    Some("polygon") => Shape::Polygon,
                    Some(other) => return Err(LabError::Usage(format!("unknown shape {other:?}"))),
                },
            },
            radius: pick(a.radius, s.f64("radius")?, 1.0),
            samples: pick(a.samples, s.u64("samples")?.map(|n| n as usize), 10_000),
            file: a.file.or(s.string("file")?.map(PathBuf::from)),
        }),
        Command::Volume(a) => {
            let metric: carnot_core::subriemannian::BallMetric =
                parse_with(pick(a.metric, s.string("metric")?, "cc".into()), "metric")?;
            let default_radii = match metric {
                carnot_core::subriemannian::BallMetric::Cc => vec![0.5, 1.0, 2.0],
                carnot_core::subriemannian::BallMetric::Euclidean => vec![1.0, 2.0, 4.0],
            };
            let radii = match a.radii {
                Some(text) => parse_f64_list(&text)?,
                None => s.f64_list("radii")?.unwrap_or(default_radii),
            };
            CommandConfig::Volume(VolumeConfig {
                metric,
                radii,
                samples: pick(a.samples, s.u64("samples")?.map(|n| n as usize), 100_000),
                segments: pick(a.segments, s.u64("segments")?.map(|n| n as usize), 32),
            })
        }
        Command::Pansu(a) => {
            let (map, coeffs) = match a.map {
                Some(mut parts) => {
                    let mut name = parts.remove(0);
                    if let Some((head, tail)) = name.clone().split_once(':') {
                        name = head.to_string();
                        parts.push(tail.to_string());
                    }
                    let coeffs = match parts.pop() {
                        Some(c) => parse_f64_list(&c)?,
                        None => vec![],
                    };
                    (name, coeffs)
                }
                None => (
                    s.string("map")?.unwrap_or_else(|| "square".into()),
                    s.f64_list("coeffs")?.unwrap_or_default(),
                ),
            };
            if map == "custom-polynomial" && coeffs.is_empty() {
                return Err(LabError::Usage("custom-polynomial needs coefficients c0,c1,...".into()));
            }
            CommandConfig::Pansu(PansuConfig {
                map,
                coeffs,
                kind: parse_with(pick(a.kind, s.string("kind")?, "abelian_to_abelian".into()), "kind")?,
                base: triple(a.base, &s, "base", [1.0; 3])?,
                dir: triple(a.dir, &s, "dir", [1.0; 3])?,
                convention: parse_with(pick(a.convention, s.string("convention")?, "source_graded".into()), "convention")?,
                schedule: pick(a.schedule, s.string("schedule")?, "dyadic:24".into()),
            })
        }
        Command::Growth(a) => CommandConfig::Growth(GrowthConfig {
            group: parse_with(pick(a.group, s.string("group")?, "heis_Z".into()), "group")?,
            radius: pick(a.radius, s.u64("radius")?.map(|n| n as u32), 40),
            gens: match a.gens.or(s.string("gens")?) {
                Some(text) => parse_gens(&text)?,
                None => vec![],
            },
            fit_window: window(&pick(a.fit_window, s.string("fit_window")?, "10,30".into()))?,
            mem_budget: pick(a.mem_budget, s.u64("mem_budget")?, carnot_core::cayley::DEFAULT_BUDGET_BYTES),
        }),
        Command::VerifyAll(a) => CommandConfig::VerifyAll(VerifyConfig {
            volume_samples: pick(a.samples, s.u64("samples")?.map(|n| n as usize), 100_000),
        }),
    };
    Ok(ExperimentConfig {
        seed,
        output_dir,
        format,
        command,
    })
}

/// Peak resident set size from /proc, when available.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn write_timing(dir: &std::path::Path, command: &str, out: &RunOutput) -> LabResult<()> {
    let timing = serde_json::json!({
        "wall_time_ms": out.timing.wall_time_ms,
        "sections": out.timing.sections,
        "peak_rss_bytes": peak_rss_bytes(),
    });
    std::fs::write(
        dir.join(format!("{command}.timing.json")),
        serde_json::to_string_pretty(&timing)? + "\n",
    )?;
    Ok(())
}

/// Runs the command, writes `<command>.json` (and `.csv` for csv format) plus a
/// `<command>.timing.json` sidecar, and prints the result to `stdout`.
pub fn execute(config: ExperimentConfig, stdout: &mut impl Write) -> LabResult<RunOutput> {
    let out = match run(&config) {
        Err(LabError::Truncated { bundle, message }) => {
            bundle.write(&config.output_dir)?;
            return Err(LabError::Truncated { bundle, message });
        }
        other => other?,
    };
    let dir = &config.output_dir;
    out.bundle.write(dir)?;
    write_timing(dir, &out.bundle.command, &out)?;
    match config.format {
        Format::Json => stdout.write_all(out.bundle.to_json()?.as_bytes())?,
        Format::Csv => {
            let table = emit_plot_table(&out.bundle)?;
            std::fs::write(dir.join(format!("{}.csv", out.bundle.command)), &table)?;
            stdout.write_all(table.as_bytes())?;
        }
    }
    Ok(out)
}
