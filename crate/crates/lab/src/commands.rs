//! Dispatch from a resolved [`ExperimentConfig`] to the library.

use std::path::Path;
use std::time::{Duration, Instant};

use carnot_core::cayley::{anisotropy, growth_fit, word_ball, GeneratingSet, ZGroupElement};
use carnot_core::heisenberg::{commutator, log_map, psi, psi_inv, HeisMatrix, HeisPoint};
use carnot_core::pansu::{jackson_profile, pansu_derivative, BlowupSchedule, GroupMap};
use carnot_core::q_algebra::{
    abe_bgs, abe_entropy, bgs_entropy, q_add, q_inverse, rescaled_entropy, tilde_add, tsallis_entropy,
    ProbDist, QParam, ABE_BGS_STEP,
};
use carnot_core::subriemannian::{
    ball_volume_fit, cc_distance, circle_samples, holonomy, isoperimetric_check, CcOptions, VolumeOptions,
};
use carnot_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bundle::ReportBundle;
use crate::config::*;
use crate::error::{LabError, LabResult, ModuleContext};
use crate::ledger;
use crate::verify::{self, VerifyOptions};

/// Wall-clock information kept out of the bundle so bundles stay reproducible.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub wall_time_ms: f64,
    pub sections: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub bundle: ReportBundle,
    pub timing: Timing,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn parse_dist(text: &str, renormalize: bool) -> LabResult<ProbDist> {
    if let Some(n) = text.strip_prefix("uniform") {
        let n: usize = n
            .parse()
            .map_err(|_| LabError::Usage(format!("uniformN needs an integer N, got {text:?}")))?;
        return ProbDist::uniform(n).module("q_algebra");
    }
    if let Some(path) = text.strip_prefix("file:") {
        return ProbDist::from_path(Path::new(path), renormalize).module("q_algebra");
    }
    let weights = parse_f64_list(text)?;
    if renormalize {
        ProbDist::renormalized(weights)
    } else {
        ProbDist::new(weights)
    }
    .module("q_algebra")
}

fn qparam(q: f64) -> LabResult<QParam> {
    QParam::new(q).module("q_algebra")
}

fn entropy(c: &EntropyConfig) -> LabResult<Value> {
    let p = parse_dist(&c.dist, c.renormalize)?;
    let q = qparam(c.q)?;
    let abe = if q.is_bgs_limit() {
        abe_bgs(&p, ABE_BGS_STEP).module("q_algebra")?
    } else {
        abe_entropy(&p, q).module("q_algebra")?
    };
    Ok(json!({
        "weights": p.weights(),
        "q": c.q,
        "tsallis": tsallis_entropy(&p, q).module("q_algebra")?,
        "bgs": bgs_entropy(&p),
        "rescaled": rescaled_entropy(&p, q).module("q_algebra")?,
        "abe": abe,
    }))
}

fn qadd(c: &QaddConfig) -> LabResult<Value> {
    let q = qparam(c.q)?;
    Ok(json!({
        "x": c.x,
        "y": c.y,
        "q": c.q,
        "q_add": q_add(c.x, c.y, q),
        "q_inverse_x": q_inverse(c.x, q),
        "tilde_add": tilde_add(c.x, c.y),
    }))
}

fn group(c: &GroupConfig) -> LabResult<Value> {
    let (ga, gb) = match c.coords {
        Coords::Matrix => (
            HeisMatrix::new(c.a[0], c.a[1], c.a[2]),
            HeisMatrix::new(c.b[0], c.b[1], c.b[2]),
        ),
        Coords::Exp => (psi(&HeisPoint::from_array(c.a)), psi(&HeisPoint::from_array(c.b))),
    };
    let m = |g: HeisMatrix| [g.a, g.c, g.b];
    let e = |g: HeisMatrix| psi_inv(&g).to_array();
    let log = log_map(&ga);
    Ok(json!({
        "coords": c.coords,
        "matrix": {"a": m(ga), "b": m(gb), "product": m(ga.mul(&gb)), "inverse_a": m(ga.inv()), "commutator": m(commutator(&ga, &gb))},
        "exp": {"a": e(ga), "b": e(gb), "product": e(ga.mul(&gb)), "inverse_a": e(ga.inv()), "commutator": e(commutator(&ga, &gb))},
        "log_a": [log.alpha, log.beta, log.gamma],
    }))
}

fn ccdist(c: &CcdistConfig, seed: u64) -> LabResult<Value> {
    let opts = CcOptions {
        segments: c.segments,
        endpoint_tol: c.tol,
        norm: c.norm,
        ..CcOptions::default()
    };
    if c.pairs == 0 {
        let (a, b) = (HeisPoint::from_array(c.a), HeisPoint::from_array(c.b));
        let d = cc_distance(&a, &b, &opts).module("subriemannian")?;
        let path: Vec<[f64; 4]> = d
            .witness
            .trace(1)
            .into_iter()
            .map(|(t, p)| [t, p.x, p.y, p.z])
            .collect();
        return Ok(json!({
            "A": c.a,
            "B": c.b,
            "dist": d.value,
            "lower": d.lower,
            "upper": d.upper,
            "endpoint_error": d.endpoint_error,
            "degraded": d.degraded,
            "start": d.start,
            "path": path,
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(c.pairs);
    for _ in 0..c.pairs {
        let mut draw = || [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
        let (a, b) = (draw(), draw());
        let d = cc_distance(&HeisPoint::from_array(a), &HeisPoint::from_array(b), &opts).module("subriemannian")?;
        pairs.push(json!({"A": a, "B": b, "dist": d.value, "lower": d.lower, "upper": d.upper, "degraded": d.degraded}));
    }
    Ok(json!({ "pairs": pairs }))
}

fn read_polygon(path: &Path) -> LabResult<Vec<[f64; 2]>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| {
            let v = parse_f64_list(l)?;
            <[f64; 2]>::try_from(v).map_err(|_| LabError::Usage(format!("polygon rows need x,y: {l:?}")))
        })
        .collect()
}

fn holonomy_cmd(c: &HolonomyConfig) -> LabResult<Value> {
    let pts = match c.shape {
        Shape::Circle => circle_samples([0.0, 0.0], c.radius, c.samples, false),
        Shape::Square => {
            let r = c.radius;
            vec![[0.0, 0.0], [r, 0.0], [r, r], [0.0, r], [0.0, 0.0]]
        }
        Shape::Polygon => {
            let file = c
                .file
                .as_ref()
                .ok_or_else(|| LabError::Usage("polygon shape needs --file".into()))?;
            read_polygon(file)?
        }
    };
    let hol = holonomy(&pts).module("subriemannian")?;
    let iso = isoperimetric_check(&pts).module("subriemannian")?;
    Ok(json!({
        "shape": c.shape,
        "vertices": pts.len(),
        "holonomy": hol,
        "isoperimetric": iso,
    }))
}

fn volume(c: &VolumeConfig, seed: u64) -> LabResult<Value> {
    let opts = VolumeOptions {
        samples: c.samples,
        seed,
        segments: c.segments,
    };
    let fit = ball_volume_fit(c.metric, &c.radii, &opts).module("subriemannian")?;
    Ok(serde_json::to_value(fit)?)
}

pub fn build_map(c: &PansuConfig) -> LabResult<GroupMap> {
    match c.map.as_str() {
        "square" => Ok(GroupMap::square(c.kind)),
        "identity" => Ok(GroupMap::identity(c.kind)),
        "custom-polynomial" => GroupMap::polynomial(c.kind, c.coeffs.clone()).module("pansu"),
        other => Err(LabError::Usage(format!(
            "map must be square, identity or custom-polynomial, got {other:?}"
        ))),
    }
}

pub fn build_schedule(c: &PansuConfig) -> LabResult<BlowupSchedule> {
    if let Some(n) = c.schedule.strip_prefix("dyadic:") {
        let n: usize = n
            .parse()
            .map_err(|_| LabError::Usage(format!("dyadic:N needs an integer, got {:?}", c.schedule)))?;
        return BlowupSchedule::dyadic(n, c.convention).module("pansu");
    }
    BlowupSchedule::new(parse_f64_list(&c.schedule)?, c.convention).module("pansu")
}

fn pansu(c: &PansuConfig) -> LabResult<Value> {
    let f = build_map(c)?;
    let sched = build_schedule(c)?;
    let d = pansu_derivative(&f, c.base, c.dir, &sched).module("pansu")?;
    let mut jackson = Vec::new();
    for &x0 in c.base.iter().filter(|x| **x != 0.0) {
        let prof = jackson_profile(|x| f.component(x), x0, &[0.5, 0.9, 1.1, 2.0]).module("pansu")?;
        jackson.push(json!({"x0": x0, "profile": prof.rows, "limit": prof.extrapolant.value}));
    }
    Ok(json!({
        "map": f.name,
        "kind": c.kind,
        "convention": c.convention,
        "base": c.base,
        "dir": c.dir,
        "matrix": d.matrix,
        "spread": d.spread,
        "per_entry_order": d.per_entry_order,
        "steps": d.steps,
        "jackson": jackson,
    }))
}

fn growth(c: &GrowthConfig, config: &ExperimentConfig) -> LabResult<Value> {
    let gens = if c.gens.is_empty() {
        c.group.standard_generators()
    } else {
        GeneratingSet::new(c.group, c.gens.iter().map(|&g| ZGroupElement::from(g)).collect()).module("cayley_growth")?
    };
    let covered = |radius: u32| radius >= c.fit_window.1;
    match word_ball(&gens, c.radius, c.mem_budget) {
        Ok(table) => {
            let (fit, aniso) = if covered(c.radius) {
                (
                    Some(growth_fit(&table, c.fit_window.0, c.fit_window.1).module("cayley_growth")?),
                    Some(anisotropy(&table, c.fit_window.0, c.fit_window.1).module("cayley_growth")?),
                )
            } else {
                (None, None)
            };
            Ok(json!({"table": table, "fit": fit, "anisotropy": aniso}))
        }
        Err(CoreError::Budget { budget_bytes, radius, partial }) => {
            let payload = json!({
                "table": partial,
                "fit": Value::Null,
                "anisotropy": Value::Null,
                "truncated": {"radius": radius, "budget_bytes": budget_bytes},
            });
            Err(LabError::Truncated {
                bundle: Box::new(ReportBundle::new(config.clone(), payload, &[])),
                message: format!("memory budget of {budget_bytes} bytes exceeded at radius {radius}"),
            })
        }
        Err(e) => Err(LabError::Core { module: "cayley_growth", source: e }),
    }
}

fn verify_all(c: &VerifyConfig, seed: u64, timing: &mut Timing) -> LabResult<(Value, Vec<String>)> {
    let opts = VerifyOptions {
        seed,
        volume_samples: c.volume_samples,
    };
    let (results, times) = verify::run_all(&opts)?;
    let mut touched: Vec<String> = results.iter().flat_map(|r| r.ledger.clone()).collect();
    touched.sort();
    touched.dedup();
    for (r, t) in results.iter().zip(&times) {
        timing.sections.push((format!("criterion-{}", r.id), ms(*t)));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let payload = json!({
        "criteria": results,
        "passed": passed,
        "total": results.len(),
        "all_passed": passed == results.len(),
    });
    Ok((payload, touched))
}

/// Executes one configured command.
pub fn run(config: &ExperimentConfig) -> LabResult<RunOutput> {
    let started = Instant::now();
    let mut timing = Timing::default();
    let seed = config.seed;
    let (payload, ledger_ids): (Value, Vec<String>) = match &config.command {
        CommandConfig::Entropy(c) => (entropy(c)?, vec![]),
        CommandConfig::Qadd(c) => (qadd(c)?, vec![]),
        CommandConfig::Group(c) => (group(c)?, vec![ledger::COMMUTATOR_DIAGONAL.into()]),
        CommandConfig::Ccdist(c) => (ccdist(c, seed)?, vec![]),
        CommandConfig::Holonomy(c) => (holonomy_cmd(c)?, vec![]),
        CommandConfig::Volume(c) => (volume(c, seed)?, vec![]),
        CommandConfig::Pansu(c) => (
            pansu(c)?,
            [ledger::BLOWUP_DIRECTION, ledger::DILATION_CONVENTION, ledger::JACKSON_AT_ZERO]
                .map(String::from)
                .to_vec(),
        ),
        CommandConfig::Growth(c) => (growth(c, config)?, vec![]),
        CommandConfig::VerifyAll(c) => verify_all(c, seed, &mut timing)?,
    };
    let ids: Vec<&str> = ledger_ids.iter().map(String::as_str).collect();
    let bundle = ReportBundle::new(config.clone(), payload, &ids);
    timing.wall_time_ms = ms(started.elapsed());
    Ok(RunOutput { bundle, timing })
}
