//! Tsallis and Boltzmann–Gibbs–Shannon entropies of finite distributions, the
//! q-deformed addition that makes Tsallis entropy compose over independent
//! subsystems, and the Jackson-derivative form of the entropy (Abe's formula).
//!
//! Boltzmann's constant is fixed to 1. The removable singularity of the Tsallis
//! formula at q = 1 is resolved by switching to the BGS branch whenever
//! |q - 1| < [`Q_ONE_BAND`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, extrapolate_limit, Limit};

/// Normalisation tolerance for [`ProbDist`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Half-width of the band around q = 1 handled by the BGS limit branch.
pub const Q_ONE_BAND: f64 = 1e-8;

/// A finite discrete probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist", into = "RawDist")]
pub struct ProbDist {
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDist {
    weights: Vec<f64>,
}

impl TryFrom<RawDist> for ProbDist {
    type Error = Error;

    fn try_from(raw: RawDist) -> Result<Self> {
        ProbDist::new(raw.weights)
    }
}

impl From<ProbDist> for RawDist {
    fn from(p: ProbDist) -> Self {
        RawDist { weights: p.weights }
    }
}

impl ProbDist {
    /// Validates non-emptiness, finiteness, non-negativity and unit sum (within 1e-12).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::check_entries(&weights)?;
        let sum = compensated_sum(weights.iter().copied());
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!(
                "weights sum to {sum:.17}, not 1 within {NORMALIZATION_TOL:e}"
            )));
        }
        Ok(Self { weights })
    }

    /// Divides by the total mass. For inexact data read from files.
    pub fn renormalized(weights: Vec<f64>) -> Result<Self> {
        Self::check_entries(&weights)?;
        let sum = compensated_sum(weights.iter().copied());
        if sum <= 0.0 {
            return Err(Error::Domain("weights have zero total mass".into()));
        }
        Ok(Self {
            weights: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    /// Uniform distribution on `n` outcomes.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("uniform distribution needs n >= 1".into()));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    fn check_entries(weights: &[f64]) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::Domain("distribution has no weights".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::Domain(format!("weight {i} is {w}, must be finite and >= 0")));
        }
        Ok(())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reads `{"weights":[...]}` from `.json` files, otherwise one weight per line (CSV).
    /// Blank lines and lines starting with `#` are skipped.
    pub fn from_path(path: impl AsRef<Path>, renormalize: bool) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let weights = if is_json {
            serde_json::from_str::<RawDist>(&text)?.weights
        } else {
            parse_weight_lines(&text)?
        };
        if renormalize {
            Self::renormalized(weights)
        } else {
            Self::new(weights)
        }
    }
}

fn parse_weight_lines(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let field = l.split(',').next().unwrap_or(l).trim();
            field
                .parse::<f64>()
                .map_err(|e| Error::Input(format!("bad weight {field:?}: {e}")))
        })
        .collect()
}

/// The nonextensivity parameter q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::Domain(format!("q must be finite, got {q}")));
        }
        Ok(Self(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True when q lies in the band handled by the BGS limit.
    pub fn is_bgs_limit(self) -> bool {
        (self.0 - 1.0).abs() < Q_ONE_BAND
    }
}

/// Returns Σ (p_i^q − p_i) with 0^q := 0 for q > 0.
///
/// Computed termwise as p·expm1((q−1)·ln p) so that the difference keeps full
/// relative precision as q approaches 1.
fn partition_excess(p: &ProbDist, q: f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(p.len());
    for &w in p.weights() {
        if w == 0.0 {
            if q <= 0.0 {
                return Err(Error::Domain(format!(
                    "0^q is undefined for q = {q} <= 0 and the distribution has a zero weight"
                )));
            }
            continue;
        }
        terms.push(w * ((q - 1.0) * w.ln()).exp_m1());
    }
    Ok(compensated_sum(terms))
}

/// Boltzmann–Gibbs–Shannon entropy −Σ p ln p, with 0·ln 0 := 0.
pub fn bgs_entropy(p: &ProbDist) -> f64 {
    let s = -compensated_sum(
        p.weights()
            .iter()
            .filter(|w| **w > 0.0)
            .map(|w| w * w.ln()),
    );
    s.max(0.0)
}

/// Tsallis entropy (1 − Σ p^q)/(q − 1); the BGS entropy inside the q = 1 band.
pub fn tsallis_entropy(p: &ProbDist, q: QParam) -> Result<f64> {
    if q.is_bgs_limit() {
        return Ok(bgs_entropy(p));
    }
    let q = q.value();
    Ok(-partition_excess(p, q)? / (q - 1.0))
}

/// x ⊕_q y = x + y + (1 − q)xy.
pub fn q_add(x: f64, y: f64, q: QParam) -> f64 {
    x + y + (1.0 - q.value()) * x * y
}

/// Inverse of x under ⊕_q: −x / (1 + (1 − q)x). `None` where the denominator vanishes.
pub fn q_inverse(x: f64, q: QParam) -> Option<f64> {
    let denom = 1.0 + (1.0 - q.value()) * x;
    (denom != 0.0).then(|| -x / denom)
}

/// x ⊕̃ y = x + y + xy, the addition obeyed by the rescaled entropy.
pub fn tilde_add(x: f64, y: f64) -> f64 {
    x + y + x * y
}

/// (1 − q)·S_q(p).
pub fn rescaled_entropy(p: &ProbDist, q: QParam) -> Result<f64> {
    Ok((1.0 - q.value()) * tsallis_entropy(p, q)?)
}

/// Joint distribution of independent subsystems: {p_i r_j}, row-major.
pub fn product_dist(p: &ProbDist, r: &ProbDist) -> ProbDist {
    let weights = p
        .weights()
        .iter()
        .flat_map(|a| r.weights().iter().map(move |b| a * b))
        .collect();
    ProbDist { weights }
}

/// S_q(p⊗r) − [S_q(p) + S_q(r) + (1−q)S_q(p)S_q(r)].
pub fn composition_defect(p: &ProbDist, r: &ProbDist, q: QParam) -> Result<f64> {
    let joint = tsallis_entropy(&product_dist(p, r), q)?;
    let sp = tsallis_entropy(p, q)?;
    let sr = tsallis_entropy(r, q)?;
    Ok(joint - q_add(sp, sr, q))
}

/// Schedule t_k = 1 + offset·2^{−k}, k = 1..=steps, used for Jackson limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacksonSchedule {
    pub offset: f64,
    pub steps: usize,
    pub tol: f64,
}

impl Default for JacksonSchedule {
    fn default() -> Self {
        Self {
            offset: 1.0,
            steps: 20,
            tol: 1e-9,
        }
    }
}

impl JacksonSchedule {
    pub fn t_values(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.steps).map(move |k| 1.0 + self.offset * 0.5_f64.powi(k as i32))
    }
}

/// (f(tx) − f(x)) / (tx − x) at a fixed t ≠ 1.
pub fn jackson_quotient<F: Fn(f64) -> f64>(f: F, x: f64, t: f64) -> f64 {
    (f(t * x) - f(x)) / (t * x - x)
}

/// Limit of the Jackson quotient as t → 1, by Richardson extrapolation over `schedule`.
pub fn jackson_derivative<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    schedule: &JacksonSchedule,
) -> Result<Limit> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("Jackson derivative needs finite x != 0, got {x}")));
    }
    if schedule.offset == 0.0 || schedule.steps < 2 {
        return Err(Error::Input("Jackson schedule must have a nonzero offset and >= 2 steps".into()));
    }
    extrapolate_limit(
        schedule.t_values().map(|t| jackson_quotient(&f, x, t)),
        schedule.tol,
        "jackson derivative",
    )
}

/// Abe's form of the Tsallis entropy: minus the Jackson quotient of g(x) = Σ p_i^x
/// at x = 1 with dilation parameter t = q, i.e. −[Σ p^q − Σ p]/(q − 1).
pub fn abe_entropy(p: &ProbDist, q: QParam) -> Result<f64> {
    if q.is_bgs_limit() {
        return Err(Error::Domain(
            "Jackson quotient degenerates at q = 1; use abe_bgs".into(),
        ));
    }
    let q = q.value();
    // g(q·1) − g(1), accumulated termwise.
    let numerator = partition_excess(p, q)?;
    Ok(-numerator / (q * 1.0 - 1.0))
}

/// Step used by [`abe_bgs`].
pub const ABE_BGS_STEP: f64 = 1e-5;

/// −g′(1) for g(x) = Σ p_i^x by a central difference with step `h`.
pub fn abe_bgs(p: &ProbDist, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("difference step must be in (0, 1), got {h}")));
    }
    let diff = compensated_sum(
        p.weights()
            .iter()
            .filter(|w| **w > 0.0)
            .map(|w| w.powf(1.0 + h) - w.powf(1.0 - h)),
    );
    Ok(-diff / (2.0 * h))
}
