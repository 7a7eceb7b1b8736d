//! Numerical Pansu derivatives: blow-up limits of maps from the Heisenberg
//! group (or from ℝ³ with its additive law) into the Abelian group ℝ³.
//!
//! For a map `f`, a base point `g` and a direction `v`, the blow-up quotient at
//! scale `t` is `(f(g · δ_t v) − f(g)) / t`; the target is Abelian, so its
//! inverse dilation is plain division by `t`. The derivative column along
//! `e_j` is the `t → 0⁺` limit of the quotient with `v = e_j`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::HeisMatrix;
use crate::numeric::{extrapolate_limit, Limit};
use crate::q_algebra::{jackson_derivative, jackson_quotient, JacksonSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// Source is the Heisenberg group in matrix coordinates (a, c, b).
    HeisToAbelian,
    /// Source is ℝ³ under addition.
    AbelianToAbelian,
}

impl std::str::FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heis_to_abelian" | "heis" => Ok(Self::HeisToAbelian),
            "abelian_to_abelian" | "abelian" => Ok(Self::AbelianToAbelian),
            other => Err(Error::Input(format!("unknown map kind {other:?}"))),
        }
    }
}

/// Scaling applied to the source direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// (t·a, t·c, t²·b), the group automorphism.
    #[default]
    SourceGraded,
    /// (t·a, t·c, t·b).
    SourceLinear,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source_graded" | "graded" => Ok(Self::SourceGraded),
            "source_linear" | "linear" => Ok(Self::SourceLinear),
            other => Err(Error::Input(format!("unknown convention {other:?}"))),
        }
    }
}

type ComponentFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A map applying one real function to each coordinate.
#[derive(Clone)]
pub struct GroupMap {
    pub kind: MapKind,
    pub name: String,
    component: ComponentFn,
}

impl fmt::Debug for GroupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupMap")
            .field("kind", &self.kind)
            .field("name", &self.name)
            .finish()
    }
}

impl GroupMap {
    pub fn new<F>(kind: MapKind, name: impl Into<String>, component: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind,
            name: name.into(),
            component: Arc::new(component),
        }
    }

    pub fn identity(kind: MapKind) -> Self {
        Self::new(kind, "identity", |x| x)
    }

    pub fn square(kind: MapKind) -> Self {
        Self::new(kind, "square", |x| x * x)
    }

    /// Σ c_k x^k, evaluated by Horner's rule.
    pub fn polynomial(kind: MapKind, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("polynomial needs at least one finite coefficient".into()));
        }
        let name = format!(
            "polynomial({})",
            coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        Ok(Self::new(kind, name, move |x| {
            coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
        }))
    }

    pub fn component(&self, x: f64) -> f64 {
        (self.component)(x)
    }

    pub fn eval(&self, p: [f64; 3]) -> [f64; 3] {
        p.map(|x| self.component(x))
    }

    /// Source group law.
    fn source_mul(&self, g: [f64; 3], h: [f64; 3]) -> [f64; 3] {
        match self.kind {
            MapKind::HeisToAbelian => {
                let m = HeisMatrix::new(g[0], g[1], g[2]).mul(&HeisMatrix::new(h[0], h[1], h[2]));
                [m.a, m.c, m.b]
            }
            MapKind::AbelianToAbelian => [g[0] + h[0], g[1] + h[1], g[2] + h[2]],
        }
    }

    /// Source dilation. An Abelian source is always scaled linearly.
    fn source_dilate(&self, v: [f64; 3], t: f64, convention: Convention) -> [f64; 3] {
        match (self.kind, convention) {
            (MapKind::HeisToAbelian, Convention::SourceGraded) => [t * v[0], t * v[1], t * t * v[2]],
            _ => v.map(|x| t * x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupSchedule {
    t_values: Vec<f64>,
    pub convention: Convention,
    /// Entry agreement required between successive extrapolants.
    pub tol: f64,
}

impl BlowupSchedule {
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn new(t_values: Vec<f64>, convention: Convention) -> Result<Self> {
        if t_values.len() < 2 {
            return Err(Error::Input("blow-up schedule needs at least two scales".into()));
        }
        if t_values.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Domain("blow-up scales must be positive".into()));
        }
        if t_values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Input("blow-up scales must be strictly decreasing".into()));
        }
        Ok(Self {
            t_values,
            convention,
            tol: Self::DEFAULT_TOL,
        })
    }

    /// t_k = 2^{−k}, k = 1..=steps.
    pub fn dyadic(steps: usize, convention: Convention) -> Result<Self> {
        Self::new((1..=steps).map(|k| 0.5_f64.powi(k as i32)).collect(), convention)
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    fn is_halving(&self) -> bool {
        self.t_values.windows(2).all(|w| (w[0] - 2.0 * w[1]).abs() <= 1e-15 * w[0])
    }
}

impl Default for BlowupSchedule {
    fn default() -> Self {
        Self::dyadic(24, Convention::SourceGraded).expect("dyadic schedule is valid")
    }
}

/// Single fixed-scale term `(f(base · δ_t dir) − f(base)) / t`.
pub fn blowup_quotient(
    f: &GroupMap,
    base: [f64; 3],
    dir: [f64; 3],
    t: f64,
    convention: Convention,
) -> Result<[f64; 3]> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("blow-up scale must be positive, got {t}")));
    }
    let moved = f.eval(f.source_mul(base, f.source_dilate(dir, t, convention)));
    let fixed = f.eval(base);
    Ok([0, 1, 2].map(|i| (moved[i] - fixed[i]) / t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PansuDerivative {
    /// `matrix[i][j]`: component i of the limit along `dir_j · e_j`.
    pub matrix: [[f64; 3]; 3],
    pub spread: [[f64; 3]; 3],
    /// Observed order log₂ of successive quotient differences; `None` when
    /// the quotients are already constant.
    pub per_entry_order: [[Option<f64>; 3]; 3],
    pub steps: usize,
}

fn observed_order(q: &[f64]) -> Option<f64> {
    let n = q.len();
    if n < 3 {
        return None;
    }
    let d1 = (q[n - 3] - q[n - 2]).abs();
    let d2 = (q[n - 2] - q[n - 1]).abs();
    let floor = 1e-13 * q[n - 1].abs().max(1.0);
    if d1 <= floor || d2 <= floor {
        return None;
    }
    Some((d1 / d2).log2())
}

fn settle(quotients: &[f64], halving: bool, tol: f64, what: &str) -> Result<Limit> {
    if halving {
        return extrapolate_limit(quotients.iter().copied(), tol, what);
    }
    for (i, w) in quotients.windows(2).enumerate() {
        let spread = (w[1] - w[0]).abs();
        if spread <= tol * w[1].abs().max(1.0) {
            return Ok(Limit {
                value: w[1],
                spread,
                steps: i + 2,
            });
        }
    }
    let n = quotients.len();
    Err(Error::Convergence {
        what: what.to_string(),
        spread: (quotients[n - 1] - quotients[n - 2]).abs(),
    })
}

/// Pansu derivative at `base`: column j is the limit of the blow-up quotient
/// along `dir[j]·e_j`.
pub fn pansu_derivative(
    f: &GroupMap,
    base: [f64; 3],
    dir: [f64; 3],
    sched: &BlowupSchedule,
) -> Result<PansuDerivative> {
    let mut out = PansuDerivative {
        matrix: [[0.0; 3]; 3],
        spread: [[0.0; 3]; 3],
        per_entry_order: [[None; 3]; 3],
        steps: 0,
    };
    let halving = sched.is_halving();
    for j in 0..3 {
        let mut e = [0.0; 3];
        e[j] = dir[j];
        let mut columns: [Vec<f64>; 3] = Default::default();
        for &t in sched.t_values() {
            let q = blowup_quotient(f, base, e, t, sched.convention)?;
            for i in 0..3 {
                columns[i].push(q[i]);
            }
        }
        for i in 0..3 {
            let what = format!("pansu entry ({i},{j})");
            let lim = settle(&columns[i], halving, sched.tol, &what)?;
            out.matrix[i][j] = lim.value;
            out.spread[i][j] = lim.spread;
            out.per_entry_order[i][j] = observed_order(&columns[i][..lim.steps.max(3).min(columns[i].len())]);
            out.steps = out.steps.max(lim.steps);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacksonProfile {
    pub x0: f64,
    /// (t, (f(t·x0) − f(x0)) / (t·x0 − x0)).
    pub rows: Vec<(f64, f64)>,
    pub extrapolant: Limit,
}

/// Tabulates the Jackson quotient of `f` at `x0` over `t_grid` and extrapolates t → 1.
pub fn jackson_profile<F: Fn(f64) -> f64>(f: F, x0: f64, t_grid: &[f64]) -> Result<JacksonProfile> {
    if let Some(t) = t_grid.iter().find(|t| **t == 1.0 || !t.is_finite()) {
        return Err(Error::Domain(format!("Jackson quotient undefined at t = {t}")));
    }
    let extrapolant = jackson_derivative(&f, x0, &JacksonSchedule::default())?;
    let rows = t_grid.iter().map(|&t| (t, jackson_quotient(&f, x0, t))).collect();
    Ok(JacksonProfile { x0, rows, extrapolant })
}
