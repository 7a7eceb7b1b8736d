//! Word-metric balls in the discrete Heisenberg group and in ℤ³.
//!
//! Elements are integer triples (a, c, b), the matrix coordinates of
//! `[[1, a, b], [0, 1, c], [0, 0, 1]]`. Balls are grown breadth-first from the
//! identity by right multiplication with the generators. With a symmetric
//! generating set every neighbour of a level-r element lies in level r−1, r or
//! r+1, so only three spheres are held in memory at a time.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{fit_line, LineFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "heis_Z")]
    HeisZ,
    #[serde(rename = "z3")]
    Z3,
}

impl std::str::FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heis_Z" | "heis_z" | "heis" => Ok(Self::HeisZ),
            "z3" | "Z3" => Ok(Self::Z3),
            other => Err(Error::Input(format!("unknown group {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct ZGroupElement {
    pub a: i64,
    pub c: i64,
    pub b: i64,
}

impl From<[i64; 3]> for ZGroupElement {
    fn from(v: [i64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<ZGroupElement> for [i64; 3] {
    fn from(g: ZGroupElement) -> Self {
        [g.a, g.c, g.b]
    }
}

impl ZGroupElement {
    pub const IDENTITY: Self = Self { a: 0, c: 0, b: 0 };

    pub const fn new(a: i64, c: i64, b: i64) -> Self {
        Self { a, c, b }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

impl Group {
    pub fn mul(self, g: &ZGroupElement, h: &ZGroupElement) -> Result<ZGroupElement> {
        let a = g.a.checked_add(h.a).ok_or(Error::Overflow)?;
        let c = g.c.checked_add(h.c).ok_or(Error::Overflow)?;
        let b = g.b.checked_add(h.b).ok_or(Error::Overflow)?;
        let b = match self {
            Group::HeisZ => g.a.checked_mul(h.c).and_then(|x| b.checked_add(x)).ok_or(Error::Overflow)?,
            Group::Z3 => b,
        };
        Ok(ZGroupElement { a, c, b })
    }

    pub fn inverse(self, g: &ZGroupElement) -> Result<ZGroupElement> {
        let neg = |x: i64| x.checked_neg().ok_or(Error::Overflow);
        let b = match self {
            Group::HeisZ => g.a.checked_mul(g.c).and_then(|ac| ac.checked_sub(g.b)).ok_or(Error::Overflow)?,
            Group::Z3 => neg(g.b)?,
        };
        Ok(ZGroupElement {
            a: neg(g.a)?,
            c: neg(g.c)?,
            b,
        })
    }

    /// g h g⁻¹ h⁻¹.
    pub fn commutator(self, g: &ZGroupElement, h: &ZGroupElement) -> Result<ZGroupElement> {
        let gh = self.mul(g, h)?;
        let gi = self.inverse(g)?;
        let hi = self.inverse(h)?;
        self.mul(&self.mul(&gh, &gi)?, &hi)
    }

    /// The two standard generators: T1 = (1,0,0), T2 = (0,1,0) for Heisenberg,
    /// the three unit vectors for ℤ³.
    pub fn standard_generators(self) -> GeneratingSet {
        let raw = match self {
            Group::HeisZ => vec![ZGroupElement::new(1, 0, 0), ZGroupElement::new(0, 1, 0)],
            Group::Z3 => vec![
                ZGroupElement::new(1, 0, 0),
                ZGroupElement::new(0, 1, 0),
                ZGroupElement::new(0, 0, 1),
            ],
        };
        GeneratingSet::new(self, raw).expect("standard generators are valid")
    }
}

/// A symmetric generating set without the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingSet {
    pub group: Group,
    generators: Vec<ZGroupElement>,
}

impl GeneratingSet {
    /// Adds missing inverses, keeping first-seen order and dropping duplicates.
    pub fn new(group: Group, elements: Vec<ZGroupElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Input("generating set is empty".into()));
        }
        let mut generators: Vec<ZGroupElement> = Vec::with_capacity(2 * elements.len());
        for g in &elements {
            if g.is_identity() {
                return Err(Error::Input("generating set may not contain the identity".into()));
            }
            for h in [*g, group.inverse(g)?] {
                if !generators.contains(&h) {
                    generators.push(h);
                }
            }
        }
        Ok(Self { group, generators })
    }

    pub fn generators(&self) -> &[ZGroupElement] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.generators.iter().all(|g| {
            self.group
                .inverse(g)
                .map(|h| self.generators.contains(&h))
                .unwrap_or(false)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub group: Group,
    pub generators: Vec<ZGroupElement>,
    pub radii: Vec<u32>,
    /// |B_r|.
    pub counts: Vec<u64>,
    /// Largest |a| over B_r.
    pub max_abs_a: Vec<i64>,
    /// Largest |b| over B_r.
    pub max_abs_b: Vec<i64>,
    /// Largest number of elements held at once during the expansion.
    pub peak_elements: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl GrowthTable {
    pub fn radius(&self) -> Option<u32> {
        self.radii.last().copied()
    }

    pub fn count(&self, r: u32) -> Option<u64> {
        self.counts.get(r as usize).copied()
    }
}

/// Rough heap cost of one stored element: the triple plus hash-set overhead.
pub const BYTES_PER_ELEMENT: u64 = 64;

/// Default memory budget for ball enumeration.
pub const DEFAULT_BUDGET_BYTES: u64 = 2 << 30;

type Sphere = HashSet<ZGroupElement>;

fn expand(gens: &GeneratingSet, prev: &Sphere, cur: &Sphere, order: &[ZGroupElement]) -> Result<(Sphere, Vec<ZGroupElement>)> {
    let mut next = Sphere::with_capacity(cur.len() * 2);
    let mut next_order = Vec::with_capacity(cur.len() * 2);
    for x in order {
        for s in gens.generators() {
            let y = gens.group.mul(x, s)?;
            if !prev.contains(&y) && !cur.contains(&y) && next.insert(y) {
                next_order.push(y);
            }
        }
    }
    Ok((next, next_order))
}

/// Counts |B_r| for r = 0..=radius.
///
/// Fails with [`Error::Budget`] (carrying the completed part of the table) when
/// the projected size of the next sphere would exceed `budget_bytes`.
pub fn word_ball(gens: &GeneratingSet, radius: u32, budget_bytes: u64) -> Result<GrowthTable> {
    if !gens.is_symmetric() {
        return Err(Error::Input("generating set must be symmetric".into()));
    }
    let started = Instant::now();
    let mut table = GrowthTable {
        group: gens.group,
        generators: gens.generators().to_vec(),
        radii: vec![0],
        counts: vec![1],
        max_abs_a: vec![0],
        max_abs_b: vec![0],
        peak_elements: 1,
        wall_time: Duration::ZERO,
    };
    let mut prev = Sphere::new();
    let mut cur: Sphere = [ZGroupElement::IDENTITY].into_iter().collect();
    let mut order = vec![ZGroupElement::IDENTITY];
    for r in 1..=radius {
        let growth = if prev.is_empty() {
            gens.len() as f64
        } else {
            cur.len() as f64 / prev.len() as f64
        };
        let projected = prev.len() as f64 + cur.len() as f64 * (1.0 + growth);
        if projected * BYTES_PER_ELEMENT as f64 > budget_bytes as f64 {
            table.wall_time = started.elapsed();
            return Err(Error::Budget {
                budget_bytes,
                radius: r,
                partial: Box::new(table),
            });
        }
        let (next, next_order) = expand(gens, &prev, &cur, &order)?;
        let held = (prev.len() + cur.len() + next.len()) as u64;
        table.peak_elements = table.peak_elements.max(held);
        let (mut ma, mut mb) = (*table.max_abs_a.last().unwrap(), *table.max_abs_b.last().unwrap());
        for g in &next_order {
            ma = ma.max(g.a.abs());
            mb = mb.max(g.b.abs());
        }
        table.radii.push(r);
        table.counts.push(table.counts.last().unwrap() + next.len() as u64);
        table.max_abs_a.push(ma);
        table.max_abs_b.push(mb);
        prev = cur;
        cur = next;
        order = next_order;
    }
    table.wall_time = started.elapsed();
    Ok(table)
}

/// Word length of `g`, or `None` if it exceeds `cap`.
pub fn word_norm(g: &ZGroupElement, gens: &GeneratingSet, cap: u32) -> Result<Option<u32>> {
    if !gens.is_symmetric() {
        return Err(Error::Input("generating set must be symmetric".into()));
    }
    if g.is_identity() {
        return Ok(Some(0));
    }
    let mut prev = Sphere::new();
    let mut cur: Sphere = [ZGroupElement::IDENTITY].into_iter().collect();
    let mut order = vec![ZGroupElement::IDENTITY];
    for r in 1..=cap {
        let (next, next_order) = expand(gens, &prev, &cur, &order)?;
        if next.contains(g) {
            return Ok(Some(r));
        }
        prev = cur;
        cur = next;
        order = next_order;
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub d: f64,
    pub c: f64,
    pub max_residual: f64,
    pub r_min: u32,
    pub r_max: u32,
}

fn fit_window(values: &[f64], r_min: u32, r_max: u32) -> Result<LineFit> {
    if r_min < 1 || r_max <= r_min {
        return Err(Error::Input(format!("fit window [{r_min}, {r_max}] needs 1 <= r_min < r_max")));
    }
    if values.len() <= r_max as usize {
        return Err(Error::Input(format!(
            "table stops at radius {} but the fit window ends at {r_max}",
            values.len().saturating_sub(1)
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for r in r_min..=r_max {
        let v = values[r as usize];
        if v <= 0.0 {
            return Err(Error::Input(format!("non-positive value at radius {r}")));
        }
        xs.push((r as f64).ln());
        ys.push(v.ln());
    }
    fit_line(&xs, &ys)
}

/// Least-squares fit of log|B_r| = log c + d·log r over [r_min, r_max].
pub fn growth_fit(table: &GrowthTable, r_min: u32, r_max: u32) -> Result<GrowthFit> {
    let counts: Vec<f64> = table.counts.iter().map(|&n| n as f64).collect();
    let fit = fit_window(&counts, r_min, r_max)?;
    Ok(GrowthFit {
        d: fit.slope,
        c: fit.intercept.exp(),
        max_residual: fit.max_residual,
        r_min,
        r_max,
    })
}

/// Growth exponents of max|a| and max|b| over balls in [r_min, r_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anisotropy {
    pub planar_exponent: f64,
    pub central_exponent: f64,
}

pub fn anisotropy(table: &GrowthTable, r_min: u32, r_max: u32) -> Result<Anisotropy> {
    let a: Vec<f64> = table.max_abs_a.iter().map(|&v| v as f64).collect();
    let b: Vec<f64> = table.max_abs_b.iter().map(|&v| v as f64).collect();
    Ok(Anisotropy {
        planar_exponent: fit_window(&a, r_min, r_max)?.slope,
        central_exponent: fit_window(&b, r_min, r_max)?.slope,
    })
}

pub const ROBUSTNESS_TOL: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub fit1: GrowthFit,
    pub fit2: GrowthFit,
    pub delta: f64,
    pub agree: bool,
    /// min and max of |B_r(gens1)| / |B_r(gens2)| over 1..=R.
    pub ratio_bounds: (f64, f64),
    /// Largest word length of a generator of one set in terms of the other.
    pub cross_lengths: (Option<u32>, Option<u32>),
    pub warning: Option<String>,
}

/// Compares growth exponents under two generating sets of the same group.
pub fn generator_robustness(
    gens1: &GeneratingSet,
    gens2: &GeneratingSet,
    radius: u32,
    window: (u32, u32),
    budget_bytes: u64,
) -> Result<RobustnessReport> {
    if gens1.group != gens2.group {
        return Err(Error::Input("generating sets belong to different groups".into()));
    }
    let cap = (radius / 2).max(1);
    let cross = |from: &GeneratingSet, to: &GeneratingSet| -> Result<Option<u32>> {
        let mut worst = 0;
        for g in to.generators() {
            match word_norm(g, from, cap)? {
                Some(n) => worst = worst.max(n),
                None => return Ok(None),
            }
        }
        Ok(Some(worst))
    };
    let cross_lengths = (cross(gens1, gens2)?, cross(gens2, gens1)?);
    let warning = match cross_lengths {
        (Some(_), Some(_)) => None,
        _ => Some(format!(
            "a generator of one set is not reached by the other within radius {cap}; sets may not generate the same group"
        )),
    };
    let t1 = word_ball(gens1, radius, budget_bytes)?;
    let t2 = word_ball(gens2, radius, budget_bytes)?;
    let fit1 = growth_fit(&t1, window.0, window.1)?;
    let fit2 = growth_fit(&t2, window.0, window.1)?;
    let ratios = t1.counts[1..]
        .iter()
        .zip(&t2.counts[1..])
        .map(|(&x, &y)| x as f64 / y as f64);
    let ratio_bounds = ratios.fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let delta = (fit1.d - fit2.d).abs();
    Ok(RobustnessReport {
        fit1,
        fit2,
        delta,
        agree: delta <= ROBUSTNESS_TOL,
        ratio_bounds,
        cross_lengths,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octahedral(r: u64) -> u64 {
        (2 * r + 1) * (2 * r * r + 2 * r + 3) / 3
    }

    /// All words of length ≤ r, deduplicated.
    fn brute_ball(gens: &GeneratingSet, r: u32) -> usize {
        let mut all: HashSet<ZGroupElement> = [ZGroupElement::IDENTITY].into_iter().collect();
        let mut words = vec![ZGroupElement::IDENTITY];
        for _ in 0..r {
            let mut next = Vec::new();
            for w in &words {
                for s in gens.generators() {
                    let y = gens.group.mul(w, s).unwrap();
                    next.push(y);
                    all.insert(y);
                }
            }
            words = next;
        }
        all.len()
    }

    #[test]
    fn small_heisenberg_balls() {
        let gens = Group::HeisZ.standard_generators();
        assert_eq!(gens.len(), 4);
        let t = word_ball(&gens, 6, DEFAULT_BUDGET_BYTES).unwrap();
        assert_eq!(&t.counts[..3], &[1, 5, 17]);
        for r in 0..=6 {
            assert_eq!(t.counts[r] as usize, brute_ball(&gens, r as u32), "r = {r}");
        }
        assert!(t.counts.windows(2).all(|w| w[1] > w[0] && w[1] <= w[0] * (1 + gens.len() as u64)));
    }

    #[test]
    fn z3_matches_octahedral_count() {
        let gens = Group::Z3.standard_generators();
        let t = word_ball(&gens, 12, DEFAULT_BUDGET_BYTES).unwrap();
        for (r, n) in t.counts.iter().enumerate() {
            assert_eq!(*n, octahedral(r as u64));
        }
        assert_eq!(t.counts[4] as usize, brute_ball(&gens, 4));
    }

    #[test]
    fn norms() {
        let gens = Group::HeisZ.standard_generators();
        assert_eq!(word_norm(&ZGroupElement::IDENTITY, &gens, 0).unwrap(), Some(0));
        assert_eq!(word_norm(&ZGroupElement::new(1, 1, 1), &gens, 5).unwrap(), Some(2));
        let z = word_norm(&ZGroupElement::new(0, 0, 1), &gens, 8).unwrap().unwrap();
        assert!(z <= 4);
        assert_eq!(word_norm(&ZGroupElement::new(5, 0, 0), &gens, 3).unwrap(), None);
    }

    #[test]
    fn commutators_are_central() {
        let g = Group::HeisZ;
        let t1 = ZGroupElement::new(1, 0, 0);
        let t2 = ZGroupElement::new(0, 1, 0);
        let c = g.commutator(&t1, &t2).unwrap();
        assert_eq!(c, ZGroupElement::new(0, 0, 1));
        for x in [t1, t2, c] {
            assert!(g.commutator(&c, &x).unwrap().is_identity());
        }
    }

    #[test]
    fn overflow_and_validation() {
        let big = ZGroupElement::new(i64::MAX, 1, 0);
        assert!(matches!(Group::HeisZ.mul(&big, &big), Err(Error::Overflow)));
        assert!(GeneratingSet::new(Group::Z3, vec![ZGroupElement::IDENTITY]).is_err());
        let gens = GeneratingSet::new(Group::HeisZ, vec![ZGroupElement::new(1, 1, 0)]).unwrap();
        assert!(gens.generators().contains(&ZGroupElement::new(-1, -1, 1)));
    }

    #[test]
    fn budget_returns_partial_table() {
        let gens = Group::HeisZ.standard_generators();
        match word_ball(&gens, 30, 200_000) {
            Err(Error::Budget { partial, radius, .. }) => {
                assert_eq!(partial.radius(), Some(radius - 1));
                assert_eq!(&partial.counts[..3], &[1, 5, 17]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn synthetic_power_law() {
        let table = GrowthTable {
            group: Group::Z3,
            generators: vec![],
            radii: (0..=20).collect(),
            counts: (0..=20u64).map(|r| 7 * r.pow(5)).collect(),
            max_abs_a: vec![0; 21],
            max_abs_b: vec![0; 21],
            peak_elements: 0,
            wall_time: Duration::ZERO,
        };
        let fit = growth_fit(&table, 2, 20).unwrap();
        assert!((fit.d - 5.0).abs() < 1e-12 && (fit.c - 7.0).abs() < 1e-9);
        assert!(fit.max_residual < 1e-12);
        assert!(growth_fit(&table, 5, 5).is_err());
        assert!(growth_fit(&table, 0, 5).is_err());
        assert!(growth_fit(&table, 5, 25).is_err());
    }

    #[test]
    fn json_shape() {
        let t = word_ball(&Group::HeisZ.standard_generators(), 1, DEFAULT_BUDGET_BYTES).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["group"], "heis_Z");
        assert_eq!(v["generators"][0], serde_json::json!([1, 0, 0]));
        assert!(v.get("wall_time").is_none());
    }
}
