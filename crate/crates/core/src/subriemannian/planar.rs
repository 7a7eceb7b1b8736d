//! Lifting planar curves to horizontal curves. The vertical coordinate picked
//! up by a closed loop is its enclosed signed area.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::HeisPoint;

/// Closure tolerance for loops.
pub const CLOSURE_TOL: f64 = 1e-12;

/// Lifts planar samples to a horizontal polyline starting at height `z0`.
///
/// Each straight segment contributes `(x_k y_{k+1} − x_{k+1} y_k)/2`, the
/// midpoint-rule value of `(1/2)∫(x dy − y dx)`, which is exact on segments.
pub fn horizontal_lift(planar: &[[f64; 2]], z0: f64) -> Result<Vec<HeisPoint>> {
    if planar.len() < 2 {
        return Err(Error::Input(format!(
            "horizontal lift needs at least 2 samples, got {}",
            planar.len()
        )));
    }
    let mut out = Vec::with_capacity(planar.len());
    let mut z = z0;
    out.push(HeisPoint::new(planar[0][0], planar[0][1], z));
    for w in planar.windows(2) {
        let ([x0, y0], [x1, y1]) = (w[0], w[1]);
        let xm = 0.5 * (x0 + x1);
        let ym = 0.5 * (y0 + y1);
        z += 0.5 * (xm * (y1 - y0) - ym * (x1 - x0));
        out.push(HeisPoint::new(x1, y1, z));
    }
    Ok(out)
}

fn check_closed(planar: &[[f64; 2]]) -> Result<()> {
    let (Some(first), Some(last)) = (planar.first(), planar.last()) else {
        return Err(Error::Input("empty loop".into()));
    };
    let gap = (first[0] - last[0]).abs().max((first[1] - last[1]).abs());
    if gap > CLOSURE_TOL {
        return Err(Error::Input(format!("loop is not closed: endpoint gap {gap:e}")));
    }
    Ok(())
}

/// Vertical displacement of the horizontal lift of a closed planar loop.
/// A single point counts as a (degenerate) closed loop with zero holonomy.
pub fn holonomy(planar: &[[f64; 2]]) -> Result<f64> {
    check_closed(planar)?;
    if planar.len() == 1 {
        return Ok(0.0);
    }
    let lift = horizontal_lift(planar, 0.0)?;
    Ok(lift.last().map_or(0.0, |p| p.z))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricReport {
    /// Signed enclosed area (holonomy of the loop).
    pub area: f64,
    /// Euclidean length of the loop, equal to the CC length of its lift.
    pub length: f64,
    /// `length² / 4π − |area|`; non-negative, zero only for circles.
    pub defect: f64,
}

pub fn isoperimetric_check(planar: &[[f64; 2]]) -> Result<IsoperimetricReport> {
    let area = holonomy(planar)?;
    let length: f64 = planar
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .sum();
    Ok(IsoperimetricReport {
        area,
        length,
        defect: length * length / (4.0 * std::f64::consts::PI) - area.abs(),
    })
}

/// `n + 1` samples of the circle of radius `r` centred at `center`, closed exactly.
/// Counter-clockwise unless `clockwise`.
pub fn circle_samples(center: [f64; 2], r: f64, n: usize, clockwise: bool) -> Vec<[f64; 2]> {
    let sign = if clockwise { -1.0 } else { 1.0 };
    let mut pts: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let th = sign * std::f64::consts::TAU * k as f64 / n as f64;
            [center[0] + r * th.cos(), center[1] + r * th.sin()]
        })
        .collect();
    pts.push(pts[0]);
    pts
}
