//! Carnot–Carathéodory distance by direct transcription.
//!
//! A horizontal path from the origin is discretised into `segments`
//! piecewise-constant controls of equal duration `1/segments`. Its endpoint has
//! a closed form (linear in the planar coordinates, quadratic in the vertical
//! one). We minimise the energy Σ‖w_i‖² h, whose minimisers over a fixed time
//! horizon are the constant-speed length minimisers, subject to the endpoint
//! constraint:
//!
//! 1. an augmented-Lagrangian penalty on the endpoint residual, escalated over
//!    `penalty_rounds` rounds, each solved by L-BFGS;
//! 2. a Gauss–Newton projection onto the endpoint constraint;
//! 3. the reported value is the exact length of the projected path.
//!
//! The problem is first reduced to the origin by left translation (`A⁻¹B`), then
//! normalised to unit homogeneous gauge by a graded dilation; both maps carry
//! horizontal paths to horizontal paths, scaling length by 1 and by the
//! dilation factor respectively. Multi-start: the square-loop connection of
//! [`chow_connect`] and the straight lift of the planar projection.
//!
//! Every returned value is the length of an explicit feasible horizontal path,
//! so it is an upper bound on the true distance.

use serde::{Deserialize, Serialize};

use super::dilation::dilate;
use super::path::{cc_length, chow_connect, integrate_path, Control, HorizontalPath, NormKind};
use crate::error::Result;
use crate::heisenberg::HeisPoint;
use crate::optim::{minimize, LbfgsOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcOptions {
    pub segments: usize,
    pub endpoint_tol: f64,
    pub norm: NormKind,
    pub penalty_rounds: usize,
    pub max_inner_iters: usize,
}

impl Default for CcOptions {
    fn default() -> Self {
        Self {
            segments: 64,
            endpoint_tol: 1e-6,
            norm: NormKind::L2,
            penalty_rounds: 5,
            max_inner_iters: 3000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Trivial,
    SquareLoop,
    StraightLift,
    L2Witness,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcDistance {
    /// Length of the witness path in the requested norm.
    pub value: f64,
    /// Certified lower bound.
    pub lower: f64,
    /// Best certified upper bound (min of `value` and the square-loop path).
    pub upper: f64,
    pub witness: HorizontalPath,
    /// max-norm distance between the witness endpoint and the target.
    pub endpoint_error: f64,
    /// Set when no optimised path met `endpoint_tol` and the square-loop
    /// connection was returned instead.
    pub degraded: bool,
    pub start: StartKind,
}

/// Korányi gauge `(ρ⁴ + 16 z²)^{1/4}`, homogeneous of degree one under graded dilations.
pub fn gauge(p: &HeisPoint) -> f64 {
    let rho2 = p.x * p.x + p.y * p.y;
    (rho2 * rho2 + 16.0 * p.z * p.z).sqrt().sqrt()
}

/// Lower bound on the distance from the origin to `g` in the given norm.
///
/// Closing a horizontal path of ℓ²-length L with the radial chord back to the
/// origin gives a loop of perimeter L + ρ enclosing area |z|, hence
/// `L ≥ √(4π|z|) − ρ`; also `L ≥ ρ`.
pub fn distance_lower_bound(g: &HeisPoint, norm: NormKind) -> f64 {
    let rho = g.x.hypot(g.y);
    let l2 = rho.max((4.0 * std::f64::consts::PI * g.z.abs()).sqrt() - rho);
    match norm {
        NormKind::L2 | NormKind::L1 => l2,
        NormKind::Linf => l2 / std::f64::consts::SQRT_2,
    }
}

/// Upper bound from the explicit square-loop connection.
pub fn distance_upper_bound(g: &HeisPoint, norm: NormKind) -> f64 {
    cc_length(&chow_connect(&HeisPoint::ORIGIN, g), norm)
}

/// Smoothing scale for the ℓ¹ and ℓ∞ speed functions, refined in stages.
const SMOOTHING_STAGES: [f64; 3] = [1e-2, 1e-4, 1e-6];
const LINF_EXPONENT: i32 = 32;

/// First penalty weight. Weaker penalties make the zero control a minimiser for
/// purely vertical targets, where the constraint Jacobian vanishes.
const INITIAL_PENALTY: f64 = 1e3;

/// Transcribed control problem with equal time steps `h = 1/n`.
struct Transcription {
    n: usize,
    h: f64,
    target: [f64; 3],
    norm: NormKind,
    eps: f64,
}

impl Transcription {
    fn new(n: usize, target: [f64; 3], norm: NormKind) -> Self {
        Self {
            n,
            h: 1.0 / n as f64,
            target,
            norm,
            eps: SMOOTHING_STAGES[0],
        }
    }

    fn endpoint(&self, w: &[f64]) -> [f64; 3] {
        let (us, vs) = w.split_at(self.n);
        let (mut px, mut py, mut pz) = (0.0, 0.0, 0.0);
        for (u, v) in us.iter().zip(vs) {
            pz += 0.5 * self.h * (px * v - py * u);
            px += u * self.h;
            py += v * self.h;
        }
        [px, py, pz]
    }

    fn residual(&self, w: &[f64]) -> [f64; 3] {
        let e = self.endpoint(w);
        [0, 1, 2].map(|i| e[i] - self.target[i])
    }

    /// Rows of the 3 × 2n endpoint Jacobian.
    fn jacobian(&self, w: &[f64]) -> [Vec<f64>; 3] {
        let n = self.n;
        let h = self.h;
        let (us, vs) = w.split_at(n);
        let big_x: f64 = us.iter().sum::<f64>() * h;
        let big_y: f64 = vs.iter().sum::<f64>() * h;
        let mut jx = vec![0.0; 2 * n];
        let mut jy = vec![0.0; 2 * n];
        let mut jz = vec![0.0; 2 * n];
        let (mut px, mut py) = (0.0, 0.0);
        for k in 0..n {
            let (nx, ny) = (px + us[k] * h, py + vs[k] * h);
            jx[k] = h;
            jy[n + k] = h;
            jz[k] = 0.5 * h * (big_y - py - ny);
            jz[n + k] = 0.5 * h * (px + nx - big_x);
            px = nx;
            py = ny;
        }
        [jx, jy, jz]
    }

    /// Smoothed squared speed and its gradient with respect to (u, v).
    fn speed_sq(&self, u: f64, v: f64) -> (f64, f64, f64) {
        match self.norm {
            NormKind::L2 => (u * u + v * v, 2.0 * u, 2.0 * v),
            NormKind::L1 => {
                let a = (u * u + self.eps * self.eps).sqrt();
                let b = (v * v + self.eps * self.eps).sqrt();
                let phi = a + b;
                (phi * phi, 2.0 * phi * u / a, 2.0 * phi * v / b)
            }
            NormKind::Linf => {
                let a = (u * u + self.eps * self.eps).sqrt();
                let b = (v * v + self.eps * self.eps).sqrt();
                let m = a.max(b);
                let s = (a / m).powi(LINF_EXPONENT) + (b / m).powi(LINF_EXPONENT);
                let phi = m * s.powf(1.0 / LINF_EXPONENT as f64);
                let da = (a / phi).powi(LINF_EXPONENT - 1);
                let db = (b / phi).powi(LINF_EXPONENT - 1);
                (phi * phi, 2.0 * phi * da * u / a, 2.0 * phi * db * v / b)
            }
        }
    }

    /// Augmented Lagrangian `E + λ·c + (μ/2)|c|²` and its gradient.
    fn augmented(&self, w: &[f64], grad: &mut [f64], lambda: &[f64; 3], mu: f64) -> f64 {
        let n = self.n;
        let mut energy = 0.0;
        for k in 0..n {
            let (s, gu, gv) = self.speed_sq(w[k], w[n + k]);
            energy += s * self.h;
            grad[k] = gu * self.h;
            grad[n + k] = gv * self.h;
        }
        let c = self.residual(w);
        let jac = self.jacobian(w);
        let mut penalty = 0.0;
        for i in 0..3 {
            let weight = lambda[i] + mu * c[i];
            penalty += lambda[i] * c[i] + 0.5 * mu * c[i] * c[i];
            grad.iter_mut().zip(&jac[i]).for_each(|(g, j)| *g += weight * j);
        }
        energy + penalty
    }

    fn solve(&mut self, w: &mut [f64], opts: &CcOptions) {
        let stages: &[f64] = match self.norm {
            NormKind::L2 => &SMOOTHING_STAGES[..1],
            _ => &SMOOTHING_STAGES,
        };
        let lbfgs = LbfgsOptions {
            max_iters: opts.max_inner_iters,
            ..LbfgsOptions::default()
        };
        for &eps in stages {
            self.eps = eps;
            let mut lambda = [0.0; 3];
            let mut mu = INITIAL_PENALTY;
            for _ in 0..opts.penalty_rounds.max(1) {
                minimize(|x, g| self.augmented(x, g, &lambda, mu), w, &lbfgs);
                let c = self.residual(w);
                for i in 0..3 {
                    lambda[i] += mu * c[i];
                }
                mu *= 10.0;
            }
            self.project(w);
        }
    }

    /// Gauss–Newton minimum-norm corrections `Δw = −Jᵀ(JJᵀ)⁻¹c`.
    fn project(&self, w: &mut [f64]) -> f64 {
        let mut err = inf3(&self.residual(w));
        for _ in 0..30 {
            if err <= 1e-15 {
                break;
            }
            let c = self.residual(w);
            let jac = self.jacobian(w);
            let mut gram = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    gram[i][j] = jac[i].iter().zip(&jac[j]).map(|(a, b)| a * b).sum();
                }
            }
            let Some(y) = solve3(&gram, &c) else { break };
            let candidate: Vec<f64> = w
                .iter()
                .enumerate()
                .map(|(k, wk)| wk - (0..3).map(|i| jac[i][k] * y[i]).sum::<f64>())
                .collect();
            let new_err = inf3(&self.residual(&candidate));
            if new_err >= err {
                break;
            }
            w.copy_from_slice(&candidate);
            err = new_err;
        }
        err
    }
}

fn inf3(c: &[f64; 3]) -> f64 {
    c.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

fn solve3(m: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let scale = m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    if det.abs() <= 1e-300 || det.abs() <= 1e-14 * scale.powi(3) {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = *m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        let d = mc[0][0] * (mc[1][1] * mc[2][2] - mc[1][2] * mc[2][1])
            - mc[0][1] * (mc[1][0] * mc[2][2] - mc[1][2] * mc[2][0])
            + mc[0][2] * (mc[1][0] * mc[2][1] - mc[1][1] * mc[2][0]);
        *slot = d / det;
    }
    Some(out)
}

/// Resamples a planar polyline by arclength into `n` equal-time controls on [0, 1].
fn resample_controls(path: &HorizontalPath, n: usize) -> Vec<f64> {
    let mut pts = vec![[0.0, 0.0]];
    let mut cum = vec![0.0];
    for c in &path.controls {
        let last = *pts.last().unwrap();
        pts.push([last[0] + c.u * c.dt, last[1] + c.v * c.dt]);
        let seg = (c.u * c.dt).hypot(c.v * c.dt);
        cum.push(cum.last().unwrap() + seg);
    }
    let total = *cum.last().unwrap();
    let at = |s: f64| -> [f64; 2] {
        let k = cum.partition_point(|&c| c <= s).clamp(1, pts.len() - 1);
        let (s0, s1) = (cum[k - 1], cum[k]);
        let f = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        let (p0, p1) = (pts[k - 1], pts[k]);
        [p0[0] + f * (p1[0] - p0[0]), p0[1] + f * (p1[1] - p0[1])]
    };
    let mut w = vec![0.0; 2 * n];
    let mut prev = [0.0, 0.0];
    for k in 0..n {
        let next = at(total * (k + 1) as f64 / n as f64);
        w[k] = (next[0] - prev[0]) * n as f64;
        w[n + k] = (next[1] - prev[1]) * n as f64;
        prev = next;
    }
    w
}

fn controls_to_path(start: HeisPoint, w: &[f64], n: usize, scale: f64) -> HorizontalPath {
    let h = 1.0 / n as f64;
    HorizontalPath::new(
        start,
        (0..n).map(|k| Control::new(scale * w[k], scale * w[n + k], h)).collect(),
    )
}

struct Candidate {
    w: Vec<f64>,
    length: f64,
    start: StartKind,
}

/// Optimised horizontal distance between `a` and `b`.
pub fn cc_distance(a: &HeisPoint, b: &HeisPoint, opts: &CcOptions) -> Result<CcDistance> {
    let g = a.inverse().exp_mul(b);
    let lower = distance_lower_bound(&g, opts.norm);
    let chow = chow_connect(a, b);
    let chow_len = cc_length(&chow, opts.norm);
    let s = gauge(&g);
    if s == 0.0 {
        return Ok(CcDistance {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            witness: HorizontalPath::new(*a, Vec::new()),
            endpoint_error: 0.0,
            degraded: false,
            start: StartKind::Trivial,
        });
    }
    let n = opts.segments.max(4);
    let unit = dilate(&g, 1.0 / s)?;
    let target = unit.to_array();

    let mut starts: Vec<(StartKind, Vec<f64>)> = vec![(
        StartKind::SquareLoop,
        resample_controls(&chow_connect(&HeisPoint::ORIGIN, &unit), n),
    )];
    if unit.x.hypot(unit.y) > 1e-8 {
        let mut w = vec![unit.x; 2 * n];
        w[n..].iter_mut().for_each(|v| *v = unit.y);
        starts.push((StartKind::StraightLift, w));
    }

    let feasible_tol = opts.endpoint_tol / 10.0 / s.max(s * s).max(1.0);
    let mut best: Option<Candidate> = None;
    let mut consider = |w: Vec<f64>, start: StartKind, prob: &Transcription| {
        if inf3(&prob.residual(&w)) > feasible_tol {
            return;
        }
        let length = cc_length(&controls_to_path(HeisPoint::ORIGIN, &w, n, 1.0), opts.norm);
        if best.as_ref().map_or(true, |b| length < b.length) {
            best = Some(Candidate { w, length, start });
        }
    };

    let l2_opts = CcOptions {
        norm: NormKind::L2,
        ..*opts
    };
    let mut l2_prob = Transcription::new(n, target, NormKind::L2);
    let mut l2_best: Option<(Vec<f64>, f64)> = None;
    for (kind, mut w) in starts {
        l2_prob.solve(&mut w, &l2_opts);
        if inf3(&l2_prob.residual(&w)) <= feasible_tol {
            let len = cc_length(&controls_to_path(HeisPoint::ORIGIN, &w, n, 1.0), NormKind::L2);
            if l2_best.as_ref().map_or(true, |(_, l)| len < *l) {
                l2_best = Some((w.clone(), len));
            }
        }
        if opts.norm == NormKind::L2 {
            consider(w, kind, &l2_prob);
        }
    }
    if opts.norm != NormKind::L2 {
        if let Some((w_l2, _)) = l2_best {
            let mut prob = Transcription::new(n, target, opts.norm);
            consider(w_l2.clone(), StartKind::L2Witness, &prob);
            let mut w = w_l2;
            prob.solve(&mut w, opts);
            consider(w, StartKind::L2Witness, &prob);
        }
    }

    let (witness, start, degraded) = match best {
        Some(c) => (controls_to_path(*a, &c.w, n, s), c.start, false),
        None => (chow.clone(), StartKind::Fallback, true),
    };
    let endpoint_error = integrate_path(&witness).max_abs_diff(b);
    let (witness, start, degraded, endpoint_error) = if endpoint_error > opts.endpoint_tol && !degraded {
        let err = integrate_path(&chow).max_abs_diff(b);
        (chow.clone(), StartKind::Fallback, true, err)
    } else {
        (witness, start, degraded, endpoint_error)
    };
    let value = cc_length(&witness, opts.norm);
    Ok(CcDistance {
        value,
        lower,
        upper: value.min(chow_len),
        witness,
        endpoint_error,
        degraded,
        start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn jacobian_matches_finite_differences() {
        let n = 7;
        let prob = Transcription::new(n, [0.3, -0.2, 0.5], NormKind::L2);
        let w: Vec<f64> = (0..2 * n).map(|k| ((k * 37 % 11) as f64 - 5.0) * 0.3).collect();
        let jac = prob.jacobian(&w);
        let step = 1e-6;
        for k in 0..2 * n {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += step;
            wm[k] -= step;
            let (ep, em) = (prob.endpoint(&wp), prob.endpoint(&wm));
            for i in 0..3 {
                let fd = (ep[i] - em[i]) / (2.0 * step);
                assert!((fd - jac[i][k]).abs() < 1e-8, "row {i} col {k}: {fd} vs {}", jac[i][k]);
            }
        }
    }

    #[test]
    fn smoothed_speed_gradients() {
        for norm in [NormKind::L1, NormKind::Linf] {
            let mut prob = Transcription::new(4, [0.0; 3], norm);
            prob.eps = 1e-2;
            for (u, v) in [(0.7, -0.3), (-1.2, 0.05), (0.4, 0.41)] {
                let (_, gu, gv) = prob.speed_sq(u, v);
                let h = 1e-6;
                let fu = (prob.speed_sq(u + h, v).0 - prob.speed_sq(u - h, v).0) / (2.0 * h);
                let fv = (prob.speed_sq(u, v + h).0 - prob.speed_sq(u, v - h).0) / (2.0 * h);
                assert!((fu - gu).abs() < 1e-5 && (fv - gv).abs() < 1e-5, "{norm:?} {u} {v}");
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let z = HeisPoint::new(0.0, 0.0, 1.0);
        assert!((distance_lower_bound(&z, NormKind::L2) - (4.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(distance_upper_bound(&z, NormKind::L2), 4.0);
        assert_eq!(distance_lower_bound(&HeisPoint::new(3.0, 4.0, 0.0), NormKind::L2), 5.0);
        assert!((gauge(&dilate(&HeisPoint::new(1.0, -2.0, 0.7), 3.0).unwrap())
            - 3.0 * gauge(&HeisPoint::new(1.0, -2.0, 0.7)))
        .abs()
            < 1e-12);
    }

    #[test]
    fn trivial_distance() {
        let a = HeisPoint::new(1.0, 2.0, 3.0);
        let d = cc_distance(&a, &a, &CcOptions::default()).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(d.witness.controls.is_empty());
    }

    #[test]
    fn straight_segment_is_optimal() {
        let d = cc_distance(&HeisPoint::ORIGIN, &HeisPoint::new(1.0, 0.0, 0.0), &CcOptions::default())
            .unwrap();
        assert!((d.value - 1.0).abs() < 1e-3, "{d:?}");
        assert!(!d.degraded);
    }

    #[test]
    fn vertical_unit_matches_isoperimetric_value() {
        let d = cc_distance(&HeisPoint::ORIGIN, &HeisPoint::new(0.0, 0.0, 1.0), &CcOptions::default())
            .unwrap();
        let exact = 2.0 * PI.sqrt();
        assert!((d.value - exact).abs() < 2e-2, "{d:?}");
        assert!(d.value >= d.lower);
        assert!(d.lower <= exact + 1e-12);
        assert!(d.endpoint_error <= 1e-6);
        assert!(d.witness.max_contact_violation(4) <= 1e-9);
    }
}
