use serde::{Deserialize, Serialize};

use super::frame::{contact_eval, frame_at};
use crate::heisenberg::HeisPoint;

/// Velocity `u·X + v·Y` held for time `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub u: f64,
    pub v: f64,
    pub dt: f64,
}

impl Control {
    pub const fn new(u: f64, v: f64, dt: f64) -> Self {
        Self { u, v, dt }
    }

    /// Group element reached from the origin by this segment: a straight planar
    /// step, which encloses no area.
    pub fn increment(&self) -> HeisPoint {
        HeisPoint::new(self.u * self.dt, self.v * self.dt, 0.0)
    }
}

/// Norm used to measure horizontal speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    L2,
    L1,
    Linf,
}

impl NormKind {
    pub fn eval(self, u: f64, v: f64) -> f64 {
        match self {
            NormKind::L2 => u.hypot(v),
            NormKind::L1 => u.abs() + v.abs(),
            NormKind::Linf => u.abs().max(v.abs()),
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Self::L2),
            "l1" => Ok(Self::L1),
            "linf" => Ok(Self::Linf),
            other => Err(format!("unknown norm {other:?}, expected l2, l1 or linf")),
        }
    }
}

/// Piecewise-constant horizontal control sequence from `start`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HorizontalPath {
    pub start: HeisPoint,
    pub controls: Vec<Control>,
}

impl HorizontalPath {
    pub fn new(start: HeisPoint, controls: Vec<Control>) -> Self {
        Self { start, controls }
    }

    pub fn total_time(&self) -> f64 {
        self.controls.iter().map(|c| c.dt).sum()
    }

    /// The same controls started from `g · start`.
    pub fn left_translated(&self, g: &HeisPoint) -> Self {
        Self::new(g.exp_mul(&self.start), self.controls.clone())
    }

    /// Vertices after each segment, starting with `start`.
    pub fn vertices(&self) -> Vec<HeisPoint> {
        let mut out = Vec::with_capacity(self.controls.len() + 1);
        let mut p = self.start;
        out.push(p);
        for c in &self.controls {
            p = p.exp_mul(&c.increment());
            out.push(p);
        }
        out
    }

    /// Samples `(t, point)` with `per_segment` equal sub-steps on every segment.
    pub fn trace(&self, per_segment: usize) -> Vec<(f64, HeisPoint)> {
        let per_segment = per_segment.max(1);
        let mut out = Vec::with_capacity(self.controls.len() * per_segment + 1);
        let mut t = 0.0;
        let mut p = self.start;
        out.push((t, p));
        for c in &self.controls {
            for k in 1..=per_segment {
                let frac = k as f64 / per_segment as f64;
                let partial = Control::new(c.u, c.v, c.dt * frac);
                out.push((t + c.dt * frac, p.exp_mul(&partial.increment())));
            }
            t += c.dt;
            p = p.exp_mul(&c.increment());
        }
        out
    }

    /// Largest |contact form| of the path velocity over the sampled trace.
    pub fn max_contact_violation(&self, per_segment: usize) -> f64 {
        let per_segment = per_segment.max(1);
        let mut worst = 0.0_f64;
        let mut p = self.start;
        for c in &self.controls {
            for k in 0..per_segment {
                let frac = k as f64 / per_segment as f64;
                let q = p.exp_mul(&Control::new(c.u, c.v, c.dt * frac).increment());
                let f = frame_at(&q);
                let vel = [0, 1, 2].map(|i| c.u * f.x[i] + c.v * f.y[i]);
                worst = worst.max(contact_eval(&q, vel).abs());
            }
            p = p.exp_mul(&c.increment());
        }
        worst
    }
}

/// Endpoint of `ṗ = u X(p) + v Y(p)`, integrated exactly segment by segment.
pub fn integrate_path(path: &HorizontalPath) -> HeisPoint {
    path.controls
        .iter()
        .fold(path.start, |p, c| p.exp_mul(&c.increment()))
}

/// Σ ‖(u, v)‖ dt.
pub fn cc_length(path: &HorizontalPath, norm: NormKind) -> f64 {
    path.controls
        .iter()
        .map(|c| norm.eval(c.u, c.v) * c.dt)
        .sum()
}

/// Horizontal path from `a` to `b`: a straight segment to the planar target
/// followed by one square loop whose enclosed area fixes the vertical offset.
pub fn chow_connect(a: &HeisPoint, b: &HeisPoint) -> HorizontalPath {
    let g = a.inverse().exp_mul(b);
    let mut controls = Vec::with_capacity(5);
    let planar = g.x.hypot(g.y);
    if planar > 0.0 {
        controls.push(Control::new(g.x / planar, g.y / planar, planar));
    }
    if g.z != 0.0 {
        let side = g.z.abs().sqrt();
        let turns: [(f64, f64); 4] = if g.z > 0.0 {
            [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
        } else {
            [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)]
        };
        controls.extend(turns.iter().map(|&(u, v)| Control::new(u, v, side)));
    }
    HorizontalPath::new(*a, controls)
}
