use serde::{Deserialize, Serialize};

use crate::heisenberg::HeisPoint;

/// Left-invariant frame at a point, as coordinate column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub z: [f64; 3],
}

/// `X = (1, 0, −y/2)`, `Y = (0, 1, x/2)`, `Z = (0, 0, 1)` at `p`.
pub fn frame_at(p: &HeisPoint) -> Frame {
    Frame {
        x: [1.0, 0.0, -0.5 * p.y],
        y: [0.0, 1.0, 0.5 * p.x],
        z: [0.0, 0.0, 1.0],
    }
}

/// Contact form `dz − (x dy − y dx)/2` at `p` applied to `v = (dx, dy, dz)`.
pub fn contact_eval(p: &HeisPoint, v: [f64; 3]) -> f64 {
    v[2] - 0.5 * (p.x * v[1] - p.y * v[0])
}

/// A coordinate tangent vector attached to a base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVec {
    pub base: HeisPoint,
    pub v: [f64; 3],
}

impl TangentVec {
    pub fn is_horizontal(&self, tol: f64) -> bool {
        contact_eval(&self.base, self.v).abs() <= tol
    }
}

/// Applies a 3×3 matrix to a column vector.
pub fn apply(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{left_jacobian, left_translate};

    #[test]
    fn contact_examples() {
        let o = HeisPoint::ORIGIN;
        assert_eq!(contact_eval(&o, [1.0, 0.0, 0.0]), 0.0);
        assert_eq!(contact_eval(&o, [0.0, 0.0, 1.0]), 1.0);
        assert_eq!(contact_eval(&HeisPoint::new(0.0, 1.0, 0.0), [1.0, 0.0, -0.5]), 0.0);
    }

    #[test]
    fn frame_examples() {
        let f = frame_at(&HeisPoint::ORIGIN);
        assert_eq!(f.x, [1.0, 0.0, 0.0]);
        assert_eq!(f.y, [0.0, 1.0, 0.0]);
        let f = frame_at(&HeisPoint::new(2.0, 4.0, 0.0));
        assert_eq!(f.x, [1.0, 0.0, -2.0]);
        assert_eq!(f.y, [0.0, 1.0, 1.0]);
        let p = HeisPoint::new(-1.3, 0.7, 5.0);
        let f = frame_at(&p);
        assert_eq!(contact_eval(&p, f.x), 0.0);
        assert_eq!(contact_eval(&p, f.y), 0.0);
        assert!(!TangentVec { base: p, v: f.z }.is_horizontal(1e-12));
    }

    #[test]
    fn frame_is_pushed_forward_by_left_translation() {
        let g = HeisPoint::new(0.4, -2.5, 1.0);
        let p = HeisPoint::new(1.5, 0.25, -3.0);
        let j = left_jacobian(&g);
        let here = frame_at(&p);
        let there = frame_at(&left_translate(&g, &p));
        assert_eq!(apply(&j, here.x), there.x);
        assert_eq!(apply(&j, here.y), there.y);
        assert_eq!(apply(&j, here.z), there.z);
    }

    #[test]
    fn bracket_of_flows_is_vertical() {
        // flow X for s, Y for s, X back, Y back: displacement s^2 along Z
        let s = 1e-3;
        let step = |p: HeisPoint, u: f64, v: f64| p * HeisPoint::new(u, v, 0.0);
        let mut p = HeisPoint::ORIGIN;
        p = step(p, s, 0.0);
        p = step(p, 0.0, s);
        p = step(p, -s, 0.0);
        p = step(p, 0.0, -s);
        assert!(p.x.abs() < 1e-18 && p.y.abs() < 1e-18);
        assert!((p.z / (s * s) - 1.0).abs() < 1e-9);
    }
}
