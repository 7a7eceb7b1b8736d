use serde::{Deserialize, Serialize};

use super::matrix::HeisMatrix;

/// Exponential coordinates `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HeisPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisPoint {
    pub const ORIGIN: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Group product in exponential coordinates.
    pub fn exp_mul(&self, rhs: &Self) -> Self {
        Self {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            z: self.z + rhs.z + 0.5 * (self.x * rhs.y - rhs.x * self.y),
        }
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    /// Euclidean distance of the planar projections.
    pub fn planar_distance(&self, other: &Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Mul for HeisPoint {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.exp_mul(&rhs)
    }
}

/// `(x, y, z) ↦ [[1, x, z + xy/2], [0, 1, y], [0, 0, 1]]`, a group isomorphism.
pub fn psi(p: &HeisPoint) -> HeisMatrix {
    HeisMatrix::new(p.x, p.y, p.z + 0.5 * p.x * p.y)
}

pub fn psi_inv(g: &HeisMatrix) -> HeisPoint {
    HeisPoint::new(g.a, g.c, g.b - 0.5 * g.a * g.c)
}

/// `L_g(p) = g · p`.
pub fn left_translate(g: &HeisPoint, p: &HeisPoint) -> HeisPoint {
    g.exp_mul(p)
}

/// Differential of `L_g` in coordinates, `[[1,0,0],[0,1,0],[−y_g/2, x_g/2, 1]]`.
/// It does not depend on the point being translated.
pub fn left_jacobian(g: &HeisPoint) -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-0.5 * g.y, 0.5 * g.x, 1.0]]
}
