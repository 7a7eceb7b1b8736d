//! The commutative comparison group: diagonal matrices diag(x, y, z) composed
//! by adding entries (translations of R³).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Translation {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Translation {
    pub const IDENTITY: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    /// Euclidean dilation by `t`.
    pub fn dilate(&self, t: f64) -> Self {
        Self::new(t * self.x, t * self.y, t * self.z)
    }
}

/// `x ↦ diag(x, x, x)`, the analogue of [`super::s_embed`] for ordinary addition.
pub fn abelian_embed(x: f64) -> Translation {
    Translation::new(x, x, x)
}

/// `g1 g2 g1⁻¹ g2⁻¹`; the identity for every pair.
pub fn abelian_commutator(g1: &Translation, g2: &Translation) -> Translation {
    g1.compose(g2).compose(&g1.inverse()).compose(&g2.inverse())
}
