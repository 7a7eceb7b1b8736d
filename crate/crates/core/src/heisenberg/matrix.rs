use serde::{Deserialize, Serialize};

use super::lie::LieVector;

/// Unitriangular 3×3 matrix `[[1, a, b], [0, 1, c], [0, 0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HeisMatrix {
    pub a: f64,
    pub c: f64,
    pub b: f64,
}

impl HeisMatrix {
    pub const IDENTITY: Self = Self {
        a: 0.0,
        c: 0.0,
        b: 0.0,
    };

    pub const fn new(a: f64, c: f64, b: f64) -> Self {
        Self { a, c, b }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a: self.a + rhs.a,
            c: self.c + rhs.c,
            b: self.b + rhs.b + self.a * rhs.c,
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            a: -self.a,
            c: -self.c,
            b: self.a * self.c - self.b,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.c - other.c).abs())
            .max((self.b - other.b).abs())
    }
}

impl std::ops::Mul for HeisMatrix {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        HeisMatrix::mul(&self, &rhs)
    }
}

/// Embeds a real number as the matrix with all three off-diagonal entries equal to `x`.
///
/// The corner entry of `s_embed(x) · s_embed(y)` is `x + y + xy`.
pub fn s_embed(x: f64) -> HeisMatrix {
    HeisMatrix::new(x, x, x)
}

/// Group commutator `g1 g2 g1⁻¹ g2⁻¹`. Always central: `(0, 0, a1 c2 − c1 a2)`.
pub fn commutator(g1: &HeisMatrix, g2: &HeisMatrix) -> HeisMatrix {
    g1.mul(g2).mul(&g1.inv()).mul(&g2.inv())
}

/// True iff `[g3, [g1, g2]]` is the identity.
pub fn double_commutator_check(g1: &HeisMatrix, g2: &HeisMatrix, g3: &HeisMatrix) -> bool {
    commutator(g3, &commutator(g1, g2)).is_identity()
}

/// `exp(αX + βY + γZ) = I + N + N²/2` (N³ = 0).
pub fn exp_map(v: &LieVector) -> HeisMatrix {
    HeisMatrix::new(v.alpha, v.beta, v.gamma + 0.5 * v.alpha * v.beta)
}

/// Exact inverse of [`exp_map`].
pub fn log_map(g: &HeisMatrix) -> LieVector {
    LieVector::new(g.a, g.c, g.b - 0.5 * g.a * g.c)
}

#[cfg(test)]
mod tests {
    use super::super::dense::Dense3;
    use super::*;

    #[test]
    fn s_embed_examples() {
        assert!(s_embed(0.0).is_identity());
        assert_eq!(s_embed(1.0), HeisMatrix::new(1.0, 1.0, 1.0));
        assert_ne!(s_embed(1.0), s_embed(1.5));
    }

    #[test]
    fn mul_matches_dense_oracle() {
        let g = s_embed(1.0) * s_embed(1.0);
        assert_eq!(g, HeisMatrix::new(2.0, 2.0, 3.0));
        let dense = Dense3::from(s_embed(1.0)).matmul(&Dense3::from(s_embed(1.0)));
        assert_eq!(dense.to_heis().unwrap(), g);
        let h = HeisMatrix::new(0.3, -1.2, 2.5);
        assert_eq!(h * HeisMatrix::IDENTITY, h);
        assert_eq!(HeisMatrix::IDENTITY * h, h);
    }

    #[test]
    fn inverse_examples() {
        for x in [-2.0, 0.5, 3.0] {
            assert_eq!(s_embed(x).inv(), HeisMatrix::new(-x, -x, x * x - x));
        }
        assert!(HeisMatrix::IDENTITY.inv().is_identity());
        let g = HeisMatrix::new(1.25, -0.5, 7.0);
        assert_eq!(g.inv().inv(), g);
        assert!((g * g.inv()).is_identity());
    }

    #[test]
    fn commutator_examples() {
        let x_gen = HeisMatrix::new(1.0, 0.0, 0.0);
        let y_gen = HeisMatrix::new(0.0, 1.0, 0.0);
        assert_eq!(commutator(&x_gen, &y_gen), HeisMatrix::new(0.0, 0.0, 1.0));
        let dense = Dense3::from(x_gen)
            .matmul(&Dense3::from(y_gen))
            .matmul(&Dense3::from(x_gen).inverse().unwrap())
            .matmul(&Dense3::from(y_gen).inverse().unwrap());
        assert_eq!(dense.to_heis().unwrap(), HeisMatrix::new(0.0, 0.0, 1.0));
        let g = HeisMatrix::new(0.7, 2.0, -1.0);
        assert!(commutator(&g, &g).is_identity());
        assert!(commutator(&s_embed(2.0), &s_embed(-3.0)).is_identity());
    }

    #[test]
    fn double_commutators_vanish_on_small_integers() {
        let range = -2..=2;
        let elems: Vec<HeisMatrix> = range
            .clone()
            .flat_map(|a| {
                range.clone().flat_map(move |c| {
                    (-1..=1).map(move |b| HeisMatrix::new(a as f64, c as f64, b as f64))
                })
            })
            .collect();
        for g1 in elems.iter().step_by(3) {
            for g2 in elems.iter().step_by(5) {
                for g3 in elems.iter().step_by(7) {
                    assert!(double_commutator_check(g1, g2, g3));
                }
            }
        }
        let id = HeisMatrix::IDENTITY;
        assert!(double_commutator_check(&id, &id, &id));
    }

    #[test]
    fn exp_log_examples() {
        assert!(exp_map(&LieVector::ZERO).is_identity());
        let g = exp_map(&LieVector::new(1.0, 1.0, 0.0));
        assert_eq!(g, HeisMatrix::new(1.0, 1.0, 0.5));
        // truncated series I + N + N²/2 through the dense oracle
        let n = Dense3::from_lie(&LieVector::new(1.0, 1.0, 0.0));
        let series = Dense3::IDENTITY.add(&n).add(&n.matmul(&n).scale(0.5));
        assert_eq!(series.to_heis().unwrap(), g);
        let v = LieVector::new(-0.3, 2.2, 1.7);
        let back = log_map(&exp_map(&v));
        assert!((back.alpha - v.alpha).abs() < 1e-14);
        assert!((back.beta - v.beta).abs() < 1e-14);
        assert!((back.gamma - v.gamma).abs() < 1e-14);
    }
}
