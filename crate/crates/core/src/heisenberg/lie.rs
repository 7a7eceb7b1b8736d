//! The Lie algebra spanned by X, Y, Z with the single relation [X, Y] = Z, and
//! the commutative comparison algebra spanned by X_E, Y_E, Z_E.

use serde::{Deserialize, Serialize};

/// `α X + β Y + γ Z`, where X, Y, Z are the strictly upper triangular unit
/// matrices at positions (0,1), (1,2) and (0,2).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LieVector {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl LieVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const X: Self = Self::new(1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 1.0, 0.0);
    pub const Z: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.alpha, s * self.beta, s * self.gamma)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.alpha + o.alpha, self.beta + o.beta, self.gamma + o.gamma)
    }
}

/// `[A, B] = AB − BA`, which is `(0, 0, α1 β2 − β1 α2)` in the X, Y, Z basis.
pub fn lie_bracket(v1: &LieVector, v2: &LieVector) -> LieVector {
    LieVector::new(0.0, 0.0, v1.alpha * v2.beta - v1.beta * v2.alpha)
}

/// Bracket of the diagonal comparison algebra. Always zero.
pub fn abelian_bracket(_v1: &LieVector, _v2: &LieVector) -> LieVector {
    LieVector::ZERO
}

#[cfg(test)]
mod tests {
    use super::super::dense::Dense3;
    use super::*;

    #[test]
    fn basis_brackets() {
        assert_eq!(lie_bracket(&LieVector::X, &LieVector::Y), LieVector::Z);
        assert_eq!(lie_bracket(&LieVector::Y, &LieVector::X), LieVector::Z.scale(-1.0));
        assert_eq!(lie_bracket(&LieVector::X, &LieVector::X), LieVector::ZERO);
        assert_eq!(lie_bracket(&LieVector::X, &LieVector::Z), LieVector::ZERO);
        assert_eq!(lie_bracket(&LieVector::Y, &LieVector::Z), LieVector::ZERO);
        let xe = LieVector::X;
        let ye = LieVector::Y;
        assert_eq!(abelian_bracket(&xe, &ye), LieVector::ZERO);
        let (dx, dy) = (Dense3::diag([1.0, 0.0, 0.0]), Dense3::diag([0.0, 1.0, 0.0]));
        assert_eq!(dx.matmul(&dy).sub(&dy.matmul(&dx)), Dense3::ZERO);
    }

    #[test]
    fn bracket_matches_matrix_commutator() {
        let v1 = LieVector::new(1.5, -2.0, 0.25);
        let v2 = LieVector::new(0.5, 3.0, -1.0);
        let (m1, m2) = (Dense3::from_lie(&v1), Dense3::from_lie(&v2));
        let dense = m1.matmul(&m2).sub(&m2.matmul(&m1));
        assert_eq!(dense, Dense3::from_lie(&lie_bracket(&v1, &v2)));
    }
}
