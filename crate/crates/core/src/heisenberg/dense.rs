//! Plain dense 3×3 matrices. Reference implementation for cross-checking the
//! closed-form coordinate formulas; not used on any production path.

use super::lie::LieVector;
use super::matrix::HeisMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dense3(pub [[f64; 3]; 3]);

impl Dense3 {
    pub const ZERO: Self = Self([[0.0; 3]; 3]);
    pub const IDENTITY: Self = Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(d: [f64; 3]) -> Self {
        let mut m = Self::ZERO;
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Strictly upper triangular matrix of a Lie algebra element.
    pub fn from_lie(v: &LieVector) -> Self {
        Self([[0.0, v.alpha, v.gamma], [0.0, 0.0, v.beta], [0.0, 0.0, 0.0]])
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let mut out = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += o.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// General inverse via the adjugate. `None` for singular matrices.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 {
            return None;
        }
        let m = &self.0;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Some(Self(adj).scale(1.0 / det))
    }

    /// Reads back the coordinates if the matrix is unitriangular.
    pub fn to_heis(&self) -> Option<HeisMatrix> {
        let m = &self.0;
        let unit = m[0][0] == 1.0 && m[1][1] == 1.0 && m[2][2] == 1.0;
        let lower = m[1][0] == 0.0 && m[2][0] == 0.0 && m[2][1] == 0.0;
        (unit && lower).then(|| HeisMatrix::new(m[0][1], m[1][2], m[0][2]))
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(o.0.iter().flatten())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl From<HeisMatrix> for Dense3 {
    fn from(g: HeisMatrix) -> Self {
        Self([[1.0, g.a, g.b], [0.0, 1.0, g.c], [0.0, 0.0, 1.0]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_unitriangular() {
        let m = Dense3::from(HeisMatrix::new(2.0, -3.0, 5.0));
        let prod = m.matmul(&m.inverse().unwrap());
        assert!(prod.max_abs_diff(&Dense3::IDENTITY) < 1e-15);
        assert!(Dense3::ZERO.inverse().is_none());
    }
}
