//! The real Heisenberg group in two coordinate systems.
//!
//! * [`HeisMatrix`] stores the entries of the unitriangular matrix
//!   `[[1, a, b], [0, 1, c], [0, 0, 1]]`. Products follow matrix multiplication.
//! * [`HeisPoint`] stores exponential coordinates `(x, y, z)` with the
//!   symmetrised product `(x1+x2, y1+y2, z1+z2 + (x1 y2 − x2 y1)/2)`.
//!
//! [`psi`] is the isomorphism between the two. The Lie algebra lives in [`lie`],
//! the commutative comparison group in [`abelian`], and [`dense`] holds a plain
//! 3×3 matrix implementation that is only used to cross-check the closed forms.

pub mod abelian;
pub mod dense;
pub mod lie;
mod matrix;
mod point;

pub use lie::{lie_bracket, LieVector};
pub use matrix::{commutator, double_commutator_check, exp_map, log_map, s_embed, HeisMatrix};
pub use point::{left_jacobian, left_translate, psi, psi_inv, HeisPoint};
