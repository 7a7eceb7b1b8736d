//! Numerical laboratory for Tsallis q-algebra, the Heisenberg group and its
//! sub-Riemannian geometry, Pansu derivatives and word growth of the discrete
//! Heisenberg group.

pub mod cayley;
pub mod error;
pub mod heisenberg;
pub mod numeric;
pub mod optim;
pub mod pansu;
pub mod q_algebra;
pub mod subriemannian;

pub use error::{Error, Result};
