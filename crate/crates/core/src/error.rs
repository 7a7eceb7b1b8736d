use thiserror::Error;

use crate::cayley::GrowthTable;

/// Errors raised by the library. Each variant names the failing contract.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of the operation (bad distribution, q <= 0 with zeros, t <= 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or insufficient input (too few samples, open loop, empty fit window).
    #[error("input error: {0}")]
    Input(String),

    /// An extrapolated limit did not settle within tolerance.
    #[error("convergence error in {what}: last two estimates differ by {spread:e}")]
    Convergence { what: String, spread: f64 },

    /// Integer group law left the i64 range.
    #[error("integer overflow while multiplying group elements")]
    Overflow,

    /// Ball enumeration stopped because the next level would exceed the memory budget.
    /// The partial table covers every radius completed before the stop.
    #[error("memory budget of {budget_bytes} bytes exceeded at radius {radius}")]
    Budget {
        budget_bytes: u64,
        radius: u32,
        partial: Box<GrowthTable>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
