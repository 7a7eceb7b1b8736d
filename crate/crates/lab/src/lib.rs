//! Reproducible experiments over `carnot-core`: configuration, dispatch,
//! report bundles, plot tables, the discrepancy ledger and the acceptance
//! criteria behind `verify-all`.

pub mod bundle;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod ledger;
pub mod verify;

pub use bundle::{emit_plot_table, ReportBundle};
pub use commands::{run, RunOutput};
pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
