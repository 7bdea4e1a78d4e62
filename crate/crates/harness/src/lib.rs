//! Experiment harness around `ris-mec-core`: TOML configuration, versioned
//! JSON/CSV files, teacher-labeled datasets, surrogate training and
//! evaluation, parameter sweeps, and the `ris-mec` command line.

pub mod cli;
pub mod config_file;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod io;
pub mod sweep;
pub mod training;

pub use error::{HarnessError, Result};
