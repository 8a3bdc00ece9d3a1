//! File formats, experiment harness and reports around [`workerset_core`].

pub mod config;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod report;

pub use config::{ExperimentConfig, Method};
pub use error::{CliError, Result};
