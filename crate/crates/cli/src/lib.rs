//! Library side of the `ifm-sim` binary: configuration, scenario runs,
//! stage sweeps, reports and the verification suite.

pub mod app;
pub mod config;
pub mod error;
pub mod input;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod verify;

pub use error::{CliError, Result};
