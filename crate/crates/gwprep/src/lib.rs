//! Presets, file formats and command implementations for the `gwprep` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod report;

pub use config::RunConfig;
pub use error::CliError;
pub use report::Method;
