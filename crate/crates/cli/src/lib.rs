//! Command line front end for the `kpisentinel` pipeline.
//!
//! Subcommands: `generate`, `cluster`, `detect`, `forecast`, `run`, `validate`.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

pub use commands::{execute, generate, GenerateOptions, Stage};
pub use config::{validate_config, PipelineConfig, RawConfig, Scope, ValidateOptions};
pub use error::{CliError, CliResult};
