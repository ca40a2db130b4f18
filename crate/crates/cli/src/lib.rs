//! Command-line driver for `tennis-core`: run configuration, subcommand
//! dispatch, CSV and report-block output, and parallel ensemble drivers.

pub mod config;
pub mod output;
pub mod parallel;
pub mod run;

pub use config::{parse_config, ConfigError, ConfigErrors, MapKind, RunConfig};
pub use run::{execute, Artifact, Command, Model, Overrides};
