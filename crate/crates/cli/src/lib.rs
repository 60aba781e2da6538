//! Command-line front end: run configuration, single-problem solves and the
//! sample studies with their CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
pub mod error;
pub mod output;
pub mod single;

pub use config::{Mode, RunConfig};
pub use error::{CliError, CliResult};
