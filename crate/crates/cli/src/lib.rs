//! File handling, configuration and command drivers behind the `geostab`
//! binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod json;
pub mod reports;

pub use config::Options;
pub use error::{CliError, CliResult, Outcome};
