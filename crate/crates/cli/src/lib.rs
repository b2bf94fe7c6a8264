//! Command-line front end: argument parsing, solution archives, the
//! subcommands and the validation suite.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod archive;
pub mod args;
pub mod commands;
pub mod error;
pub mod validation;

pub use error::{CliError, CliResult};
