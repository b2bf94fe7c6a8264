//! Acceptance harness for the fracwave suite.
//!
//! The checks themselves live in [`fracwave_cli::validation`] so that
//! `fracwave validate` and the `acceptance` test run the same code. This
//! package only hosts the test target, which runs after the unit and
//! integration tests of the other crates.

pub use fracwave_cli::validation::{check_ids, run, CheckOutcome};
