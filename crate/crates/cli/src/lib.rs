//! Command-line front end: building product graphs, embedding them,
//! verifying certificates, evaluating formulas, running the oracle and the
//! self-test grid.

pub mod commands;
pub mod error;
pub mod files;
pub mod selftest;

pub use error::{CliError, Result};
