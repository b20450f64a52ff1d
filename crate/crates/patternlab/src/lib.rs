//! Command-line driver for `patternlab-core`: disk cache, parallel
//! enumeration, JSON/CSV/DOT output and the verification suites.

pub mod cache;
pub mod cli;
pub mod error;
pub mod format;
pub mod parallel;
pub mod verify;

pub use error::{CliError, Result};
