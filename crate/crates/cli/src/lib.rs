//! File formats, reports and subcommands of the `levelt` binary.

pub mod commands;
pub mod format;
pub mod report;

pub use commands::{run, Command, Output, Settings};
