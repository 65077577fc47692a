//! Front end for expanderlab: the expression parser, subset specs, report
//! formatting and the subcommand runners.

pub mod commands;
pub mod parse;
pub mod report;
pub mod spec;
pub mod suite;

pub use commands::{run, Cli, CliError, Outcome};
