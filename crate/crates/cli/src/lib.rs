//! Library side of the `extremal` command-line tool.

pub mod commands;
pub mod file;
pub mod report;

pub use commands::{CliError, Outcome};
pub use file::{FileError, SuperoperatorFile};
