//! File formats, result documents, and subcommands behind the `bestalign`
//! binary.

pub mod commands;
pub mod document;
pub mod error;
pub mod format;
pub mod heatmap;

pub use commands::{run, Cli};
pub use error::CliError;
