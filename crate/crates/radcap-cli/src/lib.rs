//! Library side of the `radcap` command: configuration, subcommands, report emission and the
//! example gallery.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod gallery;
pub mod output;

pub use error::CliError;
