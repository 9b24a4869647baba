//! Command-line front end and HTTP session service for the hyperflip engine.

pub mod commands;
pub mod error;
pub mod format;
pub mod server;

pub use commands::{run, Io};
pub use error::CliError;
