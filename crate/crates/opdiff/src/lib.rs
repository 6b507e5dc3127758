//! Command-line front end for `opdiff-core`: run configuration, file formats
//! and the `build`, `verify`, `asymptotics`, `zeros` and `flow` commands.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::{AppError, AppResult};
