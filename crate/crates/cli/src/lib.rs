//! Command-line front end: config parsing and subcommands writing CSV/JSON artifacts.

pub mod commands;
pub mod config;
