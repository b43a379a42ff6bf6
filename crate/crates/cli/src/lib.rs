//! Command-line front end: argument parsing, experiment configs, run records
//! and the verification table.

pub mod args;
pub mod commands;
pub mod config;
pub mod record;
pub mod verify;
