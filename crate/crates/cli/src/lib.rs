//! Batch experiment runner for directed configuration model diagnostics.
//!
//! Each subcommand reads one JSON config, runs every `(n, seed)` job on a
//! bounded worker pool and writes per-run CSVs, an aggregate CSV and a
//! `summary.json` that embeds the resolved config.

pub mod app;
pub mod config;
pub mod error;
pub mod figure;
pub mod runner;
pub mod selftest;

pub use config::{Config, Kind};
pub use error::{CliError, CliResult};
