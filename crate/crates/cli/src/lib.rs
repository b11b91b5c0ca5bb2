//! Command-line front end and simulation harness for `trendstat`.

pub mod commands;
pub mod config;
pub mod histogram;
pub mod ingest;
pub mod replicate;

pub const SCHEMA_VERSION: u32 = 1;
