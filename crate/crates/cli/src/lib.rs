//! Batch driver: solve planar waves, run the verification pipelines and
//! write CSV, JSON and plot-data reports.

pub mod commands;
pub mod config;
pub mod oracle_suite;
pub mod report;
pub mod verify;

pub use commands::{run, Command, Outcome};
pub use config::RunConfig;
