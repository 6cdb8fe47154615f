//! Command-line harness for `corrgrow`: simulation, detection and estimation
//! runs, plus the verification suites.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;
