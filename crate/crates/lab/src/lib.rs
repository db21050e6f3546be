//! Trace files, experiment configuration and the runner behind the
//! `precision` command.

pub mod bounds;
pub mod commands;
pub mod config;
pub mod descriptor;
pub mod error;
pub mod output;
pub mod runner;
pub mod trace_io;

pub use error::{LabError, Result};
