//! Command-line tools, file formats and the parallel Monte Carlo harness
//! built on [`ousample_core`].

pub mod cli;
pub mod config;
mod error;
pub mod formats;
pub mod montecarlo;

pub use error::CliError;
