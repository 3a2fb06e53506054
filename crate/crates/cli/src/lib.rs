//! Driver for the `rabi-bloch` command: configuration, figure presets, and
//! CSV/JSON export of simulated and predicted photon distributions.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
