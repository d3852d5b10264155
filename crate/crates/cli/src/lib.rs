//! Config-driven experiment runner: data generation, training, evaluation
//! and the POD, horizon and spectral analyses.

pub mod config;
pub mod error;
pub mod record;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use record::RunRecord;
pub use runner::{run, Command, Invocation};
