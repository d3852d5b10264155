//! Learning neural corrections that bridge an inaccurate dynamical model to
//! observations of the true system.
//!
//! The crate covers the whole pipeline: PDE solvers that generate paired
//! trajectories ([`solver`]), causal space-time window datasets
//! ([`dataset`]), the dense → LSTM → dense correction network with Adam
//! training ([`nn`]), and comparison metrics including POD and spectral
//! periodicity ([`metrics`]).

pub mod dataset;
pub mod error;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod nn;
pub mod solver;
pub mod trajectory;

pub use error::{Error, Result};
pub use grid::Grid;
pub use trajectory::{FieldView, Trajectory};
