//! Ground-truth and assumed-model trajectory generation.

pub mod cavity;
pub mod forcing;
pub mod heat;

pub use cavity::{solve_lid_cavity_2d, CavityConfig, CavityRun, CavitySolver};
pub use forcing::{eval_forcing, eval_lid_velocity, forcing_trajectory, ForcingSample, Lid};
pub use heat::{solve_heat_1d, HeatConfig, HeatScheme, InitialProfile};
