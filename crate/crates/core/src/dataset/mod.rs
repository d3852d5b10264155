//! Causal space-time windows over paired trajectories, the per-point
//! train/validation/local-test/future-test split and feature normalization.

pub mod norm;
pub mod split;
pub mod window;

pub use norm::{normalize, NormStats, NormalizedData};
pub use split::{load_split, save_split, split_counts, split_dataset, Assignment, SplitBundle};
pub use window::{build_windows, SampleMatrix, WindowIndex, WindowOptions, WindowSample, WindowSet};
