//! The three-stage correction network: time-distributed dense layers, a
//! stack of LSTM layers and a dense head, trained with Adam on the
//! batch-mean squared error.

pub mod adam;
pub mod checkpoint;
pub mod layers;
pub mod network;
pub mod predict;
pub mod spec;
pub mod train;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use layers::{Dense, Lstm};
pub use network::{mse_loss, ForwardCache, Network};
pub use predict::{predict_field, PredictedField};
pub use spec::{Activation, DenseSpec, NetworkSpec};
pub use train::{evaluate_loss, predict_samples, train, TrainConfig, TrainHistory};
