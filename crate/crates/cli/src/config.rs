//! Declarative experiment configuration (TOML).
//!
//! Every section is optional; omitted values fall back to per-system
//! defaults. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use gapbridge_core::nn::{AdamConfig, DenseSpec, NetworkSpec, TrainConfig};
use gapbridge_core::solver::{CavityConfig, HeatConfig, HeatScheme, InitialProfile};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemId {
    Heat1d,
    Lidcavity2d,
    External,
}

impl SystemId {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemId::Heat1d => "heat1d",
            SystemId::Lidcavity2d => "lidcavity2d",
            SystemId::External => "external",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSection {
    Uniform { value: f64 },
    Gaussian { amplitude: f64, center: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatSection {
    pub d_act: f64,
    pub d_curr: f64,
    pub length: f64,
    pub points: usize,
    pub dt: f64,
    pub substeps: usize,
    pub frame_count: usize,
    pub left: f64,
    pub right: f64,
    pub implicit: bool,
    pub initial: InitialSection,
}

impl Default for HeatSection {
    fn default() -> Self {
        let d = HeatConfig::default();
        HeatSection {
            d_act: 15.0,
            d_curr: 1.0,
            length: d.length,
            points: d.points,
            dt: d.dt,
            substeps: d.substeps,
            frame_count: d.frame_count,
            left: d.left,
            right: d.right,
            implicit: false,
            initial: InitialSection::Uniform { value: 0.0 },
        }
    }
}

impl HeatSection {
    pub fn solver(&self, diffusivity: f64) -> HeatConfig {
        HeatConfig {
            diffusivity,
            length: self.length,
            points: self.points,
            dt: self.dt,
            substeps: self.substeps,
            frame_count: self.frame_count,
            initial: match self.initial {
                InitialSection::Uniform { value } => InitialProfile::Uniform(value),
                InitialSection::Gaussian {
                    amplitude,
                    center,
                    width,
                } => InitialProfile::Gaussian {
                    amplitude,
                    center,
                    width,
                },
            },
            left: self.left,
            right: self.right,
            scheme: if self.implicit {
                HeatScheme::Implicit
            } else {
                HeatScheme::Explicit
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavitySection {
    pub reynolds: f64,
    pub points: usize,
    pub dt: f64,
    pub frame_count: usize,
    pub pressure_tolerance: f64,
    pub pressure_max_iters: usize,
    pub relaxation: f64,
    /// Moving lids in the assumed model (the true model always has them).
    pub curr_lids: bool,
}

impl Default for CavitySection {
    fn default() -> Self {
        let d = CavityConfig::default();
        CavitySection {
            reynolds: d.reynolds,
            points: d.points,
            dt: d.dt,
            frame_count: d.frame_count,
            pressure_tolerance: d.pressure_tolerance,
            pressure_max_iters: d.pressure_max_iters,
            relaxation: d.relaxation,
            curr_lids: true,
        }
    }
}

impl CavitySection {
    pub fn solver(&self, forcing: bool, lids: bool) -> CavityConfig {
        CavityConfig {
            reynolds: self.reynolds,
            points: self.points,
            dt: self.dt,
            frame_count: self.frame_count,
            forcing_enabled: forcing,
            moving_lids_enabled: lids,
            pressure_tolerance: self.pressure_tolerance,
            pressure_max_iters: self.pressure_max_iters,
            relaxation: self.relaxation,
        }
    }
}

/// Paths of pre-computed trajectories, relative to the config file.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExternalSection {
    pub act: Option<PathBuf>,
    pub curr: Option<PathBuf>,
    pub aux: Option<PathBuf>,
    /// CSV `point_index,eligible` (1/0) restricting eligible points.
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub k: Option<usize>,
    /// Leading frames used for train/validation/local test (`K`).
    pub train_frames: Option<usize>,
    pub fractions: Option<[f64; 3]>,
    pub split_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// Dense stacks as `width:activation` lists, e.g. `"32:relu,64:relu"`.
    pub stage1: Option<String>,
    pub stage2: Option<Vec<usize>>,
    pub stage3: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub init_seed: u64,
    pub shuffle_seed: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainSection {
            epochs: t.epochs,
            batch_size: t.batch_size,
            init_seed: 0,
            shuffle_seed: 0,
            learning_rate: t.adam.learning_rate,
            beta1: t.adam.beta1,
            beta2: t.adam.beta2,
            epsilon: t.adam.epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub energy: f64,
    /// Evaluate with `U_nn := U_act` to check the metric plumbing.
    pub self_test: bool,
    pub horizon: bool,
    pub horizon_interval: usize,
    pub fft: bool,
    /// `magnitude` or a component index such as `"0"`.
    pub fft_selector: String,
    /// Frame range `[start, end)`; defaults to the predictable training range.
    pub fft_frames: Option<[usize; 2]>,
    pub fft_split: String,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        EvaluateSection {
            energy: 0.99,
            self_test: false,
            horizon: false,
            horizon_interval: 250,
            fft: false,
            fft_selector: "magnitude".into(),
            fft_frames: None,
            fft_split: "local_test".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemId,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Also write CSV exports of trajectories and predictions.
    #[serde(default)]
    pub csv: bool,
    #[serde(default)]
    pub heat: HeatSection,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub external: ExternalSection,
    #[serde(default)]
    pub dataset: DatasetSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub evaluate: EvaluateSection,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
    /// SHA-256 of the config text.
    #[serde(skip)]
    pub hash: String,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.hash = hex::encode(Sha256::digest(text.as_bytes()));
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|_| CliError::Config(format!("cannot read config {}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Self::parse(&text, &base)
    }

    /// Applies `--seed`: every seed in the config becomes `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        self.dataset.split_seed = seed;
        self.train.init_seed = seed;
        self.train.shuffle_seed = seed;
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        match &self.out_dir {
            Some(p) => self.resolve(p),
            None => self.base_dir.join("run"),
        }
    }

    pub fn k(&self) -> usize {
        self.dataset.k.unwrap_or(3)
    }

    pub fn fractions(&self) -> [f64; 3] {
        self.dataset.fractions.unwrap_or([0.6, 0.1, 0.3])
    }

    /// `K`; `None` for external data means "half the frames".
    pub fn train_frames(&self, frame_count: usize) -> usize {
        self.dataset.train_frames.unwrap_or(match self.system {
            SystemId::Heat1d => 150,
            SystemId::Lidcavity2d => 1000,
            SystemId::External => frame_count / 2,
        })
    }

    /// Network layout: the heat default for scalar fields, the flow default otherwise,
    /// with any configured stage replacing the default.
    pub fn network_spec(&self, input_features: usize, outputs: usize) -> Result<NetworkSpec, CliError> {
        let k = self.k();
        let mut spec = if outputs == 1 {
            NetworkSpec::heat_default(input_features, k)
        } else {
            NetworkSpec::flow_default(input_features, k, outputs)
        };
        let dense = |s: &str| -> Result<Vec<DenseSpec>, CliError> {
            NetworkSpec::decode_dense(s).map_err(|e| CliError::Config(e.to_string()))
        };
        if let Some(s) = &self.network.stage1 {
            spec.stage1 = dense(s)?;
        }
        if let Some(s) = &self.network.stage2 {
            spec.stage2 = s.clone();
        }
        if let Some(s) = &self.network.stage3 {
            spec.stage3 = dense(s)?;
        }
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        spec.check_outputs(outputs)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            epochs: t.epochs,
            batch_size: t.batch_size,
            shuffle_seed: t.shuffle_seed,
            adam: AdamConfig {
                learning_rate: t.learning_rate,
                beta1: t.beta1,
                beta2: t.beta2,
                epsilon: t.epsilon,
            },
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let k = self.k();
        if k == 0 || k.is_multiple_of(2) {
            return Err(CliError::Config(format!("dataset.k must be odd, got {k}")));
        }
        if self.train.batch_size == 0 {
            return Err(CliError::Config("train.batch_size must be >= 1".into()));
        }
        if !(self.evaluate.energy > 0.0 && self.evaluate.energy <= 1.0) {
            return Err(CliError::Config("evaluate.energy must be in (0, 1]".into()));
        }
        if self.evaluate.horizon_interval == 0 {
            return Err(CliError::Config("evaluate.horizon_interval must be >= 1".into()));
        }
        if self.system == SystemId::External && (self.external.act.is_none() || self.external.curr.is_none()) {
            return Err(CliError::Config(
                "external system needs external.act and external.curr".into(),
            ));
        }
        match self.system {
            SystemId::Heat1d => {
                self.heat
                    .solver(self.heat.d_act)
                    .validate()
                    .map_err(|e| CliError::Config(e.to_string()))?;
                self.heat
                    .solver(self.heat.d_curr)
                    .validate()
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            SystemId::Lidcavity2d => {
                self.cavity
                    .solver(true, true)
                    .validate()
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            SystemId::External => {}
        }
        Ok(())
    }
}
