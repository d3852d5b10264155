//! Trained-network persistence.
//!
//! A manifest of `key=value` lines plus a payload of little-endian `f64`
//! parameters in canonical order: stage 1, 2, 3; within a stage layer by
//! layer; within a layer the weights (row-major, LSTM rows in gate blocks
//! F, I, C, O) then the bias.
//!
//! ```text
//! stage1=32:relu
//! stage2=64,32,32
//! stage3=10:relu,1:linear
//! input_features=7
//! seq_len=3
//! parameter_count=35571
//! init_seed=0
//! shuffle_seed=0
//! norm_stats=norm_stats.csv
//! epochs=50
//! final_train_loss=0.0001
//! final_val_loss=0.0001
//! payload=model.bin
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::network::Network;
use super::spec::NetworkSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub network: Network,
    pub init_seed: u64,
    pub shuffle_seed: u64,
    /// Normalization file, relative to the manifest directory.
    pub norm_stats: Option<String>,
    pub epochs: usize,
    pub final_train_loss: f64,
    pub final_val_loss: f64,
}

const KEYS: [&str; 13] = [
    "stage1",
    "stage2",
    "stage3",
    "input_features",
    "seq_len",
    "parameter_count",
    "init_seed",
    "shuffle_seed",
    "norm_stats",
    "epochs",
    "final_train_loss",
    "final_val_loss",
    "payload",
];

impl Checkpoint {
    /// Resolved path of the normalization file, if any.
    pub fn norm_stats_path(&self, manifest: &Path) -> Option<PathBuf> {
        self.norm_stats
            .as_ref()
            .map(|n| manifest.parent().unwrap_or(Path::new("")).join(n))
    }
}

pub fn save_checkpoint(ckpt: &Checkpoint, path: &Path) -> Result<()> {
    let payload = path.with_extension("bin");
    let payload_name = payload
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::format(path, "checkpoint path has no file name"))?
        .to_string();
    let spec = &ckpt.network.spec;
    let mut m = String::new();
    let _ = writeln!(m, "stage1={}", NetworkSpec::encode_dense(&spec.stage1));
    let _ = writeln!(
        m,
        "stage2={}",
        spec.stage2
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(m, "stage3={}", NetworkSpec::encode_dense(&spec.stage3));
    let _ = writeln!(m, "input_features={}", spec.input_features);
    let _ = writeln!(m, "seq_len={}", spec.seq_len);
    let _ = writeln!(m, "parameter_count={}", ckpt.network.parameter_count());
    let _ = writeln!(m, "init_seed={}", ckpt.init_seed);
    let _ = writeln!(m, "shuffle_seed={}", ckpt.shuffle_seed);
    if let Some(n) = &ckpt.norm_stats {
        let _ = writeln!(m, "norm_stats={n}");
    }
    let _ = writeln!(m, "epochs={}", ckpt.epochs);
    let _ = writeln!(m, "final_train_loss={}", ckpt.final_train_loss);
    let _ = writeln!(m, "final_val_loss={}", ckpt.final_val_loss);
    let _ = writeln!(m, "payload={payload_name}");

    let flat = ckpt.network.flat_params();
    let mut bytes = Vec::with_capacity(flat.len() * 8);
    for v in &flat {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(&payload, bytes).map_err(|e| Error::io(&payload, e))?;
    fs::write(path, m).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut fields: Vec<(&str, &str)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(path, format!("line {}: expected key=value", lineno + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::format(
                path,
                format!("line {}: unknown checkpoint key `{k}`", lineno + 1),
            ));
        }
        fields.push((k, v.trim()));
    }
    let get = |key: &str| -> Result<&str> {
        fields
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::format(path, format!("missing checkpoint key `{key}`")))
    };
    fn num<T: std::str::FromStr>(path: &Path, key: &str, raw: &str) -> Result<T> {
        raw.parse()
            .map_err(|_| Error::format(path, format!("key `{key}`: cannot parse `{raw}`")))
    }
    let bad_spec = |e: Error| Error::format(path, e.to_string());
    let spec = NetworkSpec {
        input_features: num(path, "input_features", get("input_features")?)?,
        seq_len: num(path, "seq_len", get("seq_len")?)?,
        stage1: NetworkSpec::decode_dense(get("stage1").unwrap_or("")).map_err(bad_spec)?,
        stage2: get("stage2")?
            .split(',')
            .map(|w| num(path, "stage2", w.trim()))
            .collect::<Result<_>>()?,
        stage3: NetworkSpec::decode_dense(get("stage3")?).map_err(bad_spec)?,
    };
    let mut network = Network::zeros(&spec).map_err(bad_spec)?;
    let declared: usize = num(path, "parameter_count", get("parameter_count")?)?;
    if declared != network.parameter_count() {
        return Err(Error::format(
            path,
            format!(
                "parameter_count={declared} but the layer layout has {}",
                network.parameter_count()
            ),
        ));
    }
    let payload = match get("payload") {
        Ok(name) => path.parent().unwrap_or(Path::new("")).join(name),
        Err(_) => path.with_extension("bin"),
    };
    let bytes = fs::read(&payload).map_err(|e| Error::io(&payload, e))?;
    if bytes.len() % 8 != 0 || bytes.len() / 8 != declared {
        return Err(Error::SizeMismatch {
            path: payload,
            expected: declared,
            actual: bytes.len() / 8,
        });
    }
    let flat: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
        return Err(Error::format(&payload, format!("non-finite parameter at index {i}")));
    }
    network.set_flat_params(&flat)?;
    Ok(Checkpoint {
        network,
        init_seed: num(path, "init_seed", get("init_seed")?)?,
        shuffle_seed: num(path, "shuffle_seed", get("shuffle_seed")?)?,
        norm_stats: get("norm_stats").ok().map(str::to_string),
        epochs: num(path, "epochs", get("epochs")?)?,
        final_train_loss: num(path, "final_train_loss", get("final_train_loss")?)?,
        final_val_loss: num(path, "final_val_loss", get("final_val_loss")?)?,
    })
}
