use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::SampleMatrix;
use crate::error::{Error, Result};

use super::adam::{AdamConfig, AdamState};
use super::network::{mse_loss, Network};

/// Samples per forward pass when only evaluating.
const EVAL_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub shuffle_seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 64,
            shuffle_seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub seconds: Vec<f64>,
}

impl TrainHistory {
    pub fn epochs(&self) -> usize {
        self.train_loss.len()
    }

    /// CSV with columns `epoch,train_loss,val_loss,seconds`; epochs count from 1.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("epoch,train_loss,val_loss,seconds\n");
        for e in 0..self.epochs() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                e + 1,
                self.train_loss[e],
                self.val_loss[e],
                self.seconds[e]
            );
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut h = TrainHistory::default();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::format(path, format!("line {}: bad number", i + 1)))?;
            if cols.len() != 4 {
                return Err(Error::format(path, format!("line {}: expected 4 columns", i + 1)));
            }
            h.train_loss.push(cols[1]);
            h.val_loss.push(cols[2]);
            h.seconds.push(cols[3]);
        }
        Ok(h)
    }
}

fn feature_view(data: &SampleMatrix, range: std::ops::Range<usize>) -> ArrayView2<'_, f64> {
    let w = data.seq_len * data.feature_len;
    let rows = (range.end - range.start) * data.seq_len;
    ArrayView2::from_shape((rows, data.feature_len), &data.features[range.start * w..range.end * w])
        .expect("sample matrix layout")
}

fn target_view(data: &SampleMatrix, range: std::ops::Range<usize>) -> ArrayView2<'_, f64> {
    let m = data.outputs;
    ArrayView2::from_shape(
        (range.end - range.start, m),
        &data.targets[range.start * m..range.end * m],
    )
    .expect("sample matrix layout")
}

fn check_data(network: &Network, data: &SampleMatrix) -> Result<()> {
    if data.seq_len != network.spec.seq_len || data.feature_len != network.spec.input_features {
        return Err(Error::Shape(format!(
            "samples are {}x{}, network expects {}x{}",
            data.seq_len, data.feature_len, network.spec.seq_len, network.spec.input_features
        )));
    }
    network.spec.check_outputs(data.outputs)
}

/// Predictions for every sample, `len x m`.
pub fn predict_samples(network: &Network, data: &SampleMatrix) -> Result<Array2<f64>> {
    check_data(network, data)?;
    let mut out = Array2::zeros((data.len(), data.outputs));
    let mut start = 0;
    while start < data.len() {
        let end = (start + EVAL_CHUNK).min(data.len());
        let y = network.predict(feature_view(data, start..end))?;
        out.slice_mut(ndarray::s![start..end, ..]).assign(&y);
        start = end;
    }
    Ok(out)
}

/// Loss of `network` over a whole sample set; 0 for an empty set.
pub fn evaluate_loss(network: &Network, data: &SampleMatrix) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let pred = predict_samples(network, data)?;
    Ok(mse_loss(pred.view(), target_view(data, 0..data.len())))
}

/// Mini-batch Adam training.
///
/// Each epoch visits the training samples in a freshly shuffled order in
/// batches of `batch_size`, keeping the final short batch. The recorded
/// train loss is the full-pass loss of the parameters at the end of the
/// epoch, so it is directly comparable with the validation loss.
pub fn train(
    network: &Network,
    train_data: &SampleMatrix,
    validation: &SampleMatrix,
    config: &TrainConfig,
) -> Result<(Network, TrainHistory)> {
    check_data(network, train_data)?;
    check_data(network, validation)?;
    if config.batch_size == 0 {
        return Err(Error::Config("batch size must be >= 1".into()));
    }
    let mut net = network.clone();
    let mut history = TrainHistory::default();
    if config.epochs == 0 {
        return Ok((net, history));
    }
    if train_data.is_empty() {
        return Err(Error::Config("training split is empty".into()));
    }
    let mut adam = AdamState::new(&net, config.adam);
    let mut rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
    let mut order: Vec<usize> = (0..train_data.len()).collect();
    let (k, flen, m) = (train_data.seq_len, train_data.feature_len, train_data.outputs);
    let width = k * flen;
    for epoch in 0..config.epochs {
        let started = Instant::now();
        order.shuffle(&mut rng);
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let mut x = Array2::<f64>::zeros((chunk.len() * k, flen));
            let mut y = Array2::<f64>::zeros((chunk.len(), m));
            {
                let xs = x.as_slice_mut().expect("standard layout");
                let ys = y.as_slice_mut().expect("standard layout");
                for (r, &i) in chunk.iter().enumerate() {
                    xs[r * width..(r + 1) * width].copy_from_slice(train_data.sample_features(i));
                    ys[r * m..(r + 1) * m].copy_from_slice(train_data.sample_target(i));
                }
            }
            let (pred, cache) = net.forward(x.view())?;
            let loss = mse_loss(pred.view(), y.view());
            if !loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss at epoch {}, batch {}",
                    epoch + 1,
                    b + 1
                )));
            }
            let grad = net.backward(&cache, &pred, y.view());
            adam.step_network(&mut net, &grad)?;
        }
        let train_loss = evaluate_loss(&net, train_data)?;
        let val_loss = evaluate_loss(&net, validation)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::Numeric(format!("non-finite loss after epoch {}", epoch + 1)));
        }
        history.train_loss.push(train_loss);
        history.val_loss.push(val_loss);
        history.seconds.push(started.elapsed().as_secs_f64());
    }
    Ok((net, history))
}
