use ndarray::{s, Array2, ArrayView2, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::layers::{Dense, DenseCache, Lstm, LstmCache, FORGET};
use super::spec::NetworkSpec;

/// Parameters of the three-stage network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub spec: NetworkSpec,
    pub stage1: Vec<Dense>,
    pub stage2: Vec<Lstm>,
    pub stage3: Vec<Dense>,
}

/// Everything the backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    batch: usize,
    stage1: Vec<DenseCache>,
    stage2: Vec<LstmCache>,
    stage3: Vec<DenseCache>,
}

impl Network {
    /// All-zero parameters of the right shapes.
    pub fn zeros(spec: &NetworkSpec) -> Result<Self> {
        spec.validate()?;
        let mut width = spec.input_features;
        let stage1 = spec
            .stage1
            .iter()
            .map(|d| {
                let layer = Dense::zeros(width, d.width, d.activation);
                width = d.width;
                layer
            })
            .collect();
        let stage2 = spec
            .stage2
            .iter()
            .map(|&h| {
                let layer = Lstm::zeros(width, h);
                width = h;
                layer
            })
            .collect();
        let stage3 = spec
            .stage3
            .iter()
            .map(|d| {
                let layer = Dense::zeros(width, d.width, d.activation);
                width = d.width;
                layer
            })
            .collect();
        Ok(Network {
            spec: spec.clone(),
            stage1,
            stage2,
            stage3,
        })
    }

    /// Glorot-uniform weights, zero biases, forget-gate biases 1.
    ///
    /// Each LSTM gate block is initialised as its own `H x (H + I)` matrix.
    /// Draws follow the canonical parameter order, so the result depends
    /// only on `spec` and `seed`.
    pub fn init(spec: &NetworkSpec, seed: u64) -> Result<Self> {
        let mut net = Network::zeros(spec)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fill = |w: &mut [f64], fan_in: usize, fan_out: usize| {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound);
            for v in w.iter_mut() {
                *v = dist.sample(&mut rng);
            }
        };
        for d in &mut net.stage1 {
            let (o, i) = d.weights.dim();
            fill(d.weights.as_slice_mut().expect("standard layout"), i, o);
        }
        for l in &mut net.stage2 {
            let (h, cols) = (l.hidden, l.weights.ncols());
            fill(l.weights.as_slice_mut().expect("standard layout"), cols, h);
            l.bias.slice_mut(s![FORGET * h..(FORGET + 1) * h]).fill(1.0);
        }
        for d in &mut net.stage3 {
            let (o, i) = d.weights.dim();
            fill(d.weights.as_slice_mut().expect("standard layout"), i, o);
        }
        Ok(net)
    }

    pub fn zeros_like(&self) -> Self {
        Network::zeros(&self.spec).expect("spec already validated")
    }

    /// Parameter tensors in canonical order: stage, layer, weights (LSTM
    /// rows in gate order F, I, C, O; row-major) then bias.
    pub fn params(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for d in &self.stage1 {
            out.push(d.weights.as_slice().expect("standard layout"));
            out.push(d.bias.as_slice().expect("standard layout"));
        }
        for l in &self.stage2 {
            out.push(l.weights.as_slice().expect("standard layout"));
            out.push(l.bias.as_slice().expect("standard layout"));
        }
        for d in &self.stage3 {
            out.push(d.weights.as_slice().expect("standard layout"));
            out.push(d.bias.as_slice().expect("standard layout"));
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for d in &mut self.stage1 {
            out.push(d.weights.as_slice_mut().expect("standard layout"));
            out.push(d.bias.as_slice_mut().expect("standard layout"));
        }
        for l in &mut self.stage2 {
            out.push(l.weights.as_slice_mut().expect("standard layout"));
            out.push(l.bias.as_slice_mut().expect("standard layout"));
        }
        for d in &mut self.stage3 {
            out.push(d.weights.as_slice_mut().expect("standard layout"));
            out.push(d.bias.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    pub fn flat_params(&self) -> Vec<f64> {
        self.params().concat()
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.parameter_count() {
            return Err(Error::Shape(format!(
                "{} parameters supplied, network has {}",
                flat.len(),
                self.parameter_count()
            )));
        }
        let mut offset = 0;
        for p in self.params_mut() {
            p.copy_from_slice(&flat[offset..offset + p.len()]);
            offset += p.len();
        }
        Ok(())
    }

    fn check_input(&self, features: &ArrayView2<'_, f64>) -> Result<()> {
        let k = self.spec.seq_len;
        if features.ncols() != self.spec.input_features || !features.nrows().is_multiple_of(k) {
            return Err(Error::Shape(format!(
                "expected rows of {} features in groups of {k} slices, got {}x{}",
                self.spec.input_features,
                features.nrows(),
                features.ncols()
            )));
        }
        Ok(())
    }

    /// Forward pass over a batch.
    ///
    /// `features` holds one row per time slice, samples consecutive
    /// (`batch * seq_len` rows of `input_features`). Returns `batch x m`
    /// predictions and the cache for [`Network::backward`].
    pub fn forward(&self, features: ArrayView2<'_, f64>) -> Result<(Array2<f64>, ForwardCache)> {
        self.check_input(&features)?;
        let k = self.spec.seq_len;
        let batch = features.nrows() / k;
        let mut stage1 = Vec::with_capacity(self.stage1.len());
        let mut x = features.to_owned();
        for d in &self.stage1 {
            let c = d.forward_cached(x);
            x = c.output.clone();
            stage1.push(c);
        }
        // Rows of slice t are t, t + k, t + 2k, ...
        let mut seq: Vec<Array2<f64>> = (0..k).map(|t| x.slice(s![t..;k, ..]).to_owned()).collect();
        let mut stage2 = Vec::with_capacity(self.stage2.len());
        for l in &self.stage2 {
            let views: Vec<_> = seq.iter().map(|a| a.view()).collect();
            let c = l.forward(&views);
            seq = c.hidden.clone();
            stage2.push(c);
        }
        let mut y = seq.pop().expect("seq_len >= 1");
        let mut stage3 = Vec::with_capacity(self.stage3.len());
        for d in &self.stage3 {
            let c = d.forward_cached(y);
            y = c.output.clone();
            stage3.push(c);
        }
        Ok((
            y,
            ForwardCache {
                batch,
                stage1,
                stage2,
                stage3,
            },
        ))
    }

    /// Inference without caches.
    pub fn predict(&self, features: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_input(&features)?;
        let k = self.spec.seq_len;
        let mut x = features.to_owned();
        for d in &self.stage1 {
            x = d.forward(x.view());
        }
        let mut seq: Vec<Array2<f64>> = (0..k).map(|t| x.slice(s![t..;k, ..]).to_owned()).collect();
        for l in &self.stage2 {
            let views: Vec<_> = seq.iter().map(|a| a.view()).collect();
            seq = l.forward(&views).hidden;
        }
        let mut y = seq.pop().expect("seq_len >= 1");
        for d in &self.stage3 {
            y = d.forward(y.view());
        }
        Ok(y)
    }

    /// Gradients of [`mse_loss`] with respect to every parameter, given the
    /// cache of the forward pass that produced `predictions`.
    pub fn backward(&self, cache: &ForwardCache, predictions: &Array2<f64>, targets: ArrayView2<'_, f64>) -> Network {
        let mut grad = self.zeros_like();
        let n = (predictions.nrows() * predictions.ncols()) as f64;
        let mut d = (predictions - &targets) * (2.0 / n);
        for (l, layer) in self.stage3.iter().enumerate().rev() {
            d = layer.backward(&cache.stage3[l], d, &mut grad.stage3[l]);
        }
        let k = self.spec.seq_len;
        let batch = cache.batch;
        let top_width = self.stage2.last().expect("validated").hidden;
        let mut d_seq: Vec<Array2<f64>> = (0..k)
            .map(|t| {
                if t + 1 == k {
                    d.clone()
                } else {
                    Array2::zeros((batch, top_width))
                }
            })
            .collect();
        for (l, layer) in self.stage2.iter().enumerate().rev() {
            d_seq = layer.backward(&cache.stage2[l], &d_seq, &mut grad.stage2[l]);
        }
        let width = d_seq[0].ncols();
        let mut d1 = Array2::<f64>::zeros((batch * k, width));
        for (t, dt) in d_seq.iter().enumerate() {
            d1.slice_mut(s![t..;k, ..]).assign(dt);
        }
        for (l, layer) in self.stage1.iter().enumerate().rev() {
            d1 = layer.backward(&cache.stage1[l], d1, &mut grad.stage1[l]);
        }
        grad
    }

    pub fn all_finite(&self) -> bool {
        self.params().iter().all(|p| p.iter().all(|v| v.is_finite()))
    }
}

/// Mean over samples of the per-sample mean squared error across output
/// components.
pub fn mse_loss(predictions: ArrayView2<'_, f64>, targets: ArrayView2<'_, f64>) -> f64 {
    assert_eq!(predictions.dim(), targets.dim(), "prediction/target shape mismatch");
    if predictions.is_empty() {
        return 0.0;
    }
    let per_sample = (&predictions - &targets)
        .mapv(|e| e * e)
        .mean_axis(Axis(1))
        .expect("non-empty");
    per_sample.mean().expect("non-empty")
}
