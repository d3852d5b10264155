use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::window::{SampleMatrix, WindowIndex, WindowSet};

/// Per-feature affine normalization fitted on the training windows.
///
/// Statistics are shared across the `k` time slices, so there is one
/// `(shift, scale)` pair per slice feature.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

impl NormStats {
    /// Mean and population standard deviation of each slice feature over
    /// all slices of `train`. Zero-variance features get scale 1.
    pub fn fit(windows: &WindowSet<'_>, train: &[WindowIndex]) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Config(
                "cannot fit normalization on an empty training split".into(),
            ));
        }
        let flen = windows.feature_len();
        let k = windows.k();
        let mut buf = vec![0.0; k * flen];
        let mut sum = vec![0.0; flen];
        for &idx in train {
            windows.fill(idx, &mut buf);
            for slice in buf.chunks(flen) {
                for (s, v) in sum.iter_mut().zip(slice) {
                    *s += v;
                }
            }
        }
        let count = (train.len() * k) as f64;
        let shift: Vec<f64> = sum.iter().map(|s| s / count).collect();
        let mut sq = vec![0.0; flen];
        for &idx in train {
            windows.fill(idx, &mut buf);
            for slice in buf.chunks(flen) {
                for ((q, v), m) in sq.iter_mut().zip(slice).zip(&shift) {
                    *q += (v - m) * (v - m);
                }
            }
        }
        let scale = sq
            .iter()
            .zip(&shift)
            .map(|(q, m)| {
                let sd = (q / count).sqrt();
                if sd > 1e-12 * m.abs().max(1.0) {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(NormStats { shift, scale })
    }

    pub fn feature_len(&self) -> usize {
        self.shift.len()
    }

    /// Normalizes a `k x feature_len` block in place.
    pub fn apply(&self, features: &mut [f64]) {
        for slice in features.chunks_mut(self.shift.len()) {
            for ((v, m), s) in slice.iter_mut().zip(&self.shift).zip(&self.scale) {
                *v = (*v - m) / s;
            }
        }
    }

    pub fn invert(&self, features: &mut [f64]) {
        for slice in features.chunks_mut(self.shift.len()) {
            for ((v, m), s) in slice.iter_mut().zip(&self.shift).zip(&self.scale) {
                *v = *v * s + m;
            }
        }
    }

    /// CSV with columns `feature_index,shift,scale`.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("feature_index,shift,scale\n");
        for (i, (m, s)) in self.shift.iter().zip(&self.scale).enumerate() {
            let _ = writeln!(out, "{i},{m},{s}");
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut shift = Vec::new();
        let mut scale = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::format(path, format!("line {}: `{line}`", i + 1));
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 || cols[0].trim().parse::<usize>().ok() != Some(shift.len()) {
                return Err(bad());
            }
            shift.push(cols[1].trim().parse::<f64>().map_err(|_| bad())?);
            let s: f64 = cols[2].trim().parse().map_err(|_| bad())?;
            if s.is_nan() || s <= 0.0 {
                return Err(Error::format(path, format!("line {}: scale must be > 0", i + 1)));
            }
            scale.push(s);
        }
        Ok(NormStats { shift, scale })
    }
}

/// Normalized train/validation/local-test matrices. The (possibly very
/// large) future test set is materialized on demand.
#[derive(Debug, Clone)]
pub struct NormalizedData {
    pub train: SampleMatrix,
    pub validation: SampleMatrix,
    pub local_test: SampleMatrix,
}

/// Fits [`NormStats`] on the training windows and materializes the
/// training-range splits with normalized features and physical targets.
pub fn normalize(windows: &WindowSet<'_>, bundle: &super::SplitBundle) -> Result<(NormalizedData, NormStats)> {
    let stats = NormStats::fit(windows, &bundle.train)?;
    let data = NormalizedData {
        train: windows.materialize(&bundle.train, Some(&stats))?,
        validation: windows.materialize(&bundle.validation, Some(&stats))?,
        local_test: windows.materialize(&bundle.local_test, Some(&stats))?,
    };
    Ok((data, stats))
}
