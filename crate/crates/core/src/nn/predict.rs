use std::ops::Range;

use ndarray::ArrayView2;

use crate::dataset::{NormStats, WindowSet};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::trajectory::{FieldView, Trajectory};

use super::network::Network;

/// Samples evaluated per forward pass.
const CHUNK: usize = 2048;

/// Network output assembled on the trajectory grid. Points that were not
/// predicted (boundary, masked, outside the requested frames) are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedField {
    grid: Grid,
    dt: f64,
    components: usize,
    frame_count: usize,
    values: Vec<f64>,
    present: Vec<bool>,
}

impl PredictedField {
    pub fn is_present(&self, frame: usize, point: usize) -> bool {
        self.present[frame * self.grid.point_count() + point]
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of `(frame, point)` predictions.
    pub fn present_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    /// Copy of `base` with the predicted values substituted where present.
    pub fn overlay(&self, base: &Trajectory) -> Result<Trajectory> {
        if base.grid() != &self.grid || base.frame_count() != self.frame_count || base.components() != self.components {
            return Err(Error::Shape("overlay base is not aligned with the prediction".into()));
        }
        let mut values = base.values().to_vec();
        let m = self.components;
        for (slot, &p) in self.present.iter().enumerate() {
            if p {
                values[slot * m..(slot + 1) * m].copy_from_slice(&self.values[slot * m..(slot + 1) * m]);
            }
        }
        Trajectory::new(
            format!("{}_nn", base.system()),
            self.grid.clone(),
            base.dt(),
            base.component_names().to_vec(),
            values,
        )
    }
}

impl FieldView for PredictedField {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn components(&self) -> usize {
        self.components
    }

    fn frame_count(&self) -> usize {
        self.frame_count
    }

    fn at(&self, frame: usize, point: usize) -> Option<&[f64]> {
        let slot = frame * self.grid.point_count() + point;
        if frame < self.frame_count && point < self.grid.point_count() && self.present[slot] {
            Some(&self.values[slot * self.components..(slot + 1) * self.components])
        } else {
            None
        }
    }
}

/// Evaluates the network at every eligible point of `frames`.
pub fn predict_field(
    network: &Network,
    windows: &WindowSet<'_>,
    frames: Range<usize>,
    norm: &NormStats,
) -> Result<PredictedField> {
    if frames.start < windows.first_frame() || frames.end > windows.frame_count() || frames.start > frames.end {
        return Err(Error::Shape(format!(
            "frames {}..{} outside the predictable range {}..{}",
            frames.start,
            frames.end,
            windows.first_frame(),
            windows.frame_count()
        )));
    }
    let (k, flen, m) = (windows.k(), windows.feature_len(), windows.outputs());
    if network.spec.seq_len != k || network.spec.input_features != flen {
        return Err(Error::Shape(format!(
            "windows are {k}x{flen}, network expects {}x{}",
            network.spec.seq_len, network.spec.input_features
        )));
    }
    if norm.feature_len() != flen {
        return Err(Error::Shape(format!(
            "normalization has {} features, windows have {flen}",
            norm.feature_len()
        )));
    }
    network.spec.check_outputs(m)?;
    let grid = windows.grid().clone();
    let n = grid.point_count();
    let frame_count = windows.frame_count();
    let mut values = vec![0.0; frame_count * n * m];
    let mut present = vec![false; frame_count * n];
    let index = windows.indices(frames);
    let width = k * flen;
    let mut buf = Vec::new();
    for chunk in index.chunks(CHUNK) {
        buf.resize(chunk.len() * width, 0.0);
        for (i, &idx) in chunk.iter().enumerate() {
            let out = &mut buf[i * width..(i + 1) * width];
            windows.fill(idx, out);
            norm.apply(out);
        }
        let x = ArrayView2::from_shape((chunk.len() * k, flen), &buf[..]).expect("buffer layout");
        let y = network.predict(x)?;
        for (row, &idx) in y.rows().into_iter().zip(chunk) {
            let slot = idx.frame * n + idx.point;
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Numeric(format!(
                        "non-finite prediction at frame {}, point {}",
                        idx.frame, idx.point
                    )));
                }
                values[slot * m + c] = v;
            }
            present[slot] = true;
        }
    }
    Ok(PredictedField {
        grid,
        dt: windows.act().dt(),
        components: m,
        frame_count,
        values,
        present,
    })
}
