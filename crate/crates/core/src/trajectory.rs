use crate::error::{Error, Result};
use crate::grid::Grid;

/// Read access to a (possibly partially populated) space-time field.
pub trait FieldView {
    fn grid(&self) -> &Grid;
    fn components(&self) -> usize;
    fn frame_count(&self) -> usize;
    /// Component values at `(frame, point)`, or `None` where the field is absent.
    fn at(&self, frame: usize, point: usize) -> Option<&[f64]>;
}

/// Ordered frames of an `m`-component field sampled on a fixed grid.
///
/// Frame `f` is at time `f * dt`. Values are stored frame-major, then by
/// point index, then by component.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    system: String,
    grid: Grid,
    dt: f64,
    component_names: Vec<String>,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(
        system: impl Into<String>,
        grid: Grid,
        dt: f64,
        component_names: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("frame interval must be positive, got {dt}")));
        }
        if component_names.is_empty() {
            return Err(Error::Config("trajectory needs at least one component".into()));
        }
        let per_frame = grid.point_count() * component_names.len();
        if values.is_empty() || !values.len().is_multiple_of(per_frame) {
            return Err(Error::Shape(format!(
                "{} values is not a positive multiple of the frame size {per_frame}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let frame = pos / per_frame;
            let point = (pos % per_frame) / component_names.len();
            return Err(Error::Numeric(format!(
                "non-finite value at frame {frame}, point {point}"
            )));
        }
        Ok(Trajectory {
            system: system.into(),
            grid,
            dt,
            component_names,
            values,
        })
    }

    /// Assembles a trajectory from per-frame buffers.
    pub fn from_frames(
        system: impl Into<String>,
        grid: Grid,
        dt: f64,
        component_names: Vec<String>,
        frames: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let per_frame = grid.point_count() * component_names.len();
        if let Some((f, frame)) = frames.iter().enumerate().find(|(_, f)| f.len() != per_frame) {
            return Err(Error::Shape(format!(
                "frame {f} has {} values, expected {per_frame}",
                frame.len()
            )));
        }
        Trajectory::new(system, grid, dt, component_names, frames.concat())
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn component_names(&self) -> &[String] {
        &self.component_names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn frame_len(&self) -> usize {
        self.grid.point_count() * self.component_names.len()
    }

    pub fn frame(&self, f: usize) -> &[f64] {
        let n = self.frame_len();
        &self.values[f * n..(f + 1) * n]
    }

    pub fn value(&self, frame: usize, point: usize, component: usize) -> f64 {
        let m = self.component_names.len();
        self.values[frame * self.frame_len() + point * m + component]
    }

    pub fn time(&self, frame: usize) -> f64 {
        frame as f64 * self.dt
    }

    /// Same grid, frame interval and frame count.
    pub fn aligned_with(&self, other: &Trajectory) -> bool {
        self.grid.compatible(&other.grid)
            && self.frame_count() == other.frame_count()
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
    }
}

impl FieldView for Trajectory {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn components(&self) -> usize {
        self.component_names.len()
    }

    fn frame_count(&self) -> usize {
        self.values.len() / self.frame_len()
    }

    fn at(&self, frame: usize, point: usize) -> Option<&[f64]> {
        if frame >= self.frame_count() || point >= self.grid.point_count() {
            return None;
        }
        let m = self.component_names.len();
        let start = frame * self.frame_len() + point * m;
        Some(&self.values[start..start + m])
    }
}
