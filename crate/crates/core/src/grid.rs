use crate::error::{Error, Result};

/// Regular 1D or 2D grid of sample points.
///
/// Axis 0 is `x`. Points are numbered row-major with `x` varying fastest,
/// so point `(i, j)` has index `j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let dims = shape.len();
        if !(1..=2).contains(&dims) {
            return Err(Error::Config(format!("grid must have 1 or 2 axes, got {dims}")));
        }
        if spacing.len() != dims || origin.len() != dims {
            return Err(Error::Config(
                "grid shape, spacing and origin must have equal length".into(),
            ));
        }
        if let Some(n) = shape.iter().find(|&&n| n < 3) {
            return Err(Error::Config(format!("grid axis has {n} points, need >= 3")));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::Config(format!("grid spacing must be positive, got {spacing:?}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(Grid { shape, spacing, origin })
    }

    /// Uniform 1D grid of `points` nodes spanning `[0, length]`, both ends included.
    pub fn line(points: usize, length: f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::Config(format!("grid axis has {points} points, need >= 3")));
        }
        Grid::new(vec![points], vec![length / (points - 1) as f64], vec![0.0])
    }

    /// Uniform 2D grid of `nx * ny` nodes spanning `[0, lx] x [0, ly]`.
    pub fn rect(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Config(format!("grid axes have {nx}x{ny} points, need >= 3")));
        }
        Grid::new(
            vec![nx, ny],
            vec![lx / (nx - 1) as f64, ly / (ny - 1) as f64],
            vec![0.0, 0.0],
        )
    }

    pub fn dims(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn point_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn nx(&self) -> usize {
        self.shape[0]
    }

    /// Points along `y`; 1 for a 1D grid.
    pub fn ny(&self) -> usize {
        self.shape.get(1).copied().unwrap_or(1)
    }

    /// Multi-index of a flat point index, padded to two axes.
    pub fn unravel(&self, point: usize) -> [usize; 2] {
        let nx = self.nx();
        [point % nx, point / nx]
    }

    pub fn ravel(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    /// Physical coordinate of a point along `axis`.
    pub fn coord(&self, point: usize, axis: usize) -> f64 {
        let idx = self.unravel(point)[axis];
        self.origin[axis] + idx as f64 * self.spacing[axis]
    }

    /// Physical extent `(min, max)` along an axis.
    pub fn extent(&self, axis: usize) -> (f64, f64) {
        let lo = self.origin[axis];
        (lo, lo + (self.shape[axis] - 1) as f64 * self.spacing[axis])
    }

    /// True when the point lies at least `margin` nodes away from every boundary.
    pub fn is_interior(&self, point: usize, margin: usize) -> bool {
        let idx = self.unravel(point);
        (0..self.dims()).all(|a| idx[a] >= margin && idx[a] + margin < self.shape[a])
    }

    /// Same axis counts and spacings within a relative tolerance.
    pub fn compatible(&self, other: &Grid) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        self.shape == other.shape
            && self.spacing.iter().zip(&other.spacing).all(|(&a, &b)| close(a, b))
            && self.origin.iter().zip(&other.origin).all(|(&a, &b)| close(a, b))
    }
}
