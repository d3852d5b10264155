//! 1D heat equation `u_t = D u_xx` on a vertex-centred finite-volume grid
//! with Dirichlet ends.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::trajectory::Trajectory;

/// Initial temperature profile. Boundary nodes are overwritten by the
/// Dirichlet values.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    Uniform(f64),
    /// Pulse `amplitude * exp(-(x - c)^2 / (2 sigma^2))` with `c` and `sigma`
    /// given as fractions of the domain length.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// One value per grid node.
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatScheme {
    /// Forward Euler; requires `D dt / dx^2 <= 0.5`.
    Explicit,
    /// Backward Euler, unconditionally stable.
    Implicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatConfig {
    /// Diffusion coefficient in length-unit^2 per second.
    pub diffusivity: f64,
    pub length: f64,
    pub points: usize,
    /// Frame interval in seconds.
    pub dt: f64,
    /// Solver steps per frame; the step size is `dt / substeps`.
    pub substeps: usize,
    pub frame_count: usize,
    pub initial: InitialProfile,
    pub left: f64,
    pub right: f64,
    pub scheme: HeatScheme,
}

impl Default for HeatConfig {
    /// 50 nodes on a unit-length rod, `dt = 1.2e-5 s`, 500 frames, the rod
    /// initially cold with the left end held at 1.
    fn default() -> Self {
        HeatConfig {
            diffusivity: 15.0,
            length: 1.0,
            points: 50,
            dt: 1.2e-5,
            substeps: 1,
            frame_count: 500,
            initial: InitialProfile::Uniform(0.0),
            left: 1.0,
            right: 0.0,
            scheme: HeatScheme::Explicit,
        }
    }
}

impl HeatConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::line(self.points, self.length)
    }

    /// `D * dt_step / dx^2`.
    pub fn mesh_ratio(&self) -> f64 {
        let dx = self.length / (self.points.max(2) - 1) as f64;
        self.diffusivity * (self.dt / self.substeps.max(1) as f64) / (dx * dx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diffusivity >= 0.0 && self.diffusivity.is_finite()) {
            return Err(Error::Config(format!(
                "diffusivity must be >= 0, got {}",
                self.diffusivity
            )));
        }
        if self.length.is_nan() || self.length <= 0.0 {
            return Err(Error::Config("rod length must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.substeps == 0 || self.frame_count == 0 {
            return Err(Error::Config("substeps and frame_count must be >= 1".into()));
        }
        if let InitialProfile::Values(v) = &self.initial {
            if v.len() != self.points {
                return Err(Error::Config(format!(
                    "initial profile has {} values for {} points",
                    v.len(),
                    self.points
                )));
            }
        }
        if self.scheme == HeatScheme::Explicit && self.mesh_ratio() > 0.5 {
            return Err(Error::Config(format!(
                "explicit scheme unstable: D*dt/dx^2 = {:.6} > 0.5 (D={}, dt={}, dx={})",
                self.mesh_ratio(),
                self.diffusivity,
                self.dt / self.substeps as f64,
                self.length / (self.points - 1) as f64
            )));
        }
        Ok(())
    }

    fn initial_values(&self, grid: &Grid) -> Vec<f64> {
        let n = self.points;
        let mut u: Vec<f64> = match &self.initial {
            InitialProfile::Uniform(v) => vec![*v; n],
            InitialProfile::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let c = center * self.length;
                let s = width * self.length;
                (0..n)
                    .map(|i| {
                        let x = grid.coord(i, 0);
                        amplitude * (-0.5 * ((x - c) / s).powi(2)).exp()
                    })
                    .collect()
            }
            InitialProfile::Values(v) => v.clone(),
        };
        u[0] = self.left;
        u[n - 1] = self.right;
        u
    }
}

fn explicit_step(u: &[f64], next: &mut [f64], r: f64) {
    let n = u.len();
    next[0] = u[0];
    next[n - 1] = u[n - 1];
    for i in 1..n - 1 {
        next[i] = u[i] + r * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
    }
}

/// Backward Euler via the Thomas algorithm on the interior unknowns.
fn implicit_step(u: &[f64], next: &mut [f64], r: f64, scratch: &mut Vec<(f64, f64)>) {
    let n = u.len();
    next[0] = u[0];
    next[n - 1] = u[n - 1];
    let m = n - 2;
    scratch.clear();
    // (1 + 2r) x_i - r x_{i-1} - r x_{i+1} = u_i, boundary values moved to the rhs.
    let (a, b) = (-r, 1.0 + 2.0 * r);
    let mut prev_c = 0.0;
    let mut prev_d = 0.0;
    for k in 0..m {
        let i = k + 1;
        let mut d = u[i];
        if k == 0 {
            d += r * u[0];
        }
        if k == m - 1 {
            d += r * u[n - 1];
        }
        let denom = if k == 0 { b } else { b - a * prev_c };
        let c = if k == m - 1 { 0.0 } else { a / denom };
        let dd = if k == 0 { d / b } else { (d - a * prev_d) / denom };
        scratch.push((c, dd));
        prev_c = c;
        prev_d = dd;
    }
    let mut x = 0.0;
    for k in (0..m).rev() {
        let (c, d) = scratch[k];
        x = if k == m - 1 { d } else { d - c * x };
        next[k + 1] = x;
    }
}

/// Integrates the rod and returns `frame_count` frames; frame 0 is the
/// initial profile with boundary values applied.
pub fn solve_heat_1d(config: &HeatConfig) -> Result<Trajectory> {
    config.validate()?;
    let grid = config.grid()?;
    let r = config.mesh_ratio();
    let mut u = config.initial_values(&grid);
    let mut next = vec![0.0; u.len()];
    let mut scratch = Vec::with_capacity(u.len());
    let mut values = Vec::with_capacity(config.frame_count * u.len());
    values.extend_from_slice(&u);
    for frame in 1..config.frame_count {
        for _ in 0..config.substeps {
            match config.scheme {
                HeatScheme::Explicit => explicit_step(&u, &mut next, r),
                HeatScheme::Implicit => implicit_step(&u, &mut next, r, &mut scratch),
            }
            std::mem::swap(&mut u, &mut next);
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("heat solution non-finite at frame {frame}")));
        }
        values.extend_from_slice(&u);
    }
    Trajectory::new("heat1d", grid, config.dt, vec!["u".into()], values)
}
