//! Incompressible Navier-Stokes in the unit square with moving top and
//! bottom lids, advanced by a Chorin projection on a collocated grid.
//!
//! Advection is first-order upwind, diffusion uses the 5-point Laplacian and
//! the pressure correction is the exact discrete projection onto fields whose
//! central-difference divergence vanishes at every interior node. The
//! pressure equation `D D^T p = -D u* / dt` is solved by over-relaxed
//! Gauss-Seidel until the post-projection divergence is below tolerance.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::forcing::{eval_forcing, eval_lid_velocity, Lid};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub reynolds: f64,
    /// Nodes per side, walls included.
    pub points: usize,
    pub dt: f64,
    pub frame_count: usize,
    pub forcing_enabled: bool,
    pub moving_lids_enabled: bool,
    /// Bound on `max |div u|` after each projection.
    pub pressure_tolerance: f64,
    pub pressure_max_iters: usize,
    /// Over-relaxation factor for the pressure sweeps (1 = Gauss-Seidel).
    pub relaxation: f64,
}

impl Default for CavityConfig {
    fn default() -> Self {
        CavityConfig {
            reynolds: 100.0,
            points: 30,
            dt: 1e-3,
            frame_count: 2000,
            forcing_enabled: true,
            moving_lids_enabled: true,
            pressure_tolerance: 1e-5,
            pressure_max_iters: 20_000,
            relaxation: 1.7,
        }
    }
}

impl CavityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reynolds > 0.0 && self.reynolds.is_finite()) {
            return Err(Error::Config(format!(
                "Reynolds number must be > 0, got {}",
                self.reynolds
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.pressure_tolerance.is_nan() || self.pressure_tolerance <= 0.0 {
            return Err(Error::Config("pressure tolerance must be > 0".into()));
        }
        if self.points < 4 {
            return Err(Error::Config(format!(
                "cavity needs >= 4 nodes per side, got {}",
                self.points
            )));
        }
        if self.frame_count == 0 || self.pressure_max_iters == 0 {
            return Err(Error::Config("frame_count and pressure_max_iters must be >= 1".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::Config(format!(
                "relaxation must lie in (0, 2), got {}",
                self.relaxation
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::rect(self.points, self.points, 1.0, 1.0)
    }
}

/// Output of a cavity run.
#[derive(Debug, Clone)]
pub struct CavityRun {
    pub velocity: Trajectory,
    /// `max |div u|` after each step.
    pub divergence: Vec<f64>,
    /// Pressure sweeps used by each step.
    pub pressure_iterations: Vec<usize>,
}

/// Stateful stepper; exposed so single steps can be inspected.
#[derive(Debug, Clone)]
pub struct CavitySolver {
    cfg: CavityConfig,
    n: usize,
    h: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    p: Vec<f64>,
    us: Vec<f64>,
    vs: Vec<f64>,
    rhs: Vec<f64>,
    step: usize,
}

impl CavitySolver {
    pub fn new(cfg: CavityConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.points;
        let mut s = CavitySolver {
            h: 1.0 / (n - 1) as f64,
            n,
            u: vec![0.0; n * n],
            v: vec![0.0; n * n],
            p: vec![0.0; n * n],
            us: vec![0.0; n * n],
            vs: vec![0.0; n * n],
            rhs: vec![0.0; n * n],
            step: 0,
            cfg,
        };
        let (mut u, mut v) = (std::mem::take(&mut s.u), std::mem::take(&mut s.v));
        s.apply_walls(&mut u, &mut v, 0.0);
        s.u = u;
        s.v = v;
        Ok(s)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.cfg.dt
    }

    pub fn velocity(&self) -> (&[f64], &[f64]) {
        (&self.u, &self.v)
    }

    /// Provisional velocity from the last predictor step.
    pub fn provisional(&self) -> (&[f64], &[f64]) {
        (&self.us, &self.vs)
    }

    /// Interleaved `(u, v)` per node.
    pub fn frame(&self) -> Vec<f64> {
        self.u.iter().zip(&self.v).flat_map(|(&a, &b)| [a, b]).collect()
    }

    fn apply_walls(&self, u: &mut [f64], v: &mut [f64], t: f64) {
        let n = self.n;
        let (top, bottom) = if self.cfg.moving_lids_enabled {
            (eval_lid_velocity(Lid::Top, t), eval_lid_velocity(Lid::Bottom, t))
        } else {
            (0.0, 0.0)
        };
        for i in 0..n {
            let b = self.idx(i, 0);
            let tp = self.idx(i, n - 1);
            u[b] = bottom;
            v[b] = 0.0;
            u[tp] = top;
            v[tp] = 0.0;
        }
        for j in 0..n {
            for i in [0, n - 1] {
                let k = self.idx(i, j);
                u[k] = 0.0;
                v[k] = 0.0;
            }
        }
    }

    /// Explicit advection-diffusion-forcing update into the provisional field.
    pub fn predict(&mut self) {
        let n = self.n;
        let h = self.h;
        let dt = self.cfg.dt;
        let nu = 1.0 / self.cfg.reynolds;
        let t = self.time();
        let (u, v) = (&self.u, &self.v);
        let mut us = std::mem::take(&mut self.us);
        let mut vs = std::mem::take(&mut self.vs);
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = j * n + i;
                let (e, w, no, so) = (c + 1, c - 1, c + n, c - n);
                let (uc, vc) = (u[c], v[c]);
                let upwind = |f: &[f64]| -> f64 {
                    let dx = if uc > 0.0 { f[c] - f[w] } else { f[e] - f[c] };
                    let dy = if vc > 0.0 { f[c] - f[so] } else { f[no] - f[c] };
                    (uc * dx + vc * dy) / h
                };
                let lap = |f: &[f64]| (f[e] + f[w] + f[no] + f[so] - 4.0 * f[c]) / (h * h);
                let (fx, fy) = if self.cfg.forcing_enabled {
                    let s = eval_forcing(i as f64 * h, j as f64 * h, t);
                    (s.fx, s.fy)
                } else {
                    (0.0, 0.0)
                };
                us[c] = uc + dt * (-upwind(u) + nu * lap(u) + fx);
                vs[c] = vc + dt * (-upwind(v) + nu * lap(v) + fy);
            }
        }
        self.apply_walls(&mut us, &mut vs, t + dt);
        self.us = us;
        self.vs = vs;
    }

    /// Central-difference divergence at interior nodes (zero on walls).
    pub fn divergence(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = j * n + i;
                d[c] = (u[c + 1] - u[c - 1] + v[c + n] - v[c - n]) / (2.0 * self.h);
            }
        }
        d
    }

    fn interior(&self, k: usize) -> bool {
        k >= 1 && k + 1 < self.n
    }

    /// `(D D^T p)` at interior node `(i, j)`, with `p = 0` on walls.
    fn apply_normal(&self, p: &[f64], i: usize, j: usize) -> (f64, f64) {
        let n = self.n;
        let c = j * n + i;
        let s = 1.0 / (4.0 * self.h * self.h);
        let mut diag = 0.0;
        let mut off = 0.0;
        if self.interior(i + 1) {
            diag += s;
            if self.interior(i + 2) {
                off -= s * p[c + 2];
            }
        }
        if self.interior(i - 1) {
            diag += s;
            if i >= 2 && self.interior(i - 2) {
                off -= s * p[c - 2];
            }
        }
        if self.interior(j + 1) {
            diag += s;
            if self.interior(j + 2) {
                off -= s * p[c + 2 * n];
            }
        }
        if self.interior(j - 1) {
            diag += s;
            if j >= 2 && self.interior(j - 2) {
                off -= s * p[c - 2 * n];
            }
        }
        (diag, off)
    }

    fn max_projected_divergence(&self) -> f64 {
        let n = self.n;
        let dt = self.cfg.dt;
        let mut worst: f64 = 0.0;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = j * n + i;
                let (diag, off) = self.apply_normal(&self.p, i, j);
                let ap = diag * self.p[c] + off;
                // div(u) = div(u*) + dt * A p = dt * (A p - rhs)
                worst = worst.max((dt * (ap - self.rhs[c])).abs());
            }
        }
        worst
    }

    /// Projects the provisional field onto the discretely divergence-free
    /// set; returns the number of pressure sweeps.
    pub fn project(&mut self) -> Result<usize> {
        let n = self.n;
        let dt = self.cfg.dt;
        let div = self.divergence(&self.us, &self.vs);
        for (r, d) in self.rhs.iter_mut().zip(&div) {
            *r = -d / dt;
        }
        let omega = self.cfg.relaxation;
        let mut iters = 0;
        let mut residual = self.max_projected_divergence();
        while residual > self.cfg.pressure_tolerance {
            if iters >= self.cfg.pressure_max_iters {
                return Err(Error::Numeric(format!(
                    "pressure solve did not converge at step {}: max divergence {residual:.3e} > {:.1e} after {iters} sweeps",
                    self.step + 1,
                    self.cfg.pressure_tolerance
                )));
            }
            for _ in 0..5 {
                for j in 1..n - 1 {
                    for i in 1..n - 1 {
                        let c = j * n + i;
                        let (diag, off) = self.apply_normal(&self.p, i, j);
                        let gs = (self.rhs[c] - off) / diag;
                        self.p[c] += omega * (gs - self.p[c]);
                    }
                }
            }
            iters += 5;
            residual = self.max_projected_divergence();
        }
        // u = u* + dt D^T p
        let s = dt / (2.0 * self.h);
        let pz = |k: usize, p: &[f64]| p[k];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = j * n + i;
                let pw = if i >= 2 { pz(c - 1, &self.p) } else { 0.0 };
                let pe = if i + 2 < n { pz(c + 1, &self.p) } else { 0.0 };
                let ps = if j >= 2 { pz(c - n, &self.p) } else { 0.0 };
                let pn = if j + 2 < n { pz(c + n, &self.p) } else { 0.0 };
                self.u[c] = self.us[c] + s * (pw - pe);
                self.v[c] = self.vs[c] + s * (ps - pn);
            }
        }
        for j in 0..n {
            for i in 0..n {
                if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                    let c = j * n + i;
                    self.u[c] = self.us[c];
                    self.v[c] = self.vs[c];
                }
            }
        }
        Ok(iters)
    }

    /// One full time step; returns `(max |div u|, pressure sweeps)`.
    pub fn advance(&mut self) -> Result<(f64, usize)> {
        self.predict();
        let iters = self.project()?;
        self.step += 1;
        if self.u.iter().chain(&self.v).any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite velocity at step {} (t = {:.4} s)",
                self.step,
                self.time()
            )));
        }
        let d = self.divergence(&self.u, &self.v);
        let worst = d.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        Ok((worst, iters))
    }
}

/// Runs the cavity from rest and records `frame_count` velocity frames,
/// one solver step per frame.
pub fn solve_lid_cavity_2d(cfg: &CavityConfig) -> Result<CavityRun> {
    let mut solver = CavitySolver::new(cfg.clone())?;
    let grid = cfg.grid()?;
    let mut values = Vec::with_capacity(cfg.frame_count * grid.point_count() * 2);
    values.extend(solver.frame());
    let mut divergence = Vec::with_capacity(cfg.frame_count);
    let mut pressure_iterations = Vec::with_capacity(cfg.frame_count);
    for _ in 1..cfg.frame_count {
        let (d, it) = solver.advance()?;
        divergence.push(d);
        pressure_iterations.push(it);
        values.extend(solver.frame());
    }
    let velocity = Trajectory::new("lidcavity2d", grid, cfg.dt, vec!["u".into(), "v".into()], values)?;
    Ok(CavityRun {
        velocity,
        divergence,
        pressure_iterations,
    })
}
