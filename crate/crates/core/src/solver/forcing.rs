//! Body force and moving-lid boundary speeds for the forced lid cavity.

use crate::error::Result;
use crate::grid::Grid;
use crate::trajectory::Trajectory;

/// Body-force components at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingSample {
    pub fx: f64,
    pub fy: f64,
}

/// Whirlpool body force with a chirped periodic term, on the unit square.
///
/// The time-periodic factors `120 sin(e^{1.3t} + 80t)` and
/// `120 cos(e^{1.3t} + 80t)` multiply the `x^0` coefficient of each component.
pub fn eval_forcing(x: f64, y: f64, t: f64) -> ForcingSample {
    let phase = (1.3 * t).exp() + 80.0 * t;
    let y2 = y * y;
    let y3 = y2 * y;
    let y4 = y3 * y;
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x3 * x;

    let fx = (12.0 - 24.0 * y) * x4
        + (-24.0 + 48.0 * y) * x3
        + (-48.0 * y + 72.0 * y2 - 48.0 * y3 + 12.0) * x2
        + (-2.0 + 24.0 * y - 72.0 * y2 + 48.0 * y3) * x
        + (1.0 - 4.0 * y + 12.0 * y2 - 8.0 * y3) * 120.0 * phase.sin();
    let fy = (8.0 - 48.0 * y + 48.0 * y2) * x3
        + (-12.0 + 72.0 * y - 72.0 * y2) * x2
        + (4.0 - 24.0 * y + 48.0 * y2 - 48.0 * y3 + 24.0 * y4) * x
        + (-12.0 * y2 + 24.0 * y3 - 12.0 * y4) * 120.0 * phase.cos();
    ForcingSample { fx, fy }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lid {
    Top,
    Bottom,
}

/// Tangential (x-direction) wall speed of a moving lid.
pub fn eval_lid_velocity(lid: Lid, t: f64) -> f64 {
    let offset = match lid {
        Lid::Top => 60.0,
        Lid::Bottom => 50.0,
    };
    2.0 * (((1.2 * t).exp() + offset) * t).sin()
}

/// The body force sampled on every grid node at `t = frame * dt`, as a
/// two-component (`F_x`, `F_y`) trajectory.
pub fn forcing_trajectory(grid: &Grid, dt: f64, frame_count: usize) -> Result<Trajectory> {
    let n = grid.point_count();
    let mut values = Vec::with_capacity(frame_count * n * 2);
    for f in 0..frame_count {
        let t = f as f64 * dt;
        for p in 0..n {
            let s = eval_forcing(grid.coord(p, 0), grid.coord(p, 1), t);
            values.push(s.fx);
            values.push(s.fy);
        }
    }
    Trajectory::new("forcing", grid.clone(), dt, vec!["F_x".into(), "F_y".into()], values)
}
