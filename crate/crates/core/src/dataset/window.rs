use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::trajectory::{FieldView, Trajectory};

use super::norm::NormStats;

/// A target coordinate: grid point and frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct WindowIndex {
    pub point: usize,
    pub frame: usize,
}

/// One causal space-time hypercube and its target.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub center: WindowIndex,
    /// `k` time slices, oldest first; the last slice is the target frame.
    pub slices: Vec<Vec<f64>>,
    /// `U_act` at the center, physical units.
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowOptions {
    /// Stencil width along every axis and in time; odd.
    pub k: usize,
    /// Time range `(t_min, t_max)` mapped onto `[0, 1]` for the time coordinate.
    /// Defaults to the whole trajectory.
    pub time_range: Option<(f64, f64)>,
    /// Optional per-point eligibility mask for irregular domains.
    pub mask: Option<Vec<bool>>,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions {
            k: 3,
            time_range: None,
            mask: None,
        }
    }
}

/// Samples on one block of windows, flattened for the network.
///
/// `features` is `len x seq_len x feature_len`, `targets` is `len x outputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub seq_len: usize,
    pub feature_len: usize,
    pub outputs: usize,
    pub features: Vec<f64>,
    pub targets: Vec<f64>,
    pub index: Vec<WindowIndex>,
}

impl SampleMatrix {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn sample_features(&self, i: usize) -> &[f64] {
        let w = self.seq_len * self.feature_len;
        &self.features[i * w..(i + 1) * w]
    }

    pub fn sample_target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.outputs..(i + 1) * self.outputs]
    }
}

/// Windowing over a paired (`U_curr`, auxiliary, `U_act`) data set.
///
/// Feature layout of one time slice: `U_curr` components at the `k^n`
/// stencil points (point-major, `x` fastest), then auxiliary components at
/// the same points, then the center's coordinates `x[, y]` and the slice
/// time, each min-max scaled to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct WindowSet<'a> {
    curr: &'a Trajectory,
    aux: Option<&'a Trajectory>,
    act: &'a Trajectory,
    k: usize,
    offsets: Vec<(isize, isize)>,
    eligible: Vec<usize>,
    time_range: (f64, f64),
}

impl<'a> WindowSet<'a> {
    pub fn new(
        curr: &'a Trajectory,
        aux: Option<&'a Trajectory>,
        act: &'a Trajectory,
        options: WindowOptions,
    ) -> Result<Self> {
        if !curr.aligned_with(act) {
            return Err(Error::Shape(
                "U_curr and U_act differ in grid, frame interval or frame count".into(),
            ));
        }
        if let Some(a) = aux {
            if !a.aligned_with(act) {
                return Err(Error::Shape(
                    "auxiliary trajectory differs from U_act in grid, frame interval or frame count".into(),
                ));
            }
        }
        let k = options.k;
        if k == 0 || k.is_multiple_of(2) {
            return Err(Error::Config(format!("stencil width k must be odd, got {k}")));
        }
        let grid = act.grid();
        if grid.shape().iter().any(|&n| k > n) || k > act.frame_count() {
            return Err(Error::Config(format!(
                "stencil width {k} exceeds grid shape {:?} or frame count {}",
                grid.shape(),
                act.frame_count()
            )));
        }
        let r = (k / 2) as isize;
        let offsets: Vec<(isize, isize)> = if grid.dims() == 1 {
            (-r..=r).map(|dx| (dx, 0)).collect()
        } else {
            (-r..=r).flat_map(|dy| (-r..=r).map(move |dx| (dx, dy))).collect()
        };
        if let Some(mask) = &options.mask {
            if mask.len() != grid.point_count() {
                return Err(Error::Shape(format!(
                    "eligibility mask has {} entries for {} points",
                    mask.len(),
                    grid.point_count()
                )));
            }
        }
        let eligible: Vec<usize> = (0..grid.point_count())
            .filter(|&p| grid.is_interior(p, k / 2))
            .filter(|&p| options.mask.as_ref().is_none_or(|m| m[p]))
            .collect();
        let time_range = options.time_range.unwrap_or((0.0, act.time(act.frame_count() - 1)));
        Ok(WindowSet {
            curr,
            aux,
            act,
            k,
            offsets,
            eligible,
            time_range,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> &Grid {
        self.act.grid()
    }

    pub fn frame_count(&self) -> usize {
        self.act.frame_count()
    }

    pub fn curr(&self) -> &Trajectory {
        self.curr
    }

    pub fn act(&self) -> &Trajectory {
        self.act
    }

    pub fn aux(&self) -> Option<&Trajectory> {
        self.aux
    }

    pub fn time_range(&self) -> (f64, f64) {
        self.time_range
    }

    /// Grid points far enough from the boundary (and inside the mask).
    pub fn eligible_points(&self) -> &[usize] {
        &self.eligible
    }

    /// First frame with a full causal history.
    pub fn first_frame(&self) -> usize {
        self.k - 1
    }

    pub fn outputs(&self) -> usize {
        self.act.components()
    }

    pub fn feature_len(&self) -> usize {
        let pts = self.offsets.len();
        pts * self.curr.components() + pts * self.aux.map_or(0, |a| a.components()) + self.grid().dims() + 1
    }

    /// Windows for every eligible point at every eligible frame in
    /// `frames`, frame-major.
    pub fn indices(&self, frames: std::ops::Range<usize>) -> Vec<WindowIndex> {
        let start = frames.start.max(self.first_frame());
        let end = frames.end.min(self.frame_count());
        (start..end)
            .flat_map(|frame| self.eligible.iter().map(move |&point| WindowIndex { point, frame }))
            .collect()
    }

    fn check(&self, idx: WindowIndex) -> Result<()> {
        if idx.frame < self.first_frame() || idx.frame >= self.frame_count() {
            return Err(Error::Shape(format!(
                "frame {} outside the windowable range {}..{}",
                idx.frame,
                self.first_frame(),
                self.frame_count()
            )));
        }
        if !self.grid().is_interior(idx.point, self.k / 2) {
            return Err(Error::Shape(format!(
                "point {} is too close to the boundary",
                idx.point
            )));
        }
        Ok(())
    }

    /// Writes the `k x feature_len` raw features of one window into `out`.
    pub fn fill(&self, idx: WindowIndex, out: &mut [f64]) {
        let grid = self.grid();
        let [ci, cj] = grid.unravel(idx.point);
        let stencil: Vec<usize> = self
            .offsets
            .iter()
            .map(|&(dx, dy)| grid.ravel((ci as isize + dx) as usize, (cj as isize + dy) as usize))
            .collect();
        let coords: Vec<f64> = (0..grid.dims())
            .map(|a| {
                let (lo, hi) = grid.extent(a);
                (grid.coord(idx.point, a) - lo) / (hi - lo)
            })
            .collect();
        let (t0, t1) = self.time_range;
        let span = if t1 > t0 { t1 - t0 } else { 1.0 };
        let flen = self.feature_len();
        for s in 0..self.k {
            let frame = idx.frame + 1 + s - self.k;
            let slot = &mut out[s * flen..(s + 1) * flen];
            let mut w = 0;
            for &p in &stencil {
                for &v in self.curr.at(frame, p).expect("in range") {
                    slot[w] = v;
                    w += 1;
                }
            }
            if let Some(aux) = self.aux {
                for &p in &stencil {
                    for &v in aux.at(frame, p).expect("in range") {
                        slot[w] = v;
                        w += 1;
                    }
                }
            }
            for &c in &coords {
                slot[w] = c;
                w += 1;
            }
            slot[w] = (self.act.time(frame) - t0) / span;
        }
    }

    pub fn sample(&self, idx: WindowIndex) -> Result<WindowSample> {
        self.check(idx)?;
        let flen = self.feature_len();
        let mut buf = vec![0.0; self.k * flen];
        self.fill(idx, &mut buf);
        Ok(WindowSample {
            center: idx,
            slices: buf.chunks(flen).map(<[f64]>::to_vec).collect(),
            target: self.act.at(idx.frame, idx.point).expect("in range").to_vec(),
        })
    }

    /// Flattens the given windows, optionally normalizing features.
    pub fn materialize(&self, index: &[WindowIndex], norm: Option<&NormStats>) -> Result<SampleMatrix> {
        let flen = self.feature_len();
        let width = self.k * flen;
        let m = self.outputs();
        let mut features = vec![0.0; index.len() * width];
        let mut targets = Vec::with_capacity(index.len() * m);
        for (i, &idx) in index.iter().enumerate() {
            self.check(idx)?;
            let out = &mut features[i * width..(i + 1) * width];
            self.fill(idx, out);
            if let Some(n) = norm {
                n.apply(out);
            }
            targets.extend_from_slice(self.act.at(idx.frame, idx.point).expect("in range"));
        }
        Ok(SampleMatrix {
            seq_len: self.k,
            feature_len: flen,
            outputs: m,
            features,
            targets,
            index: index.to_vec(),
        })
    }
}

/// One window per eligible (point, frame >= k-1), frame-major.
pub fn build_windows(
    curr: &Trajectory,
    aux: Option<&Trajectory>,
    act: &Trajectory,
    k: usize,
) -> Result<Vec<WindowSample>> {
    let set = WindowSet::new(
        curr,
        aux,
        act,
        WindowOptions {
            k,
            ..WindowOptions::default()
        },
    )?;
    set.indices(0..set.frame_count())
        .into_iter()
        .map(|idx| set.sample(idx))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_traj(points: usize, frames: usize, f: impl Fn(usize, usize) -> f64) -> Trajectory {
        let grid = Grid::line(points, (points - 1) as f64).unwrap();
        let values = (0..frames)
            .flat_map(|t| (0..points).map(move |p| (t, p)))
            .map(|(t, p)| f(t, p))
            .collect();
        Trajectory::new("t", grid, 0.5, vec!["u".into()], values).unwrap()
    }

    #[test]
    fn causal_slices_and_layout() {
        let curr = line_traj(6, 5, |t, p| (10 * t + p) as f64);
        let act = line_traj(6, 5, |t, p| -((10 * t + p) as f64));
        let set = WindowSet::new(&curr, None, &act, WindowOptions::default()).unwrap();
        assert_eq!(set.feature_len(), 5);
        let s = set.sample(WindowIndex { point: 3, frame: 2 }).unwrap();
        assert_eq!(s.slices.len(), 3);
        // slice j covers frame j; stencil points 2,3,4; x = 3/5; t = j*0.5/2
        for (j, slice) in s.slices.iter().enumerate() {
            let base = (10 * j) as f64;
            assert_eq!(&slice[..3], &[base + 2.0, base + 3.0, base + 4.0]);
            assert!((slice[3] - 0.6).abs() < 1e-15);
            assert!((slice[4] - j as f64 * 0.5 / 2.0).abs() < 1e-15);
        }
        assert_eq!(s.target, vec![-23.0]);
    }

    #[test]
    fn counts_heat_scale() {
        let curr = line_traj(50, 500, |_, _| 0.0);
        let ws = build_windows(&curr, None, &curr, 3).unwrap();
        assert_eq!(ws.len(), 48 * 498);
        assert!(ws.iter().all(|w| w.slices.len() == 3));
    }

    #[test]
    fn two_d_counts_and_feature_len() {
        let grid = Grid::rect(30, 30, 1.0, 1.0).unwrap();
        let values = vec![0.0; 4 * 900 * 2];
        let t = Trajectory::new("c", grid, 1e-3, vec!["u".into(), "v".into()], values).unwrap();
        let set = WindowSet::new(&t, Some(&t), &t, WindowOptions::default()).unwrap();
        assert_eq!(set.eligible_points().len(), 784);
        assert_eq!(set.feature_len(), 9 * 2 + 9 * 2 + 3);
        assert_eq!(set.indices(0..4).len(), 784 * 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = line_traj(6, 5, |_, _| 0.0);
        let b = line_traj(7, 5, |_, _| 0.0);
        assert!(WindowSet::new(&a, None, &b, WindowOptions::default()).is_err());
        let even = WindowOptions {
            k: 4,
            ..WindowOptions::default()
        };
        assert!(WindowSet::new(&a, None, &a, even).is_err());
        let huge = WindowOptions {
            k: 7,
            ..WindowOptions::default()
        };
        assert!(WindowSet::new(&a, None, &a, huge).is_err());
    }

    #[test]
    fn mask_restricts_points() {
        let a = line_traj(10, 5, |_, _| 0.0);
        let mut mask = vec![true; 10];
        mask[4] = false;
        let set = WindowSet::new(
            &a,
            None,
            &a,
            WindowOptions {
                mask: Some(mask),
                ..WindowOptions::default()
            },
        )
        .unwrap();
        assert_eq!(set.eligible_points(), &[1, 2, 3, 5, 6, 7, 8]);
    }
}
