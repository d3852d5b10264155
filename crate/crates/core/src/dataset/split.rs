use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::window::{WindowIndex, WindowSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Assignment {
    Train,
    Validation,
    LocalTest,
    /// Boundary or masked-out point.
    Ineligible,
}

impl Assignment {
    pub fn as_str(self) -> &'static str {
        match self {
            Assignment::Train => "train",
            Assignment::Validation => "validation",
            Assignment::LocalTest => "local_test",
            Assignment::Ineligible => "ineligible",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "train" => Assignment::Train,
            "validation" => Assignment::Validation,
            "local_test" => Assignment::LocalTest,
            "ineligible" => Assignment::Ineligible,
            _ => return None,
        })
    }
}

/// Train/validation/local-test/future-test partition of the windows.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBundle {
    pub train: Vec<WindowIndex>,
    pub validation: Vec<WindowIndex>,
    pub local_test: Vec<WindowIndex>,
    pub future_test: Vec<WindowIndex>,
    /// Per grid point; identical for every training-range frame.
    pub split_map: Vec<Assignment>,
    pub seed: u64,
    /// Number of leading frames used for train/validation/local test.
    pub train_frames: usize,
    pub fractions: [f64; 3],
}

/// Point counts `(train, validation, local_test)` for `eligible` points.
///
/// Train takes `floor(f0 * P)`, validation `round(f1 * P)` and local test the
/// remainder.
pub fn split_counts(eligible: usize, fractions: [f64; 3]) -> (usize, usize, usize) {
    let p = eligible as f64;
    let train = ((fractions[0] * p) + 1e-9).floor() as usize;
    let train = train.min(eligible);
    let val = (fractions[1] * p).round() as usize;
    let val = val.min(eligible - train);
    (train, val, eligible - train - val)
}

fn check_fractions(fractions: [f64; 3]) -> Result<()> {
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "split fractions must be non-negative and sum to 1, got {fractions:?}"
        )));
    }
    Ok(())
}

fn assemble(
    windows: &WindowSet<'_>,
    split_map: Vec<Assignment>,
    train_frames: usize,
    fractions: [f64; 3],
    seed: u64,
) -> SplitBundle {
    let mut bundle = SplitBundle {
        train: Vec::new(),
        validation: Vec::new(),
        local_test: Vec::new(),
        future_test: windows.indices(train_frames..windows.frame_count()),
        split_map,
        seed,
        train_frames,
        fractions,
    };
    for idx in windows.indices(0..train_frames) {
        match bundle.split_map[idx.point] {
            Assignment::Train => bundle.train.push(idx),
            Assignment::Validation => bundle.validation.push(idx),
            Assignment::LocalTest => bundle.local_test.push(idx),
            Assignment::Ineligible => {}
        }
    }
    bundle
}

/// Randomly assigns eligible points to train/validation/local test (the
/// same assignment in every frame `< train_frames`) and puts every eligible
/// point of the remaining frames in the future test set.
pub fn split_dataset(
    windows: &WindowSet<'_>,
    train_frames: usize,
    fractions: [f64; 3],
    seed: u64,
) -> Result<SplitBundle> {
    check_fractions(fractions)?;
    if train_frames > windows.frame_count() {
        return Err(Error::Config(format!(
            "training range of {train_frames} frames exceeds the {} available",
            windows.frame_count()
        )));
    }
    if train_frames < windows.k() {
        return Err(Error::Config(format!(
            "training range of {train_frames} frames has no eligible frames for k = {}",
            windows.k()
        )));
    }
    let mut points = windows.eligible_points().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points.shuffle(&mut rng);
    let (n_train, n_val, _) = split_counts(points.len(), fractions);
    let mut split_map = vec![Assignment::Ineligible; windows.grid().point_count()];
    for (rank, &p) in points.iter().enumerate() {
        split_map[p] = if rank < n_train {
            Assignment::Train
        } else if rank < n_train + n_val {
            Assignment::Validation
        } else {
            Assignment::LocalTest
        };
    }
    Ok(assemble(windows, split_map, train_frames, fractions, seed))
}

/// Writes `split_map.csv` (`point_index,assignment`) and `split.txt`
/// (seed, training frames, fractions) into `dir`.
pub fn save_split(bundle: &SplitBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut csv = String::from("point_index,assignment\n");
    for (p, a) in bundle.split_map.iter().enumerate() {
        let _ = writeln!(csv, "{p},{}", a.as_str());
    }
    let map_path = dir.join("split_map.csv");
    fs::write(&map_path, csv).map_err(|e| Error::io(&map_path, e))?;
    let meta = format!(
        "seed={}\ntrain_frames={}\nfractions={},{},{}\n",
        bundle.seed, bundle.train_frames, bundle.fractions[0], bundle.fractions[1], bundle.fractions[2]
    );
    let meta_path = dir.join("split.txt");
    fs::write(&meta_path, meta).map_err(|e| Error::io(&meta_path, e))
}

/// Re-derives a bundle from files written by [`save_split`].
pub fn load_split(dir: &Path, windows: &WindowSet<'_>) -> Result<SplitBundle> {
    let meta_path = dir.join("split.txt");
    let meta = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let mut seed = None;
    let mut train_frames = None;
    let mut fractions = None;
    for line in meta.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(&meta_path, format!("bad line `{line}`")))?;
        let bad = || Error::format(&meta_path, format!("bad value for `{k}`"));
        match k.trim() {
            "seed" => seed = Some(v.trim().parse::<u64>().map_err(|_| bad())?),
            "train_frames" => train_frames = Some(v.trim().parse::<usize>().map_err(|_| bad())?),
            "fractions" => {
                let f: Vec<f64> = v
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                if f.len() != 3 {
                    return Err(bad());
                }
                fractions = Some([f[0], f[1], f[2]]);
            }
            other => return Err(Error::format(&meta_path, format!("unknown key `{other}`"))),
        }
    }
    let missing = |k: &str| Error::format(&meta_path, format!("missing `{k}`"));
    let seed = seed.ok_or_else(|| missing("seed"))?;
    let train_frames = train_frames.ok_or_else(|| missing("train_frames"))?;
    let fractions = fractions.ok_or_else(|| missing("fractions"))?;

    let map_path = dir.join("split_map.csv");
    let text = fs::read_to_string(&map_path).map_err(|e| Error::io(&map_path, e))?;
    let mut split_map = vec![Assignment::Ineligible; windows.grid().point_count()];
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::format(&map_path, format!("line {}: `{line}`", i + 1));
        let (p, a) = line.split_once(',').ok_or_else(bad)?;
        let p: usize = p.trim().parse().map_err(|_| bad())?;
        let a = Assignment::parse(a.trim()).ok_or_else(bad)?;
        *split_map.get_mut(p).ok_or_else(bad)? = a;
    }
    Ok(assemble(windows, split_map, train_frames, fractions, seed))
}
