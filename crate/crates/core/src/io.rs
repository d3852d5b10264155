//! Trajectory persistence.
//!
//! A trajectory is stored as a plain-text manifest of `key=value` lines plus
//! a binary payload of little-endian `f64`, frame-major, then point index
//! (row-major, `x` fastest), then component. The manifest names its payload
//! file relative to its own directory:
//!
//! ```text
//! system=heat1d
//! n=1
//! m=1
//! shape=50
//! spacing=0.02040816326530612
//! origin=0
//! dt=0.000012
//! frame_count=500
//! components=u
//! payload=u_act.bin
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::trajectory::{FieldView, Trajectory};

const KEYS: [&str; 10] = [
    "system",
    "n",
    "m",
    "shape",
    "spacing",
    "origin",
    "dt",
    "frame_count",
    "components",
    "payload",
];

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Writes `path` (manifest) and a sibling `.bin` payload.
pub fn save_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    let payload = path.with_extension("bin");
    let payload_name = payload
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::format(path, "manifest path has no file name"))?
        .to_string();
    let grid = traj.grid();
    let mut manifest = String::new();
    let _ = writeln!(manifest, "system={}", traj.system());
    let _ = writeln!(manifest, "n={}", grid.dims());
    let _ = writeln!(manifest, "m={}", traj.components());
    let _ = writeln!(manifest, "shape={}", join(grid.shape()));
    let _ = writeln!(manifest, "spacing={}", join(grid.spacing()));
    let _ = writeln!(manifest, "origin={}", join(grid.origin()));
    let _ = writeln!(manifest, "dt={}", traj.dt());
    let _ = writeln!(manifest, "frame_count={}", traj.frame_count());
    let _ = writeln!(manifest, "components={}", traj.component_names().join(","));
    let _ = writeln!(manifest, "payload={payload_name}");

    let mut bytes = Vec::with_capacity(traj.values().len() * 8);
    for v in traj.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(&payload, bytes).map_err(|e| Error::io(&payload, e))?;
    fs::write(path, manifest).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(path: &Path, key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::format(path, format!("key `{key}`: cannot parse `{s}`")))
        })
        .collect()
}

/// Reads a manifest and its payload, verifying sizes and finiteness.
pub fn load_trajectory(path: &Path) -> Result<Trajectory> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut fields: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(path, format!("line {}: expected key=value", lineno + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::format(
                path,
                format!("line {}: unknown manifest key `{k}`", lineno + 1),
            ));
        }
        fields.push((k.to_string(), v.trim().to_string()));
    }
    let get = |key: &str| -> Result<&str> {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::format(path, format!("missing manifest key `{key}`")))
    };

    let n: usize = parse_list(path, "n", get("n")?)?[0];
    let m: usize = parse_list(path, "m", get("m")?)?[0];
    let shape: Vec<usize> = parse_list(path, "shape", get("shape")?)?;
    let spacing: Vec<f64> = parse_list(path, "spacing", get("spacing")?)?;
    let origin: Vec<f64> = match get("origin") {
        Ok(raw) => parse_list(path, "origin", raw)?,
        Err(_) => vec![0.0; shape.len()],
    };
    let dt: f64 = parse_list(path, "dt", get("dt")?)?[0];
    let frame_count: usize = parse_list(path, "frame_count", get("frame_count")?)?[0];
    let components: Vec<String> = get("components")?.split(',').map(|s| s.trim().to_string()).collect();
    if shape.len() != n {
        return Err(Error::format(path, format!("n={n} but shape has {} axes", shape.len())));
    }
    if components.len() != m {
        return Err(Error::format(
            path,
            format!("m={m} but {} component names", components.len()),
        ));
    }
    let grid = Grid::new(shape, spacing, origin).map_err(|e| Error::format(path, e.to_string()))?;

    let payload: PathBuf = match get("payload") {
        Ok(name) => path.parent().unwrap_or(Path::new("")).join(name),
        Err(_) => path.with_extension("bin"),
    };
    let bytes = fs::read(&payload).map_err(|e| Error::io(&payload, e))?;
    let expected = frame_count * grid.point_count() * m;
    if bytes.len() % 8 != 0 || bytes.len() / 8 != expected {
        return Err(Error::SizeMismatch {
            path: payload,
            expected,
            actual: bytes.len() / 8,
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let system = get("system").unwrap_or("external").to_string();
    Trajectory::new(system, grid, dt, components, values).map_err(|e| Error::format(&payload, e.to_string()))
}

/// CSV export with columns `frame,x[,y],<components...>`.
///
/// Values use Rust's shortest round-trip formatting, so re-import is exact.
pub fn export_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let grid = traj.grid();
    let mut out = String::new();
    out.push_str("frame,x");
    if grid.dims() == 2 {
        out.push_str(",y");
    }
    for c in traj.component_names() {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for f in 0..traj.frame_count() {
        for p in 0..grid.point_count() {
            let _ = write!(out, "{f},{}", grid.coord(p, 0));
            if grid.dims() == 2 {
                let _ = write!(out, ",{}", grid.coord(p, 1));
            }
            for v in traj.at(f, p).expect("in range") {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Re-imports a CSV written by [`export_csv`] onto a known grid.
pub fn import_csv(path: &Path, grid: Grid, dt: f64, system: &str) -> Result<Trajectory> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::format(path, "empty file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    let skip = 1 + grid.dims();
    if cols.len() <= skip {
        return Err(Error::format(path, "header has no component columns"));
    }
    let names: Vec<String> = cols[skip..].iter().map(|s| s.to_string()).collect();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != cols.len() {
            return Err(Error::format(
                path,
                format!("line {}: expected {} columns", i + 2, cols.len()),
            ));
        }
        for raw in &parts[skip..] {
            let v: f64 = raw
                .parse()
                .map_err(|_| Error::format(path, format!("line {}: bad number `{raw}`", i + 2)))?;
            values.push(v);
        }
    }
    Trajectory::new(system, grid, dt, names, values)
}
