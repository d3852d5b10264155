use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::trajectory::FieldView;

/// Proper orthogonal decomposition of a snapshot set.
///
/// State vectors stack the components of the selected points, `(u_1 ..
/// u_P, v_1 .. v_P)`. `modes` holds every mode with non-negligible energy;
/// the first `retained` of them reach the requested energy fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct PodBasis {
    pub modes: DMatrix<f64>,
    /// Full eigenvalue spectrum of the covariance, non-increasing.
    pub eigenvalues: Vec<f64>,
    /// `modes.ncols() x frames`, with `x(t) = modes * coefficients[:, t]`.
    pub coefficients: DMatrix<f64>,
    pub retained: usize,
    pub energy_fraction: f64,
    pub requested: f64,
    pub points: Vec<usize>,
}

impl PodBasis {
    /// Columns `0..retained` of `modes`.
    pub fn retained_modes(&self) -> DMatrix<f64> {
        self.modes.columns(0, self.retained).into_owned()
    }

    pub fn mode(&self, i: usize) -> Vec<f64> {
        self.modes.column(i).iter().copied().collect()
    }
}

/// Snapshot matrix `X`, one column per frame.
pub fn snapshot_matrix(field: &dyn FieldView, points: &[usize], frames: Range<usize>) -> Result<DMatrix<f64>> {
    let m = field.components();
    let p = points.len();
    if frames.end > field.frame_count() || frames.start >= frames.end {
        return Err(Error::Shape(format!(
            "frame range {}..{} invalid for {} frames",
            frames.start,
            frames.end,
            field.frame_count()
        )));
    }
    let n = frames.end - frames.start;
    let mut x = DMatrix::<f64>::zeros(p * m, n);
    for (col, f) in frames.enumerate() {
        for (i, &pt) in points.iter().enumerate() {
            let v = field
                .at(f, pt)
                .ok_or_else(|| Error::Shape(format!("field has no value at frame {f}, point {pt}")))?;
            for c in 0..m {
                x[(c * p + i, col)] = v[c];
            }
        }
    }
    Ok(x)
}

fn sorted_eigen(mat: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (values, vectors)
}

/// Modified Gram-Schmidt, two passes.
fn orthonormalize(modes: &mut DMatrix<f64>) {
    for _ in 0..2 {
        for j in 0..modes.ncols() {
            for i in 0..j {
                let d = modes.column(i).dot(&modes.column(j));
                let ci = modes.column(i).into_owned();
                modes.column_mut(j).axpy(-d, &ci, 1.0);
            }
            let n = modes.column(j).norm();
            modes.column_mut(j).unscale_mut(n);
        }
    }
}

/// POD of a snapshot matrix with covariance `K = X X^T / N`.
///
/// Uses the method of snapshots (eigenvectors of `X^T X / N`) when there
/// are fewer frames than state entries, the covariance directly otherwise.
pub fn pod_of_matrix(x: &DMatrix<f64>, energy: f64) -> Result<PodBasis> {
    if !(energy > 0.0 && energy <= 1.0) {
        return Err(Error::Config(format!(
            "energy fraction must be in (0, 1], got {energy}"
        )));
    }
    let (dof, n) = x.shape();
    if n < 2 {
        return Err(Error::Shape("POD needs at least 2 frames".into()));
    }
    let scale = 1.0 / n as f64;
    let (eigenvalues, mut modes) = if n < dof {
        let (vals, v) = sorted_eigen(x.transpose() * x * scale);
        let total: f64 = vals.iter().filter(|&&l| l > 0.0).sum();
        let keep = vals.iter().take_while(|&&l| l > 1e-13 * total).count();
        let mut phi = DMatrix::<f64>::zeros(dof, keep);
        for (i, &l) in vals.iter().take(keep).enumerate() {
            let col = x * v.column(i) / (n as f64 * l).sqrt();
            phi.set_column(i, &col);
        }
        (vals, phi)
    } else {
        let (vals, v) = sorted_eigen(x * x.transpose() * scale);
        let total: f64 = vals.iter().filter(|&&l| l > 0.0).sum();
        let keep = vals.iter().take_while(|&&l| l > 1e-13 * total).count();
        (vals, v.columns(0, keep).into_owned())
    };
    let total: f64 = eigenvalues.iter().map(|l| l.max(0.0)).sum();
    if total.is_nan() || total <= 0.0 || modes.ncols() == 0 {
        return Err(Error::Numeric("POD of an all-zero snapshot set".into()));
    }
    orthonormalize(&mut modes);
    let mut cumulative = 0.0;
    let mut retained = 0;
    for l in &eigenvalues {
        cumulative += l.max(0.0);
        retained += 1;
        if cumulative / total >= energy - 1e-12 {
            break;
        }
    }
    let retained = retained.min(modes.ncols());
    let energy_fraction = eigenvalues[..retained].iter().map(|l| l.max(0.0)).sum::<f64>() / total;
    let coefficients = modes.transpose() * x;
    Ok(PodBasis {
        modes,
        eigenvalues,
        coefficients,
        retained,
        energy_fraction,
        requested: energy,
        points: Vec::new(),
    })
}

/// POD of `field` restricted to `points` and `frames`.
pub fn pod_decompose(field: &dyn FieldView, points: &[usize], frames: Range<usize>, energy: f64) -> Result<PodBasis> {
    let x = snapshot_matrix(field, points, frames)?;
    let mut basis = pod_of_matrix(&x, energy)?;
    basis.points = points.to_vec();
    Ok(basis)
}

/// `|<phi_i^A, phi_i^B>|` for each retained mode rank present in both.
pub fn cs_pod(a: &PodBasis, b: &PodBasis) -> Result<Vec<f64>> {
    if a.modes.nrows() != b.modes.nrows() || a.points != b.points {
        return Err(Error::Shape("POD bases are defined on different point sets".into()));
    }
    let r = a.retained.min(b.retained);
    Ok((0..r)
        .map(|i| a.modes.column(i).dot(&b.modes.column(i)).abs())
        .collect())
}
