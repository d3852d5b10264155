use crate::dataset::WindowIndex;
use crate::error::{Error, Result};
use crate::trajectory::FieldView;

/// Norms below this are treated as zero vectors by [`mcs`].
pub const DEGENERATE_NORM: f64 = 1e-12;

fn check(a: &[f64], b: &[f64], m: usize) -> Result<()> {
    if m == 0 || a.len() != b.len() || !a.len().is_multiple_of(m) {
        return Err(Error::Shape(format!(
            "value sets of {} and {} entries are not aligned {m}-component sets",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Mean squared difference. Multi-component points are first reduced to
/// the average of their components.
pub fn mse_sets(a: &[f64], b: &[f64], m: usize) -> Result<f64> {
    check(a, b, m)?;
    if a.is_empty() {
        return Err(Error::Shape("empty value sets".into()));
    }
    let n = a.len() / m;
    let total: f64 = a
        .chunks(m)
        .zip(b.chunks(m))
        .map(|(p, q)| {
            let d = p.iter().sum::<f64>() / m as f64 - q.iter().sum::<f64>() / m as f64;
            d * d
        })
        .sum();
    Ok(total / n as f64)
}

/// Mean over points of `(|a_i| - |b_i|)^2`.
pub fn mmsd(a: &[f64], b: &[f64], m: usize) -> Result<f64> {
    check(a, b, m)?;
    if a.is_empty() {
        return Err(Error::Shape("empty value sets".into()));
    }
    let n = a.len() / m;
    let total: f64 = a
        .chunks(m)
        .zip(b.chunks(m))
        .map(|(p, q)| (norm(p) - norm(q)).powi(2))
        .sum();
    Ok(total / n as f64)
}

/// Mean cosine similarity over points where both vectors are non-degenerate.
pub fn mcs(a: &[f64], b: &[f64], m: usize) -> Result<f64> {
    check(a, b, m)?;
    let mut total = 0.0;
    let mut used = 0usize;
    for (p, q) in a.chunks(m).zip(b.chunks(m)) {
        let (np, nq) = (norm(p), norm(q));
        if np < DEGENERATE_NORM || nq < DEGENERATE_NORM {
            continue;
        }
        let dot: f64 = p.iter().zip(q).map(|(x, y)| x * y).sum();
        total += (dot / (np * nq)).clamp(-1.0, 1.0);
        used += 1;
    }
    if used == 0 {
        return Err(Error::Numeric(
            "cosine similarity undefined: every point has a zero vector".into(),
        ));
    }
    Ok(total / used as f64)
}

/// MSE, and for vector fields MMSD and MCS, between two aligned sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub count: usize,
    pub mse: f64,
    pub mmsd: Option<f64>,
    /// `None` for scalar fields or when every point is degenerate.
    pub mcs: Option<f64>,
}

pub fn compare_sets(a: &[f64], b: &[f64], m: usize) -> Result<Comparison> {
    let mse = mse_sets(a, b, m)?;
    let (mmsd, mcs) = if m >= 2 {
        (Some(mmsd(a, b, m)?), mcs(a, b, m).ok())
    } else {
        (None, None)
    };
    Ok(Comparison {
        count: a.len() / m,
        mse,
        mmsd,
        mcs,
    })
}

/// Values of `field` at `index`, concatenated. Absent points are an error.
pub fn gather(field: &dyn FieldView, index: &[WindowIndex]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(index.len() * field.components());
    for idx in index {
        let v = field.at(idx.frame, idx.point).ok_or_else(|| {
            Error::Shape(format!(
                "field has no value at frame {}, point {}",
                idx.frame, idx.point
            ))
        })?;
        out.extend_from_slice(v);
    }
    Ok(out)
}

/// [`compare_sets`] on two fields sampled at the same `(frame, point)` set.
pub fn compare_fields(a: &dyn FieldView, b: &dyn FieldView, index: &[WindowIndex]) -> Result<Comparison> {
    if a.components() != b.components() || a.grid() != b.grid() {
        return Err(Error::Shape("fields differ in grid or component count".into()));
    }
    compare_sets(&gather(a, index)?, &gather(b, index)?, a.components())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(mse_sets(&[1.0], &[3.0], 1).unwrap(), 4.0);
        assert_eq!(mse_sets(&[2.0, 4.0], &[0.0, 0.0], 2).unwrap(), 9.0);
        assert_eq!(mmsd(&[3.0, 4.0], &[0.0, 0.0], 2).unwrap(), 25.0);
        assert_eq!(mmsd(&[1.0, 0.0], &[0.0, 1.0], 2).unwrap(), 0.0);
        assert_eq!(mcs(&[1.0, 0.0], &[0.0, 1.0], 2).unwrap(), 0.0);
        assert_eq!(mcs(&[1.0, 0.0], &[-1.0, 0.0], 2).unwrap(), -1.0);
        let a = [0.3, -2.0, 1.5, 0.25];
        assert_eq!(mse_sets(&a, &a, 2).unwrap(), 0.0);
        assert!((mcs(&a, &a, 2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_points_excluded() {
        assert_eq!(mcs(&[0.0, 0.0, 1.0, 0.0], &[1.0, 0.0, 2.0, 0.0], 2).unwrap(), 1.0);
        assert!(mcs(&[0.0, 0.0], &[1.0, 0.0], 2).is_err());
    }

    #[test]
    fn misaligned_rejected() {
        assert!(mse_sets(&[1.0, 2.0], &[1.0], 1).is_err());
        assert!(mmsd(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 2).is_err());
    }
}
