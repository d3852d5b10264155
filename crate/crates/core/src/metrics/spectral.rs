use std::ops::Range;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::trajectory::FieldView;

/// Magnitudes below this are "no peak".
pub const PEAK_THRESHOLD: f64 = 1e-9;

/// One-sided magnitude spectrum of a real series.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    /// Frequency of the largest non-DC bin, or `None` below the threshold.
    pub fn dominant_frequency(&self) -> Option<f64> {
        let (i, &mag) = self
            .magnitudes
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        (mag > PEAK_THRESHOLD).then(|| self.frequencies[i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency,magnitude\n");
        for (f, m) in self.frequencies.iter().zip(&self.magnitudes) {
            out.push_str(&format!("{f},{m}\n"));
        }
        out
    }
}

/// Full complex DFT `X_k = sum_t x_t e^{-2 pi i k t / N}`.
pub fn dft(series: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&v| Complex::new(v, 0.0)).collect();
    if !buf.is_empty() {
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    }
    buf
}

/// `|X_k|` for `k = 0 .. N/2`, with bin `k` at `k / (N dt)` Hz.
pub fn dft_magnitude(series: &[f64], dt: f64) -> Result<Spectrum> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Shape("spectrum needs at least 2 samples".into()));
    }
    let full = dft(series);
    let bins = n / 2 + 1;
    Ok(Spectrum {
        frequencies: (0..bins).map(|k| k as f64 / (n as f64 * dt)).collect(),
        magnitudes: full[..bins].iter().map(|c| c.norm()).collect(),
    })
}

/// Which scalar series to analyse at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Component(usize),
    Magnitude,
}

impl Selector {
    fn apply(self, v: &[f64]) -> f64 {
        match self {
            Selector::Component(c) => v[c],
            Selector::Magnitude => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyDiff {
    /// Mean over used points of `|f_A - f_B| / f_B`.
    pub mean: f64,
    pub used: usize,
    pub skipped: usize,
    /// `(point, f_A, f_B)` per used point.
    pub peaks: Vec<(usize, f64, f64)>,
}

fn series(field: &dyn FieldView, point: usize, frames: &Range<usize>, sel: Selector) -> Result<Vec<f64>> {
    frames
        .clone()
        .map(|f| {
            field
                .at(f, point)
                .map(|v| sel.apply(v))
                .ok_or_else(|| Error::Shape(format!("field has no value at frame {f}, point {point}")))
        })
        .collect()
}

/// Mean relative difference of the dominant frequencies of `a` and the
/// reference `b` over `points`. Points without a peak in either are skipped.
pub fn freq_percent_diff(
    a: &dyn FieldView,
    b: &dyn FieldView,
    points: &[usize],
    frames: Range<usize>,
    dt: f64,
    selector: Selector,
) -> Result<FrequencyDiff> {
    if a.grid() != b.grid() || a.components() != b.components() {
        return Err(Error::Shape("fields differ in grid or component count".into()));
    }
    if let Selector::Component(c) = selector {
        if c >= a.components() {
            return Err(Error::Config(format!("component {c} out of range")));
        }
    }
    if frames.end > a.frame_count().min(b.frame_count()) || frames.len() < 2 {
        return Err(Error::Shape(format!(
            "frame range {}..{} unusable",
            frames.start, frames.end
        )));
    }
    let mut peaks = Vec::new();
    let mut skipped = 0;
    for &p in points {
        let fa = dft_magnitude(&series(a, p, &frames, selector)?, dt)?.dominant_frequency();
        let fb = dft_magnitude(&series(b, p, &frames, selector)?, dt)?.dominant_frequency();
        match (fa, fb) {
            (Some(fa), Some(fb)) => peaks.push((p, fa, fb)),
            _ => skipped += 1,
        }
    }
    if peaks.is_empty() {
        return Err(Error::Numeric("no point has a non-DC spectral peak".into()));
    }
    let mean = peaks.iter().map(|(_, fa, fb)| (fa - fb).abs() / fb).sum::<f64>() / peaks.len() as f64;
    Ok(FrequencyDiff {
        mean,
        used: peaks.len(),
        skipped,
        peaks,
    })
}
