use crate::dataset::WindowIndex;
use crate::error::{Error, Result};
use crate::trajectory::FieldView;

use super::sets::{compare_fields, Comparison};

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonRow {
    /// Frame range `start..end` of the interval.
    pub start: usize,
    pub end: usize,
    pub nn: Comparison,
    pub curr: Comparison,
}

/// Metrics over consecutive `interval`-frame blocks of `start..end`; the
/// last block may be shorter.
pub fn horizon_evaluation(
    nn: &dyn FieldView,
    curr: &dyn FieldView,
    act: &dyn FieldView,
    points: &[usize],
    start: usize,
    end: usize,
    interval: usize,
) -> Result<Vec<HorizonRow>> {
    if interval == 0 {
        return Err(Error::Config("horizon interval must be >= 1".into()));
    }
    if start >= end || end > act.frame_count() {
        return Err(Error::Shape(format!(
            "empty or out-of-range horizon {start}..{end} for {} frames",
            act.frame_count()
        )));
    }
    let mut rows = Vec::new();
    let mut s = start;
    while s < end {
        let e = (s + interval).min(end);
        let index: Vec<WindowIndex> = (s..e)
            .flat_map(|frame| points.iter().map(move |&point| WindowIndex { point, frame }))
            .collect();
        rows.push(HorizonRow {
            start: s,
            end: e,
            nn: compare_fields(nn, act, &index)?,
            curr: compare_fields(curr, act, &index)?,
        });
        s = e;
    }
    Ok(rows)
}
