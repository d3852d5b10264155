use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::horizon::HorizonRow;
use super::sets::Comparison;

/// One comparison row: which split and which pair of fields.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub split: String,
    /// `curr_vs_act` or `nn_vs_act`.
    pub pair: String,
    pub metrics: Comparison,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub rows: Vec<MetricRow>,
    /// `(mode, |cos|)` between the nn and act bases.
    pub cs_pod: Vec<(usize, f64)>,
    pub horizon: Vec<HorizonRow>,
    pub frequency_diff: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl MetricReport {
    pub fn row(&self, split: &str, pair: &str) -> Option<&Comparison> {
        self.rows
            .iter()
            .find(|r| r.split == split && r.pair == pair)
            .map(|r| &r.metrics)
    }

    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("split,pair,count,mse,mmsd,mcs\n");
        for r in &self.rows {
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.split,
                r.pair,
                m.count,
                m.mse,
                opt(m.mmsd),
                opt(m.mcs)
            );
        }
        out
    }

    pub fn cs_pod_csv(&self) -> String {
        let mut out = String::from("mode,cs_pod\n");
        for (i, v) in &self.cs_pod {
            let _ = writeln!(out, "{},{v}", i + 1);
        }
        out
    }

    pub fn horizon_csv(&self) -> String {
        horizon_csv(&self.horizon)
    }

    /// Plain-text summary block.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let m = &r.metrics;
            let _ = write!(out, "{:<12} {:<12} n={:<8} mse={:.6e}", r.split, r.pair, m.count, m.mse);
            if let Some(v) = m.mmsd {
                let _ = write!(out, " mmsd={v:.6e}");
            }
            if let Some(v) = m.mcs {
                let _ = write!(out, " mcs={v:.6}");
            }
            out.push('\n');
        }
        for (i, v) in &self.cs_pod {
            let _ = writeln!(out, "cs_pod mode {}: {v:.6}", i + 1);
        }
        if let Some(f) = self.frequency_diff {
            let _ = writeln!(out, "mean frequency difference: {f:.6}");
        }
        out
    }

    /// Writes `metrics.csv`, `cs_pod.csv` and `summary.txt` (plus
    /// `horizon.csv` when present) into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: String| {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))
        };
        write("metrics.csv", self.metrics_csv())?;
        write("cs_pod.csv", self.cs_pod_csv())?;
        write("summary.txt", self.summary())?;
        if !self.horizon.is_empty() {
            write("horizon.csv", self.horizon_csv())?;
        }
        Ok(())
    }
}

pub fn horizon_csv(rows: &[HorizonRow]) -> String {
    let mut out = String::from("start_frame,end_frame,pair,count,mse,mmsd,mcs\n");
    for r in rows {
        for (pair, m) in [("nn_vs_act", &r.nn), ("curr_vs_act", &r.curr)] {
            let _ = writeln!(
                out,
                "{},{},{pair},{},{},{},{}",
                r.start,
                r.end,
                m.count,
                m.mse,
                opt(m.mmsd),
                opt(m.mcs)
            );
        }
    }
    out
}
