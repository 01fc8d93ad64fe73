//! Figure source data as CSV.
//!
//! Axis figures (`env-size`, `coupling`, `disorder`, `pause`,
//! `frustration`) write two files:
//!
//! * `<id>.csv`: `<axis>,seed,M,M_bootstrap_std,d_tv,sampling_floor,classification`,
//!   one row per record, sorted by axis value then seed;
//! * `<id>_summary.csv`: `<axis>,n,mean_M,std_M,mean_d_tv,relaxed_fraction`.
//!
//! `scatter.csv` has `condition,M,d_tv,classification`;
//! `gap_histogram.csv` has `bin_lo,bin_hi,count` over bins of width
//! [`GAP_BIN_WIDTH`] starting at zero. Records without a grid condition
//! (replays) only enter the scatter and gap histogram.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::records::{ConditionRecord, ConditionSpec};
use crate::error::{Error, Result};
use crate::landscape::gap_histogram;

pub const GAP_BIN_WIDTH: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    EnvSize,
    Coupling,
    Disorder,
    Pause,
    Frustration,
    Scatter,
    GapHistogram,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::EnvSize,
        FigureId::Coupling,
        FigureId::Disorder,
        FigureId::Pause,
        FigureId::Frustration,
        FigureId::Scatter,
        FigureId::GapHistogram,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FigureId::EnvSize => "env-size",
            FigureId::Coupling => "coupling",
            FigureId::Disorder => "disorder",
            FigureId::Pause => "pause",
            FigureId::Frustration => "frustration",
            FigureId::Scatter => "scatter",
            FigureId::GapHistogram => "gap-histogram",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.label() == label)
            .ok_or_else(|| Error::invalid(format!("unknown figure `{label}`")))
    }

    fn axis(self) -> Option<(&'static str, fn(&ConditionSpec) -> f64)> {
        Some(match self {
            FigureId::EnvSize => ("environment_size", |c| c.environment_size as f64),
            FigureId::Coupling => ("lambda", |c| c.lambda),
            FigureId::Disorder => ("W", |c| c.disorder),
            FigureId::Pause => ("s_p", |c| c.s_p),
            FigureId::Frustration => ("p_S", |c| c.frustration),
            _ => return None,
        })
    }
}

/// `(file name, contents)` for each panel of `id`.
pub fn figure_csv(records: &[ConditionRecord], id: FigureId) -> Result<Vec<(String, String)>> {
    if records.is_empty() {
        return Err(Error::invalid("no records"));
    }
    if let Some((axis, value_of)) = id.axis() {
        let mut rows: Vec<(f64, &ConditionRecord)> = records
            .iter()
            .filter_map(|r| r.condition.as_ref().map(|c| (value_of(c), r)))
            .collect();
        rows.sort_by(|a, b| {
            a.0.total_cmp(&b.0).then(a.1.condition.as_ref().map(|c| c.seed).cmp(&b.1.condition.as_ref().map(|c| c.seed)))
        });
        let mut detail = format!("{axis},seed,M,M_bootstrap_std,d_tv,sampling_floor,classification\n");
        for (x, r) in &rows {
            let std = r.memory.bootstrap_std.map(|s| s.to_string()).unwrap_or_default();
            writeln!(
                detail,
                "{x},{},{},{std},{},{},{}",
                r.condition.as_ref().map_or(0, |c| c.seed),
                r.memory.m,
                r.thermal.d_tv_classical,
                r.thermal.sampling_floor,
                r.classification().label()
            )
            .expect("string write");
        }
        let mut summary = format!("{axis},n,mean_M,std_M,mean_d_tv,relaxed_fraction\n");
        for group in rows.chunk_by(|a, b| a.0 == b.0) {
            let n = group.len() as f64;
            let ms: Vec<f64> = group.iter().map(|(_, r)| r.memory.m).collect();
            let mean = ms.iter().sum::<f64>() / n;
            let std = if group.len() > 1 {
                (ms.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let d = group.iter().map(|(_, r)| r.thermal.d_tv_classical).sum::<f64>() / n;
            let relaxed = group.iter().filter(|(_, r)| r.classification().is_relaxed()).count() as f64 / n;
            writeln!(summary, "{},{},{mean},{std},{d},{relaxed}", group[0].0, group.len()).expect("string write");
        }
        return Ok(vec![
            (format!("{}.csv", id.label()), detail),
            (format!("{}_summary.csv", id.label()), summary),
        ]);
    }
    match id {
        FigureId::Scatter => {
            let mut out = String::from("condition,M,d_tv,classification\n");
            for r in records {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.condition_hash,
                    r.memory.m,
                    r.thermal.d_tv_classical,
                    r.classification().label()
                )
                .expect("string write");
            }
            Ok(vec![("scatter.csv".into(), out)])
        }
        FigureId::GapHistogram => {
            let gaps: Vec<f64> = records.iter().filter_map(|r| r.landscape.as_ref()?.gap).collect();
            let top = gaps.iter().fold(0.0f64, |a, &g| a.max(g));
            let bins = ((top / GAP_BIN_WIDTH).floor() as usize + 1).max(1);
            let hist = gap_histogram(&gaps, 0.0, bins as f64 * GAP_BIN_WIDTH, bins)?;
            Ok(vec![("gap_histogram.csv".into(), hist.to_csv())])
        }
        _ => unreachable!("axis figures handled above"),
    }
}

/// Writes the CSV files of `id` into `dir`.
pub fn emit_figure_data(records: &[ConditionRecord], id: FigureId, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    figure_csv(records, id)?
        .into_iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
