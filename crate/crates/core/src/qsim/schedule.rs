//! Anneal schedules: `A(s)`, `B(s)` tables and the four-point reverse anneal.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Synthetic schedule shipped with the crate. Its values are not device
/// constants; the table is shaped so that `A/B = 0.260` at `s = 0.4`.
pub const SYNTHETIC_SCHEDULE_CSV: &str = include_str!("../../data/schedule_synthetic.csv");

/// Reference transverse-to-problem ratios `A(0.4)/B(0.4)` of the two
/// hardware generations the protocol was calibrated on.
pub const REFERENCE_RATIO_S04_A: f64 = 0.260;
pub const REFERENCE_RATIO_S04_B: f64 = 0.259;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub s: f64,
    #[serde(rename = "A_GHz")]
    pub a_ghz: f64,
    #[serde(rename = "B_GHz")]
    pub b_ghz: f64,
}

/// Piecewise-linear `A(s)`, `B(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleTable {
    rows: Vec<ScheduleRow>,
}

impl ScheduleTable {
    /// Parses CSV with header `s,A_GHz,B_GHz`.
    pub fn from_csv_str(text: &str, source_name: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| parse_err(source_name, 1, "header", e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["s", "A_GHz", "B_GHz"] {
            return Err(Error::Parse {
                source_name: source_name.into(),
                line: 1,
                field: "header".into(),
                message: format!("expected `s,A_GHz,B_GHz`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut rows = Vec::new();
        for (k, rec) in reader.deserialize::<ScheduleRow>().enumerate() {
            let line = k + 2;
            let row = rec.map_err(|e| parse_err(source_name, line, "row", e))?;
            if !(0.0..=1.0).contains(&row.s) || row.a_ghz < 0.0 || row.b_ghz < 0.0 {
                return Err(Error::Parse {
                    source_name: source_name.into(),
                    line,
                    field: "row".into(),
                    message: "need 0 <= s <= 1, A >= 0, B >= 0".into(),
                });
            }
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    pub fn synthetic() -> Self {
        Self::from_csv_str(SYNTHETIC_SCHEDULE_CSV, "schedule_synthetic.csv").expect("shipped schedule parses")
    }

    pub fn new(mut rows: Vec<ScheduleRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::invalid("schedule table needs at least two rows"));
        }
        rows.sort_by(|a, b| a.s.total_cmp(&b.s));
        if rows.windows(2).any(|w| w[0].s == w[1].s) {
            return Err(Error::invalid("schedule table has repeated s values"));
        }
        Ok(ScheduleTable { rows })
    }

    pub fn rows(&self) -> &[ScheduleRow] {
        &self.rows
    }

    /// `(A(s), B(s))` by linear interpolation.
    pub fn at(&self, s: f64) -> Result<(f64, f64)> {
        let first = self.rows[0];
        let last = self.rows[self.rows.len() - 1];
        if !(first.s..=last.s).contains(&s) {
            return Err(Error::invalid(format!(
                "s = {s} outside schedule range [{}, {}]",
                first.s, last.s
            )));
        }
        let k = self.rows.partition_point(|r| r.s <= s).clamp(1, self.rows.len() - 1);
        let (lo, hi) = (self.rows[k - 1], self.rows[k]);
        if s == lo.s {
            return Ok((lo.a_ghz, lo.b_ghz));
        }
        let t = (s - lo.s) / (hi.s - lo.s);
        Ok((lo.a_ghz + t * (hi.a_ghz - lo.a_ghz), lo.b_ghz + t * (hi.b_ghz - lo.b_ghz)))
    }

    pub fn ratio(&self, s: f64) -> Result<f64> {
        let (a, b) = self.at(s)?;
        Ok(a / b)
    }
}

fn parse_err(source_name: &str, line: usize, field: &str, e: csv::Error) -> Error {
    Error::Parse {
        source_name: source_name.into(),
        line: e.position().map(|p| p.line() as usize).unwrap_or(line),
        field: field.into(),
        message: e.to_string(),
    }
}

/// Pause point, pause time and the energy scales at the pause.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub s_p: f64,
    pub t_p_us: f64,
    #[serde(rename = "A_GHz")]
    pub a_ghz: f64,
    #[serde(rename = "B_GHz")]
    pub b_ghz: f64,
}

/// Ramp duration on either side of the pause, microseconds.
pub const RAMP_US: f64 = 5.0;

impl ScheduleSpec {
    pub fn new(s_p: f64, t_p_us: f64, a_ghz: f64, b_ghz: f64) -> Result<Self> {
        let spec = ScheduleSpec { s_p, t_p_us, a_ghz, b_ghz };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_table(table: &ScheduleTable, s_p: f64, t_p_us: f64) -> Result<Self> {
        let (a, b) = table.at(s_p)?;
        Self::new(s_p, t_p_us, a, b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_p > 0.0 && self.s_p < 1.0) {
            return Err(Error::invalid(format!("pause point s_p = {} outside (0, 1)", self.s_p)));
        }
        if !(self.t_p_us >= 0.0 && self.t_p_us.is_finite()) {
            return Err(Error::invalid("pause time must be finite and >= 0"));
        }
        if !(self.a_ghz >= 0.0) {
            return Err(Error::invalid("A(s_p) must be >= 0"));
        }
        if !(self.b_ghz > 0.0) {
            return Err(Error::invalid("B(s_p) must be > 0"));
        }
        Ok(())
    }

    pub fn ratio(&self) -> f64 {
        self.a_ghz / self.b_ghz
    }

    /// `(t_us, s)` points: start classical, ramp, pause, ramp back.
    pub fn four_point(&self) -> [(f64, f64); 4] {
        [
            (0.0, 1.0),
            (RAMP_US, self.s_p),
            (RAMP_US + self.t_p_us, self.s_p),
            (2.0 * RAMP_US + self.t_p_us, 1.0),
        ]
    }
}
