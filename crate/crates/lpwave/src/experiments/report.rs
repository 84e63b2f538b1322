//! Structured experiment reports: measured values, thresholds, verdicts,
//! and the fingerprints needed to reproduce a run.

use crate::grid::Grid;
use crate::littlewood_paley::PartitionFingerprint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFingerprint {
    pub length: f64,
    pub num_points: usize,
    pub dx: f64,
    pub freq_resolution: f64,
    pub max_freq: f64,
}

impl From<&Grid> for GridFingerprint {
    fn from(g: &Grid) -> Self {
        GridFingerprint {
            length: g.length(),
            num_points: g.num_points(),
            dx: g.dx(),
            freq_resolution: g.freq_resolution(),
            max_freq: g.max_freq(),
        }
    }
}

/// One gate of an experiment: a measured number against a bound or window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn ge(name: impl Into<String>, measured: f64, lo: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            measured,
            lo: Some(lo),
            hi: None,
            pass: measured.is_finite() && measured >= lo,
        }
    }

    pub fn le(name: impl Into<String>, measured: f64, hi: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            measured,
            lo: None,
            hi: Some(hi),
            pass: measured.is_finite() && measured <= hi,
        }
    }

    pub fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            measured,
            lo: Some(lo),
            hi: Some(hi),
            pass: measured.is_finite() && measured >= lo && measured <= hi,
        }
    }
}

/// One sampled row of a measured series (indexed by n, j, or t).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesRow {
    pub index: f64,
    pub measured: f64,
    pub threshold: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesTable {
    pub name: String,
    pub rows: Vec<SeriesRow>,
}

/// Structured record of one verification run. The verdict is the
/// conjunction of all checks; every input is echoed in `parameters`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub grid: GridFingerprint,
    pub partition: Option<PartitionFingerprint>,
    pub series: Vec<SeriesTable>,
    pub checks: Vec<CheckOutcome>,
    pub notes: Vec<String>,
    pub verdict: bool,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, grid: &Grid) -> Self {
        ExperimentReport {
            name: name.into(),
            parameters: BTreeMap::new(),
            grid: grid.into(),
            partition: None,
            series: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            verdict: false,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    pub fn series(&mut self, name: impl Into<String>, rows: Vec<SeriesRow>) {
        self.series.push(SeriesTable {
            name: name.into(),
            rows,
        });
    }

    pub fn check(&mut self, outcome: CheckOutcome) {
        self.checks.push(outcome);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Sets the verdict to the conjunction of all recorded checks.
    pub fn finalize(mut self) -> Self {
        self.verdict = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        self
    }
}
