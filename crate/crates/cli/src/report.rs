//! Scenario reports in CSV or JSON.
//!
//! CSV layout: `# key=value` comment lines carrying the summary (values are
//! JSON literals), then the columns `outcome,count,frequency,probability`.
//! JSON layout: `{"summary": {...}, "rows": [...]}` with the same fields.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, Result};

/// Outcome label of a shot whose particle was absorbed before readout.
pub const LOST: &str = "lost";
/// Outcome label of a shot whose Bell measurement was inconclusive.
pub const INCONCLUSIVE: &str = "inconclusive";

/// Round to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub outcome: String,
    pub count: u64,
    /// `count / shots`.
    pub frequency: f64,
    /// Born probability of the outcome, averaged over shots.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub circuit: String,
    pub mode: String,
    pub stages: Option<u32>,
    pub input: String,
    pub seed: u64,
    pub shots: u64,
    pub conclusive_shots: u64,
    pub inconclusive_frequency: f64,
    pub lost_frequency: f64,
    pub kept_probability: f64,
    pub loss_probability: f64,
    pub p_success: Option<f64>,
    pub fidelity_mean: Option<f64>,
    pub fidelity_min: Option<f64>,
    pub max_conservation_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub summary: Summary,
    pub rows: Vec<Row>,
}

/// The summary fields that are functions of the rows alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tally {
    pub shots: u64,
    pub conclusive_shots: u64,
    pub inconclusive_frequency: f64,
    pub lost_frequency: f64,
}

pub fn frequency(count: u64, shots: u64) -> f64 {
    sig12(count as f64 / shots as f64)
}

pub fn tally(rows: &[Row]) -> Tally {
    let shots: u64 = rows.iter().map(|r| r.count).sum();
    let count_of = |label: &str| {
        rows.iter()
            .filter(|r| r.outcome == label)
            .map(|r| r.count)
            .sum::<u64>()
    };
    let inconclusive = count_of(INCONCLUSIVE);
    Tally {
        shots,
        conclusive_shots: shots - inconclusive,
        inconclusive_frequency: frequency(inconclusive, shots.max(1)),
        lost_frequency: frequency(count_of(LOST), shots.max(1)),
    }
}

impl Report {
    /// Recompute the row-derived summary fields and per-row frequencies and
    /// compare them with what the report states.
    pub fn check_consistency(&self) -> Result<()> {
        let t = tally(&self.rows);
        let s = &self.summary;
        let stated = Tally {
            shots: s.shots,
            conclusive_shots: s.conclusive_shots,
            inconclusive_frequency: s.inconclusive_frequency,
            lost_frequency: s.lost_frequency,
        };
        if t != stated {
            return Err(CliError::Report(format!("summary {stated:?} but rows give {t:?}")));
        }
        for r in &self.rows {
            let f = frequency(r.count, t.shots);
            if f != r.frequency {
                return Err(CliError::Report(format!(
                    "row {} states frequency {} but count gives {f}",
                    r.outcome, r.frequency
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        let summary = serde_json::to_value(&self.summary)?;
        if let serde_json::Value::Object(map) = summary {
            for (k, v) in map {
                out.push_str(&format!("# {k}={v}\n"));
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        if self.rows.is_empty() {
            w.write_record(["outcome", "count", "frequency", "probability"])?;
        }
        let body = w.into_inner().map_err(|e| CliError::Report(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&body));
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut fields = serde_json::Map::new();
        for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
            let (k, v) = line
                .trim()
                .split_once('=')
                .ok_or_else(|| CliError::Report(format!("bad summary line {line:?}")))?;
            fields.insert(k.to_string(), serde_json::from_str(v)?);
        }
        let summary: Summary = serde_json::from_value(serde_json::Value::Object(fields))?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let rows = reader.deserialize().collect::<std::result::Result<Vec<Row>, _>>()?;
        Ok(Self { summary, rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Read a report, picking the format from the extension (`.json`) or,
    /// failing that, the first non-blank character.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if json {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        }
    }
}

/// Build rows from per-outcome counts and summed Born probabilities.
pub fn rows_from(counts: &BTreeMap<String, u64>, probability_sums: &BTreeMap<String, f64>, shots: u64) -> Vec<Row> {
    let mut labels: Vec<&String> = counts.keys().chain(probability_sums.keys()).collect();
    labels.sort_by_key(|l| (l.as_str() == INCONCLUSIVE || l.as_str() == LOST, l.as_str()));
    labels.dedup();
    labels
        .into_iter()
        .filter_map(|label| {
            let count = counts.get(label).copied().unwrap_or(0);
            let probability = sig12(probability_sums.get(label).copied().unwrap_or(0.0) / shots as f64);
            (count > 0 || probability > 0.0).then(|| Row {
                outcome: label.clone(),
                count,
                frequency: frequency(count, shots),
                probability,
            })
        })
        .collect()
}
