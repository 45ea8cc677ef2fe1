//! CSV and JSON writers for trajectories, bounds and tau series.
//!
//! Floats are written in shortest round-trip form so reading a file back
//! yields the exact values that were computed. Nodes are 1-based.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::localization::LocalizationBounds;
use crate::pagerank::PageRankTrajectory;
use crate::rank::TauSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

/// The single line that varies between otherwise identical runs.
pub fn provenance_line() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# temporank {} generated at unix time {secs}\n", env!("CARGO_PKG_VERSION"))
}

fn prefix(header: bool) -> String {
    if header {
        provenance_line()
    } else {
        String::new()
    }
}

pub fn trajectory_csv(traj: &PageRankTrajectory, header: bool) -> String {
    let mut out = prefix(header);
    out.push_str("instant,node,score\n");
    for (t, scores) in traj.instants.iter().zip(&traj.scores) {
        for (i, s) in scores.iter().enumerate() {
            let _ = writeln!(out, "{t:?},{},{s:?}", i + 1);
        }
    }
    out
}

#[derive(Serialize)]
struct JsonInstant<'a> {
    instant: f64,
    scores: &'a [f64],
}

pub fn trajectory_json(traj: &PageRankTrajectory) -> Result<String> {
    let rows: Vec<_> = traj
        .instants
        .iter()
        .zip(&traj.scores)
        .map(|(&instant, scores)| JsonInstant { instant, scores })
        .collect();
    serde_json::to_string_pretty(&rows).map_err(|e| Error::Internal(e.to_string()))
}

pub fn write_trajectory(traj: &PageRankTrajectory, format: Format, header: bool) -> Result<String> {
    match format {
        Format::Csv => Ok(trajectory_csv(traj, header)),
        Format::Json => trajectory_json(traj).map(|mut s| {
            s.push('\n');
            s
        }),
    }
}

pub fn bounds_csv(bounds: &LocalizationBounds, header: bool) -> String {
    let mut out = prefix(header);
    out.push_str("instant,node,lo,hi\n");
    for (t, row) in bounds.instants.iter().zip(&bounds.bounds) {
        for b in row {
            let _ = writeln!(out, "{t:?},{},{:?},{:?}", b.node + 1, b.lo, b.hi);
        }
    }
    out
}

pub fn tau_csv(series: &[TauSeries], header: bool) -> String {
    let mut out = prefix(header);
    out.push_str("instant,tau,pair_label\n");
    for s in series {
        for (t, tau) in s.instants.iter().zip(&s.values) {
            let _ = writeln!(out, "{t:?},{tau:?},{}", s.label);
        }
    }
    out
}

/// Parses `instant,node,score` rows back into `(instant, node, score)`.
pub fn read_trajectory_csv(text: &str) -> Result<Vec<(f64, usize, f64)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.starts_with("instant,") || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let bad = || Error::parse(idx + 1, format!("bad trajectory row '{line}'"));
        if fields.len() != 3 {
            return Err(bad());
        }
        rows.push((
            fields[0].parse().map_err(|_| bad())?,
            fields[1].parse().map_err(|_| bad())?,
            fields[2].parse().map_err(|_| bad())?,
        ));
    }
    Ok(rows)
}
