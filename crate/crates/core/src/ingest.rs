//! KONECT-style edge event streams.
//!
//! Each data line is `src dst delta timestamp`, whitespace separated, where
//! `delta` is `+1` (link appears) or `-1` (link disappears) and `timestamp`
//! is in seconds. Lines starting with `%` are comments. Snapshots are the
//! running adjacency after applying, in timestamp order, every event up to
//! the sample instant. Events sharing a timestamp keep their file order.

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::DiscreteTemporalNetwork;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeEvent {
    /// Compacted 0-based node index.
    pub src: usize,
    pub dst: usize,
    /// `+1` or `-1`.
    pub delta: i8,
    /// Seconds since the dataset origin.
    pub timestamp: f64,
    /// 1-based source line.
    pub line: usize,
}

/// Where timestamp zero sits.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Timestamps are already relative to the origin.
    #[default]
    Zero,
    /// The earliest event is time zero.
    First,
    /// Absolute time, in seconds, subtracted from every timestamp.
    At(f64),
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Origin::Zero),
            "first" => Ok(Origin::First),
            other => other
                .parse()
                .map(Origin::At)
                .map_err(|_| Error::invalid(format!("origin '{other}' is not zero, first or a number"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParseOptions {
    /// Skip lines whose delta is not ±1 instead of failing.
    pub lenient: bool,
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// A removal below zero is an error.
    #[default]
    Strict,
    /// A removal below zero leaves the entry at zero and is counted.
    Clamp,
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Policy::Strict),
            "clamp" => Ok(Policy::Clamp),
            other => Err(Error::invalid(format!("unknown policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Second,
    Minute,
    Hour,
    #[default]
    Day,
    Week,
}

impl TimeUnit {
    pub fn seconds(self) -> f64 {
        match self {
            TimeUnit::Second => 1.0,
            TimeUnit::Minute => 60.0,
            TimeUnit::Hour => 3600.0,
            TimeUnit::Day => 86_400.0,
            TimeUnit::Week => 604_800.0,
        }
    }
}

impl FromStr for TimeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "second" | "s" => Ok(TimeUnit::Second),
            "minute" | "min" => Ok(TimeUnit::Minute),
            "hour" | "h" => Ok(TimeUnit::Hour),
            "day" | "d" => Ok(TimeUnit::Day),
            "week" | "w" => Ok(TimeUnit::Week),
            other => Err(Error::invalid(format!("unknown time unit '{other}'"))),
        }
    }
}

/// Parsed events with node ids compacted to `0..n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    pub events: Vec<EdgeEvent>,
    /// `node_ids[i]` is the dataset id of compacted node `i`, ascending.
    pub node_ids: Vec<u64>,
    pub warnings: Vec<String>,
    pub skipped_lines: usize,
}

struct RawEvent {
    src: u64,
    dst: u64,
    delta: i8,
    timestamp: f64,
    line: usize,
}

fn field<'a>(parts: &mut impl Iterator<Item = &'a str>, line: usize, what: &str) -> Result<&'a str> {
    parts
        .next()
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))
}

fn node_id(token: &str, line: usize) -> Result<u64> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad node id '{token}'")))
}

pub fn parse_events<R: BufRead>(reader: R, opts: &ParseOptions) -> Result<EventLog> {
    let mut raw = Vec::new();
    let mut warnings = Vec::new();
    let mut skipped = 0;
    for (idx, text) in reader.lines().enumerate() {
        let line = idx + 1;
        let text = text?;
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let src = node_id(field(&mut parts, line, "source")?, line)?;
        let dst = node_id(field(&mut parts, line, "target")?, line)?;
        let delta_token = field(&mut parts, line, "delta")?;
        let ts_token = field(&mut parts, line, "timestamp")?;
        if parts.next().is_some() {
            return Err(Error::parse(line, "more than 4 fields"));
        }
        let delta: f64 = delta_token
            .parse()
            .map_err(|_| Error::parse(line, format!("bad delta '{delta_token}'")))?;
        let timestamp: f64 = ts_token
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| Error::parse(line, format!("bad timestamp '{ts_token}'")))?;
        let delta = if delta == 1.0 {
            1
        } else if delta == -1.0 {
            -1
        } else if opts.lenient {
            warnings.push(format!("line {line}: delta out of range ({delta_token}), skipped"));
            skipped += 1;
            continue;
        } else {
            return Err(Error::parse(line, format!("delta out of range ({delta_token})")));
        };
        raw.push(RawEvent {
            src,
            dst,
            delta,
            timestamp,
            line,
        });
    }

    let origin = match opts.origin {
        Origin::Zero => 0.0,
        Origin::At(t) => t,
        Origin::First => raw.iter().map(|e| e.timestamp).fold(f64::INFINITY, f64::min),
    };
    for e in &mut raw {
        e.timestamp -= origin;
        if e.timestamp < 0.0 {
            return Err(Error::parse(e.line, "timestamp precedes the origin"));
        }
    }
    // Stable: equal timestamps keep file order.
    raw.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));

    let ids: BTreeSet<u64> = raw.iter().flat_map(|e| [e.src, e.dst]).collect();
    let node_ids: Vec<u64> = ids.into_iter().collect();
    let index = |id: u64| node_ids.binary_search(&id).expect("id collected above");
    let events = raw
        .iter()
        .map(|e| EdgeEvent {
            src: index(e.src),
            dst: index(e.dst),
            delta: e.delta,
            timestamp: e.timestamp,
            line: e.line,
        })
        .collect();
    Ok(EventLog {
        events,
        node_ids,
        warnings,
        skipped_lines: skipped,
    })
}

/// Baseline adjacency lines `src dst [weight]` in dataset ids (weight 1 if omitted).
pub fn parse_initial<R: BufRead>(reader: R) -> Result<Vec<(u64, u64, f64)>> {
    let mut out = Vec::new();
    for (idx, text) in reader.lines().enumerate() {
        let line = idx + 1;
        let text = text?;
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let src = node_id(field(&mut parts, line, "source")?, line)?;
        let dst = node_id(field(&mut parts, line, "target")?, line)?;
        let w = match parts.next() {
            Some(tok) => tok
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w >= 0.0)
                .ok_or_else(|| Error::parse(line, format!("bad weight '{tok}'")))?,
            None => 1.0,
        };
        out.push((src, dst, w));
    }
    Ok(out)
}

impl EventLog {
    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    fn recompact(&self, events: Vec<EdgeEvent>, extra_ids: &[u64]) -> EventLog {
        let ids: BTreeSet<u64> = events
            .iter()
            .flat_map(|e| [self.node_ids[e.src], self.node_ids[e.dst]])
            .chain(extra_ids.iter().copied())
            .collect();
        let node_ids: Vec<u64> = ids.into_iter().collect();
        let remap = |i: usize| {
            node_ids
                .binary_search(&self.node_ids[i])
                .expect("id collected above")
        };
        let events = events
            .into_iter()
            .map(|e| EdgeEvent {
                src: remap(e.src),
                dst: remap(e.dst),
                ..e
            })
            .collect();
        EventLog {
            events,
            node_ids,
            warnings: self.warnings.clone(),
            skipped_lines: self.skipped_lines,
        }
    }

    /// Keeps events at or before `t` seconds; nodes seen only later are dropped.
    pub fn until(&self, t: f64) -> EventLog {
        let kept = self.events.iter().copied().filter(|e| e.timestamp <= t).collect();
        self.recompact(kept, &[])
    }

    /// Adds the nodes of a baseline edge list and returns it as a matrix over
    /// the enlarged node set.
    pub fn attach_initial(&self, edges: &[(u64, u64, f64)]) -> Result<(EventLog, CsrMatrix)> {
        let extra: Vec<u64> = edges.iter().flat_map(|&(s, d, _)| [s, d]).collect();
        // Events keep indices into self.node_ids until remapped.
        let log = self.recompact(self.events.clone(), &extra);
        let index = |id: u64| log.node_ids.binary_search(&id).expect("id collected above");
        let triplets: Vec<_> = edges
            .iter()
            .map(|&(s, d, w)| (index(s), index(d), w))
            .collect();
        let matrix = CsrMatrix::from_triplets(log.node_count(), &triplets)?;
        Ok((log, matrix))
    }
}

/// `count` instants `start, start + step, …`.
pub fn sample_grid(start: f64, step: f64, count: usize) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) || !start.is_finite() {
        return Err(Error::invalid(format!("grid step {step} must be positive")));
    }
    if count == 0 {
        return Err(Error::invalid("grid needs at least one instant"));
    }
    Ok((0..count).map(|k| start + step * k as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IngestSummary {
    pub n: usize,
    /// Events applied up to the last sample instant.
    pub events: usize,
    pub adds: usize,
    pub removes: usize,
    /// Distinct directed pairs with at least one applied `+1`.
    pub distinct_added_edges: usize,
    /// Distinct directed pairs with at least one applied `-1`.
    pub distinct_removed_edges: usize,
    pub instants: usize,
    pub clamped: usize,
    pub skipped_lines: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub network: DiscreteTemporalNetwork,
    pub summary: IngestSummary,
}

/// Materializes snapshots at `samples` (in `unit`) from the running
/// adjacency, starting at `initial` (empty when `None`).
pub fn build_snapshots(
    log: &EventLog,
    samples: &[f64],
    unit: TimeUnit,
    initial: Option<&CsrMatrix>,
    policy: Policy,
) -> Result<Ingested> {
    let n = log.node_count();
    if n == 0 {
        return Err(Error::invalid("event log has no nodes"));
    }
    if samples.is_empty() {
        return Err(Error::invalid("no sample instants"));
    }
    if samples.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("sample instants must be strictly increasing"));
    }
    let mut summary = IngestSummary {
        n,
        instants: samples.len(),
        skipped_lines: log.skipped_lines,
        warnings: log.warnings.clone(),
        ..Default::default()
    };
    if let Some(m) = initial {
        if m.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                found: m.dim(),
            });
        }
    } else {
        summary
            .warnings
            .push("no initial adjacency given; day zero starts from an empty network".into());
    }

    let mut running: HashMap<(usize, usize), f64> = HashMap::new();
    if let Some(m) = initial {
        running.extend(m.iter().map(|(i, j, w)| ((i, j), w)));
    }
    let mut added = BTreeSet::new();
    let mut removed = BTreeSet::new();
    let mut snapshots = Vec::with_capacity(samples.len());
    let mut events = log.events.iter().peekable();
    for &sample in samples {
        let cutoff = sample * unit.seconds();
        while let Some(e) = events.next_if(|e| e.timestamp <= cutoff) {
            let key = (e.src, e.dst);
            summary.events += 1;
            if e.delta > 0 {
                summary.adds += 1;
                added.insert(key);
                *running.entry(key).or_insert(0.0) += 1.0;
                continue;
            }
            summary.removes += 1;
            removed.insert(key);
            let current = running.get(&key).copied().unwrap_or(0.0);
            if current >= 1.0 {
                let next = current - 1.0;
                if next == 0.0 {
                    running.remove(&key);
                } else {
                    running.insert(key, next);
                }
            } else {
                match policy {
                    Policy::Strict => {
                        return Err(Error::Consistency {
                            line: e.line,
                            message: format!(
                                "removal of edge {} -> {} takes its weight below zero",
                                log.node_ids[e.src], log.node_ids[e.dst]
                            ),
                        })
                    }
                    Policy::Clamp => {
                        summary.clamped += 1;
                        running.remove(&key);
                    }
                }
            }
        }
        let triplets: Vec<_> = running.iter().map(|(&(i, j), &w)| (i, j, w)).collect();
        snapshots.push(CsrMatrix::from_sorted_sum(n, triplets));
    }
    if summary.clamped > 0 {
        summary
            .warnings
            .push(format!("{} removals clamped at zero", summary.clamped));
    }
    summary.distinct_added_edges = added.len();
    summary.distinct_removed_edges = removed.len();

    let network = DiscreteTemporalNetwork::new(n, samples.to_vec(), snapshots)?;
    let network = match initial {
        Some(m) => network.with_initial(m.clone())?,
        None => network,
    };
    Ok(Ingested { network, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(text: &str) -> Result<EventLog> {
        parse_events(text.as_bytes(), &ParseOptions::default())
    }

    #[test]
    fn field_mapping() {
        let l = log("1 2 +1 86400\n").unwrap();
        assert_eq!(l.events.len(), 1);
        let e = l.events[0];
        assert_eq!((l.node_ids[e.src], l.node_ids[e.dst], e.delta), (1, 2, 1));
        assert_eq!(e.timestamp / TimeUnit::Day.seconds(), 1.0);
    }

    #[test]
    fn comments_skipped() {
        let l = log("% comment\n%  sym unweighted\n").unwrap();
        assert!(l.events.is_empty());
    }

    #[test]
    fn delta_out_of_range() {
        let err = log("1 2 +1 5\n1 2 3 86400\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("delta out of range"));
            }
            other => panic!("{other}"),
        }
        let opts = ParseOptions {
            lenient: true,
            ..Default::default()
        };
        let l = parse_events("1 2 3 86400\n1 2 -1 9\n".as_bytes(), &opts).unwrap();
        assert_eq!(l.events.len(), 1);
        assert_eq!(l.skipped_lines, 1);
        assert_eq!(l.warnings.len(), 1);
    }

    #[test]
    fn malformed_lines() {
        for bad in ["1 2 +1\n", "a 2 1 0\n", "1 2 1 x\n", "1 2 1 0 9\n", "1 2 1 nan\n"] {
            assert!(matches!(log(bad), Err(Error::Parse { line: 1, .. })), "{bad}");
        }
    }

    #[test]
    fn ids_compacted_and_sorted_by_time() {
        let l = log("10 30 1 200\n30 20 1 100\n20 10 1 100\n").unwrap();
        assert_eq!(l.node_ids, vec![10, 20, 30]);
        let order: Vec<usize> = l.events.iter().map(|e| e.line).collect();
        assert_eq!(order, vec![2, 3, 1]);
    }

    #[test]
    fn origin_first_event() {
        let opts = ParseOptions {
            origin: Origin::First,
            ..Default::default()
        };
        let l = parse_events("1 2 1 1000\n2 1 1 1060\n".as_bytes(), &opts).unwrap();
        assert_eq!(l.events[0].timestamp, 0.0);
        assert_eq!(l.events[1].timestamp, 60.0);
        assert!(log("1 2 1 -5\n").is_err());
    }

    #[test]
    fn cumulative_application() {
        let l = log("1 2 +1 43200\n").unwrap();
        let out = build_snapshots(&l, &[0.0, 1.0], TimeUnit::Day, None, Policy::Strict).unwrap();
        assert_eq!(out.network.snapshot(0).nnz(), 0);
        assert_eq!(out.network.snapshot(1).get(0, 1), 1.0);
    }

    #[test]
    fn add_then_remove_between_samples() {
        let day = TimeUnit::Day.seconds();
        let text = format!("1 2 +1 {}\n1 2 -1 {}\n", 10.0 * day, 40.0 * day);
        let l = log(&text).unwrap();
        let grid = sample_grid(0.0, 50.0, 21).unwrap();
        let out = build_snapshots(&l, &grid, TimeUnit::Day, None, Policy::Strict).unwrap();
        assert!(out.network.snapshots().iter().all(|m| m.nnz() == 0));
        assert_eq!((out.summary.adds, out.summary.removes), (1, 1));
    }

    #[test]
    fn strict_and_clamp_policies() {
        let l = log("1 2 -1 0\n1 2 1 1\n").unwrap();
        let err = build_snapshots(&l, &[10.0], TimeUnit::Second, None, Policy::Strict).unwrap_err();
        assert!(matches!(err, Error::Consistency { line: 1, .. }));
        let out = build_snapshots(&l, &[10.0], TimeUnit::Second, None, Policy::Clamp).unwrap();
        assert_eq!(out.summary.clamped, 1);
        assert_eq!(out.network.snapshot(0).get(0, 1), 1.0);
    }

    #[test]
    fn initial_baseline_and_window() {
        let l = log("1 2 -1 5\n3 4 1 500\n").unwrap();
        let (l2, initial) = l.until(10.0).attach_initial(&[(1, 2, 1.0), (5, 1, 2.0)]).unwrap();
        assert_eq!(l2.node_ids, vec![1, 2, 5]);
        let out = build_snapshots(&l2, &[0.0, 10.0], TimeUnit::Second, Some(&initial), Policy::Strict).unwrap();
        assert_eq!(out.network.snapshot(0).get(0, 1), 1.0);
        assert_eq!(out.network.snapshot(1).get(0, 1), 0.0);
        assert_eq!(out.network.snapshot(1).get(2, 0), 2.0);
        assert_eq!(out.summary.n, 3);
    }

    #[test]
    fn grids() {
        let g = sample_grid(0.0, 50.0, 21).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 1000.0);
        assert_eq!(sample_grid(0.0, 1.0, 1).unwrap(), vec![0.0]);
        assert_eq!(sample_grid(5.0, 2.5, 3).unwrap(), vec![5.0, 7.5, 10.0]);
        assert!(sample_grid(0.0, 0.0, 3).is_err());
        assert!(sample_grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn parse_initial_lines() {
        let e = parse_initial("% c\n1 2\n3 4 2.5\n".as_bytes()).unwrap();
        assert_eq!(e, vec![(1, 2, 1.0), (3, 4, 2.5)]);
        assert!(parse_initial("1 2 -1\n".as_bytes()).is_err());
    }
}
