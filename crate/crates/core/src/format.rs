//! Text format for temporal networks.
//!
//! ```text
//! # comments start with '#' or '%'
//! nodes 5
//! symmetric                     # optional: mirror every edge
//!
//! # continuous networks
//! interval 0 1                  # optional, defaults to [0, 1]
//! edge 1 2 0.5*(sin(2*pi*t)+1)
//!
//! # discrete networks
//! initial                       # optional day-zero baseline
//! 1 2 1
//! instant 0
//! 1 2 1.0
//! instant 50
//! 2 1 3
//! ```
//!
//! Node indices are 1-based. A file holds either `edge` lines or
//! `initial`/`instant` blocks, never both. Repeated `i j w` triples within a
//! block are summed.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{ContinuousTemporalNetwork, DiscreteTemporalNetwork};
use crate::sparse::CsrMatrix;
use crate::timefn::{TimeFunction, Expr};

#[derive(Debug, Clone)]
pub enum NetworkFile {
    Discrete(DiscreteTemporalNetwork),
    Continuous(ContinuousTemporalNetwork),
}

impl NetworkFile {
    pub fn node_count(&self) -> usize {
        match self {
            NetworkFile::Discrete(n) => n.node_count(),
            NetworkFile::Continuous(n) => n.node_count(),
        }
    }
}

enum Block {
    None,
    Initial,
    Instant,
}

pub fn load_network(path: &Path) -> Result<NetworkFile> {
    if !path.exists() {
        return Err(Error::NotFound(path.to_path_buf()));
    }
    parse_network(&std::fs::read_to_string(path)?)
}

fn parse_index(token: &str, n: usize, line: usize) -> Result<usize> {
    let i: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad node index '{token}'")))?;
    if i == 0 || i > n {
        return Err(Error::parse(line, format!("node {i} outside 1..{n}")));
    }
    Ok(i - 1)
}

fn parse_number(token: &str, what: &str, line: usize) -> Result<f64> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} '{token}'")))
}

type Triplet = (usize, usize, f64);

pub fn parse_network(text: &str) -> Result<NetworkFile> {
    let mut n: Option<usize> = None;
    let mut symmetric = false;
    let mut interval: Option<(f64, f64)> = None;
    let mut edges: Vec<(usize, usize, TimeFunction)> = Vec::new();
    let mut initial: Option<Vec<(usize, usize, f64)>> = None;
    let mut instants: Vec<(f64, Vec<Triplet>)> = Vec::new();
    let mut block = Block::None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap_or_default();
        let need_n = || n.ok_or_else(|| Error::parse(line_no, "'nodes' must come first"));
        match head {
            "nodes" => {
                if n.is_some() {
                    return Err(Error::parse(line_no, "duplicate 'nodes'"));
                }
                let value = parts.next().ok_or_else(|| Error::parse(line_no, "missing node count"))?;
                let count: usize = value
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad node count '{value}'")))?;
                if count == 0 {
                    return Err(Error::parse(line_no, "node count must be positive"));
                }
                n = Some(count);
            }
            "symmetric" => symmetric = true,
            "interval" => {
                let a = parse_number(parts.next().unwrap_or(""), "interval start", line_no)?;
                let b = parse_number(parts.next().unwrap_or(""), "interval end", line_no)?;
                interval = Some((a, b));
            }
            "edge" => {
                let n = need_n()?;
                let i = parse_index(parts.next().unwrap_or(""), n, line_no)?;
                let j = parse_index(parts.next().unwrap_or(""), n, line_no)?;
                let expr: Vec<&str> = parts.collect();
                if expr.is_empty() {
                    return Err(Error::parse(line_no, "missing edge expression"));
                }
                let f = TimeFunction::parse(&expr.join(" ")).map_err(|e| match e {
                    Error::Parse { message, .. } => Error::parse(line_no, message),
                    other => other,
                })?;
                edges.push((i, j, f));
            }
            "initial" => {
                need_n()?;
                if initial.is_some() {
                    return Err(Error::parse(line_no, "duplicate 'initial' block"));
                }
                if !instants.is_empty() {
                    return Err(Error::parse(line_no, "'initial' must precede the instants"));
                }
                initial = Some(Vec::new());
                block = Block::Initial;
            }
            "instant" => {
                need_n()?;
                let t = parse_number(parts.next().unwrap_or(""), "instant", line_no)?;
                instants.push((t, Vec::new()));
                block = Block::Instant;
            }
            _ => {
                let n = need_n()?;
                let i = parse_index(head, n, line_no)
                    .map_err(|_| Error::parse(line_no, format!("unknown directive '{head}'")))?;
                let j = parse_index(parts.next().unwrap_or(""), n, line_no)?;
                let w = parse_number(parts.next().unwrap_or(""), "weight", line_no)?;
                if parts.next().is_some() {
                    return Err(Error::parse(line_no, "trailing fields"));
                }
                let target = match block {
                    Block::None => {
                        return Err(Error::parse(line_no, "weight triple outside an 'instant' block"))
                    }
                    Block::Initial => initial.as_mut().expect("initial block open"),
                    Block::Instant => &mut instants.last_mut().expect("instant block open").1,
                };
                target.push((i, j, w));
                if symmetric && i != j {
                    target.push((j, i, w));
                }
            }
        }
    }

    let n = n.ok_or_else(|| Error::parse(0, "missing 'nodes' line"))?;
    let discrete = initial.is_some() || !instants.is_empty();
    if discrete && !edges.is_empty() {
        return Err(Error::parse(0, "file mixes 'edge' lines with 'instant' blocks"));
    }
    if discrete {
        if interval.is_some() {
            return Err(Error::parse(0, "'interval' applies to continuous networks only"));
        }
        let (times, blocks): (Vec<f64>, Vec<_>) = instants.into_iter().unzip();
        let snapshots = blocks
            .iter()
            .map(|t| CsrMatrix::from_triplets(n, t))
            .collect::<Result<Vec<_>>>()?;
        let initial = initial.map(|t| CsrMatrix::from_triplets(n, &t)).transpose()?;
        let net = DiscreteTemporalNetwork::new(n, times, snapshots)?;
        let net = match initial {
            Some(m) => net.with_initial(m)?,
            None => net,
        };
        Ok(NetworkFile::Discrete(net))
    } else {
        let net = ContinuousTemporalNetwork::new(n, interval.unwrap_or((0.0, 1.0)), symmetric, edges)?;
        Ok(NetworkFile::Continuous(net))
    }
}

fn write_triplets(out: &mut String, m: &CsrMatrix) {
    for (i, j, w) in m.iter() {
        let _ = writeln!(out, "{} {} {:?}", i + 1, j + 1, w);
    }
}

/// Serializes a discrete network; matrices are written in full, so the
/// output never carries the `symmetric` flag.
pub fn write_discrete(net: &DiscreteTemporalNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nodes {}", net.node_count());
    if let Some(initial) = net.initial() {
        out.push_str("initial\n");
        write_triplets(&mut out, initial);
    }
    for (t, m) in net.instants().iter().zip(net.snapshots()) {
        let _ = writeln!(out, "instant {t:?}");
        write_triplets(&mut out, m);
    }
    out
}

/// Serializes a continuous network. Fails on opaque evaluators, which have
/// no textual form.
pub fn write_continuous(net: &ContinuousTemporalNetwork) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "nodes {}", net.node_count());
    if net.is_symmetric() {
        out.push_str("symmetric\n");
    }
    let (a, b) = net.interval();
    let _ = writeln!(out, "interval {a:?} {b:?}");
    for e in net.declared_edges() {
        let expr: &Expr = match &e.weight {
            TimeFunction::Expr(expr) => expr,
            TimeFunction::Custom { label, .. } => {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) uses custom evaluator '{label}' and cannot be written",
                    e.row + 1,
                    e.col + 1
                )))
            }
        };
        let _ = writeln!(out, "edge {} {} {expr}", e.row + 1, e.col + 1);
    }
    Ok(out)
}
