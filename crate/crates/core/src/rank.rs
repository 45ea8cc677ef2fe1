//! Kendall tau-b rank correlation and per-instant trajectory comparison.
//!
//! The tie-corrected tau-b is used throughout, so two score vectors inducing
//! the same weak order (ties included) always compare to exactly 1. Scores
//! are compared directly; converting them to integer ranks first would not
//! change any pair's concordance.
//!
//! Discordant pairs are counted as merge-sort inversions after ordering by
//! `(x, y)`, giving `O(n log n)` overall.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pagerank::PageRankTrajectory;

/// Pair counts behind a tau-b value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    /// `n(n − 1)/2`
    pub pairs: u64,
    /// Pairs tied in `x`.
    pub tied_x: u64,
    /// Pairs tied in `y`.
    pub tied_y: u64,
    /// Pairs tied in both.
    pub tied_xy: u64,
    /// Strictly discordant pairs.
    pub discordant: u64,
}

impl PairCounts {
    pub fn concordant(&self) -> u64 {
        self.pairs + self.tied_xy - self.tied_x - self.tied_y - self.discordant
    }

    pub fn tau_b(&self) -> Result<f64> {
        let nx = self.pairs - self.tied_x;
        let ny = self.pairs - self.tied_y;
        if nx == 0 || ny == 0 {
            return Err(Error::UndefinedTau(
                "every pair is tied in at least one ranking".into(),
            ));
        }
        let numerator = self.concordant() as i64 - self.discordant as i64;
        Ok(numerator as f64 / ((nx as f64) * (ny as f64)).sqrt())
    }
}

fn tied_pairs(run: u64) -> u64 {
    run * run.saturating_sub(1) / 2
}

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::UndefinedTau(format!(
            "need at least 2 items, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    Ok(())
}

// Counts inversions while sorting `v` ascending; equal values are not
// inversions.
fn sort_counting_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        sort_counting_inversions(l, bl) + sort_counting_inversions(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Pair counts of `(x, y)` in `O(n log n)`.
pub fn pair_counts(x: &[f64], y: &[f64]) -> Result<PairCounts> {
    check(x, y)?;
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap_or(Ordering::Equal)
            .then(y[a].partial_cmp(&y[b]).unwrap_or(Ordering::Equal))
    });

    let mut tied_x = 0;
    let mut tied_xy = 0;
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x[a] == x[b] {
            run_x += 1;
            if y[a] == y[b] {
                run_xy += 1;
            } else {
                tied_xy += tied_pairs(run_xy);
                run_xy = 1;
            }
        } else {
            tied_x += tied_pairs(run_x);
            tied_xy += tied_pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    tied_x += tied_pairs(run_x);
    tied_xy += tied_pairs(run_xy);

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = sort_counting_inversions(&mut ys, &mut buf);

    let mut tied_y = 0;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            tied_y += tied_pairs(run_y);
            run_y = 1;
        }
    }
    tied_y += tied_pairs(run_y);

    Ok(PairCounts {
        pairs: tied_pairs(n as u64),
        tied_x,
        tied_y,
        tied_xy,
        discordant,
    })
}

/// Kendall tau-b of two score vectors.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    pair_counts(x, y)?.tau_b()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSeries {
    pub label: String,
    pub instants: Vec<f64>,
    pub values: Vec<f64>,
}

impl TauSeries {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Per-instant tau-b between two trajectories over the same instants.
pub fn compare_trajectories(
    a: &PageRankTrajectory,
    b: &PageRankTrajectory,
    label: impl Into<String>,
) -> Result<TauSeries> {
    if a.instants != b.instants {
        return Err(Error::invalid(format!(
            "trajectories have different instants ({} vs {} entries)",
            a.len(),
            b.len()
        )));
    }
    if a.node_count() != b.node_count() {
        return Err(Error::Dimension {
            expected: a.node_count(),
            found: b.node_count(),
        });
    }
    let values = a
        .scores
        .iter()
        .zip(&b.scores)
        .zip(&a.instants)
        .map(|((x, y), t)| {
            kendall_tau(x, y).map_err(|e| match e {
                Error::UndefinedTau(msg) => Error::UndefinedTau(format!("at instant {t}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TauSeries {
        label: label.into(),
        instants: a.instants.clone(),
        values,
    })
}
