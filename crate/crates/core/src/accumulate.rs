//! Time-decayed accumulation of past adjacency and its row normalization.
//!
//! On a discrete time scale the accumulated matrix at instant `t_k` is
//! `B(t_k) = Σ_{l ≤ k} ω(t_l, t_k) A(t_l)`; on a continuous one it is
//! `B_ij(t) = ∫_{t0}^{t} ω(s, t) a_ij(s) ds`. Either way the transition
//! matrix is the row normalization of `B`, with all-zero rows marked as
//! dangling.
//!
//! At `t = t0` the continuous integral vanishes identically, so the
//! transition matrix there is taken to be the row normalization of `A(t0)`,
//! its limit as `t → t0⁺`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{ContinuousTemporalNetwork, DecayKernel, DiscreteTemporalNetwork};
use crate::quadrature::{integrate, QuadratureConfig, QuadratureError};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatedMatrix {
    pub matrix: CsrMatrix,
    pub instant: f64,
}

/// Row-substochastic transition matrix together with its dangling indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticSnapshot {
    pub transition: CsrMatrix,
    /// `dangling[i]` is true iff row `i` of the accumulated matrix is zero.
    pub dangling: Vec<bool>,
    pub instant: f64,
}

impl StochasticSnapshot {
    pub fn dim(&self) -> usize {
        self.transition.dim()
    }

    pub fn has_dangling(&self) -> bool {
        self.dangling.iter().any(|&d| d)
    }

    pub fn dangling_count(&self) -> usize {
        self.dangling.iter().filter(|&&d| d).count()
    }

    /// Treats `matrix` (assumed nonnegative) as a weighted adjacency.
    pub fn from_weights(matrix: &CsrMatrix, instant: f64) -> Self {
        row_normalize(&AccumulatedMatrix {
            matrix: matrix.clone(),
            instant,
        })
    }
}

/// `B(t_k)` for the 0-based instant `k`.
///
/// Terms are added in ascending `l` for every entry, so the result is
/// bit-reproducible.
pub fn accumulate_discrete(
    net: &DiscreteTemporalNetwork,
    kernel: &DecayKernel,
    k: usize,
) -> Result<AccumulatedMatrix> {
    if k >= net.len() {
        return Err(Error::invalid(format!(
            "instant index {} outside 1..{}",
            k + 1,
            net.len()
        )));
    }
    let tk = net.instants()[k];
    let weights = net.instants()[..=k]
        .iter()
        .map(|&tl| kernel.eval(tl, tk))
        .collect::<Result<Vec<_>>>()?;
    let snapshots = &net.snapshots()[..=k];
    let n = net.node_count();

    let mut triplets = Vec::new();
    let mut row_buf: Vec<(usize, f64)> = Vec::new();
    for i in 0..n {
        row_buf.clear();
        for (snap, &w) in snapshots.iter().zip(&weights) {
            row_buf.extend(snap.row(i).map(|(j, a)| (j, w * a)));
        }
        // Stable: equal columns keep ascending-l order for the summation.
        row_buf.sort_by_key(|&(j, _)| j);
        triplets.extend(row_buf.iter().map(|&(j, v)| (i, j, v)));
    }
    Ok(AccumulatedMatrix {
        matrix: CsrMatrix::from_sorted_sum(n, triplets),
        instant: tk,
    })
}

pub fn row_normalize(b: &AccumulatedMatrix) -> StochasticSnapshot {
    let n = b.matrix.dim();
    let sums: Vec<f64> = (0..n).map(|i| b.matrix.row_sum(i)).collect();
    let transition = b.matrix.map_rows(|i, w| w / sums[i]);
    StochasticSnapshot {
        transition,
        dangling: sums.iter().map(|&s| s <= 0.0).collect(),
        instant: b.instant,
    }
}

/// `B(t)` for a continuous network; each stored edge integrated separately.
///
/// Returns the zero matrix at `t = t0`.
pub fn accumulated_continuous(
    net: &ContinuousTemporalNetwork,
    kernel: &DecayKernel,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<AccumulatedMatrix> {
    let (t0, _) = net.interval();
    if !net.contains(t) {
        let (a, b) = net.interval();
        return Err(Error::invalid(format!("t = {t} outside [{a}, {b}]")));
    }
    let n = net.node_count();
    let values = net
        .edges()
        .par_iter()
        .map(|edge| {
            let fail = |detail: String| Error::Integration {
                row: edge.row,
                col: edge.col,
                t,
                detail,
            };
            let mut kernel_err = None;
            let integrand = |s: f64| match kernel.eval(s, t) {
                Ok(w) => w * edge.weight.eval(s),
                Err(e) => {
                    kernel_err.get_or_insert(e);
                    f64::NAN
                }
            };
            let result = integrate(integrand, t0, t, quad);
            if let Some(e) = kernel_err {
                return Err(fail(e.to_string()));
            }
            match result {
                Ok(v) if v >= 0.0 => Ok((edge.row, edge.col, v)),
                // Rounding on a near-zero integral of a nonnegative integrand.
                Ok(v) if v > -quad.tol => Ok((edge.row, edge.col, 0.0)),
                Ok(v) => Err(fail(format!("negative integral {v}"))),
                Err(QuadratureError::Exhausted { estimate }) => Err(fail(format!(
                    "no convergence within {} subdivisions (estimate {estimate})",
                    quad.max_subdivisions
                ))),
                Err(QuadratureError::NonFinite { s, value }) => {
                    Err(fail(format!("integrand is {value} at s = {s}")))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AccumulatedMatrix {
        matrix: CsrMatrix::from_sorted_sum(n, values),
        instant: t,
    })
}

/// Transition matrix of a continuous network at `t`.
pub fn accumulate_continuous(
    net: &ContinuousTemporalNetwork,
    kernel: &DecayKernel,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<StochasticSnapshot> {
    let (t0, _) = net.interval();
    if t == t0 {
        return Ok(StochasticSnapshot::from_weights(&net.adjacency_at(t0), t0));
    }
    accumulated_continuous(net, kernel, t, quad).map(|b| row_normalize(&b))
}

/// `count` equidistant points `t0 + (k-1)(t1 - t0)/(count - 1)`, endpoints exact.
pub fn uniform_partition(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    end
                } else {
                    start + (end - start) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Discrete network sampling `net` on a uniform partition of `count` points.
pub fn truncate(net: &ContinuousTemporalNetwork, count: usize) -> Result<DiscreteTemporalNetwork> {
    if count < 2 {
        return Err(Error::invalid(format!(
            "truncation needs at least 2 points, got {count}"
        )));
    }
    let (t0, t1) = net.interval();
    let instants = uniform_partition(t0, t1, count);
    let snapshots = instants.iter().map(|&s| net.adjacency_at(s)).collect();
    DiscreteTemporalNetwork::new(net.node_count(), instants, snapshots)
}
