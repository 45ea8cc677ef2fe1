//! Discretization studies: how close the PageRank of a truncation gets to
//! the continuous PageRank.
//!
//! A discrete trajectory on partition points `s_1 < … < s_N` is read as the
//! step function equal to `π_N(s_k)` on `[s_k, s_{k+1})`, which lets it be
//! compared with the continuous trajectory on any grid.

use serde::{Deserialize, Serialize};

use crate::accumulate::truncate;
use crate::error::{Error, Result};
use crate::network::ContinuousTemporalNetwork;
use crate::pagerank::{trajectory_continuous, trajectory_discrete, PageRankTrajectory, TrajectoryOptions};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionError {
    pub partition_size: usize,
    /// Max over grid points and nodes of `|π_N(t) − π(t)|`.
    pub max_abs_error: f64,
    /// Same maximum restricted to the partition points.
    pub max_abs_error_at_partition: f64,
    /// `node_errors[k][i]`: error of node `i` at `grid[k]`.
    pub node_errors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub grid: Vec<f64>,
    pub continuous: PageRankTrajectory,
    pub partitions: Vec<PartitionError>,
}

impl ConvergenceReport {
    pub fn max_errors(&self) -> Vec<f64> {
        self.partitions.iter().map(|p| p.max_abs_error).collect()
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn convergence_study(
    net: &ContinuousTemporalNetwork,
    opts: &TrajectoryOptions,
    sizes: &[usize],
    grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<ConvergenceReport> {
    if sizes.is_empty() {
        return Err(Error::invalid("no partition sizes given"));
    }
    let continuous = trajectory_continuous(net, opts, grid, quad)?;
    let mut partitions = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let discrete = trajectory_discrete(&truncate(net, size)?, opts)?;
        let node_errors: Vec<Vec<f64>> = grid
            .iter()
            .zip(&continuous.scores)
            .map(|(&t, exact)| {
                let approx = discrete
                    .step_value(t)
                    .ok_or_else(|| Error::invalid(format!("grid point {t} precedes the partition")))?;
                Ok(approx.iter().zip(exact).map(|(a, b)| (a - b).abs()).collect())
            })
            .collect::<Result<_>>()?;
        let max_abs_error = node_errors
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max);
        let at_points = trajectory_continuous(net, opts, &discrete.instants, quad)?;
        let max_abs_error_at_partition = discrete
            .scores
            .iter()
            .zip(&at_points.scores)
            .map(|(a, b)| max_abs_diff(a, b))
            .fold(0.0, f64::max);
        partitions.push(PartitionError {
            partition_size: size,
            max_abs_error,
            max_abs_error_at_partition,
            node_errors,
        });
    }
    Ok(ConvergenceReport {
        grid: grid.to_vec(),
        continuous,
        partitions,
    })
}
