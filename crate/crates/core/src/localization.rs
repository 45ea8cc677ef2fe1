//! Resolvent columns and per-node localization bounds.
//!
//! With `M = P + d uᵀ` and `X = (1 − λ)(Id − λM)⁻¹`, every PageRank vector
//! satisfies `πᵀ = vᵀX`. Since `X` is row-stochastic and `v` is a probability
//! vector, `π_i` is a convex combination of column `i` of `X`, so
//!
//! ```text
//! min_j X_ji ≤ π_i ≤ max_j X_ji = X_ii
//! ```
//!
//! whatever the personalization. Columns are computed one at a time so
//! large networks never need the dense inverse.

use nalgebra::linalg::LU;
use nalgebra::{DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accumulate::StochasticSnapshot;
use crate::error::{Error, Result};
use crate::network::{ContinuousTemporalNetwork, DiscreteTemporalNetwork};
use crate::pagerank::{
    continuous_problems, dense_system, discrete_problems, InstantProblem, TrajectoryOptions,
    DIRECT_SOLVER_LIMIT,
};
use crate::quadrature::QuadratureConfig;

/// Tolerance for the `max_j X_ji = X_ii` check.
pub const DOMINANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventColumn {
    /// 0-based.
    pub node: usize,
    /// `(X_1i, …, X_ni)`
    pub column: Vec<f64>,
    pub damping: f64,
    pub instant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum ColumnMethod {
    /// Direct up to [`DIRECT_SOLVER_LIMIT`] nodes, Neumann series above.
    Auto { tol: f64 },
    Direct,
    /// Stops once the 1-norm of the current series term is at most
    /// `tol·(1 − λ)`, which bounds the remaining tail of the column by `tol`.
    Neumann { tol: f64 },
}

impl Default for ColumnMethod {
    fn default() -> Self {
        ColumnMethod::Auto { tol: 1e-13 }
    }
}

fn check_inputs(snapshot: &StochasticSnapshot, damping: f64, dangling_dist: &[f64], node: usize) -> Result<()> {
    let n = snapshot.dim();
    if dangling_dist.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: dangling_dist.len(),
        });
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::ScheduleRange(format!("damping {damping} outside (0, 1)")));
    }
    if node >= n {
        return Err(Error::invalid(format!("node {} outside 1..{n}", node + 1)));
    }
    Ok(())
}

/// `M y = P y + d (uᵀ y)`
fn apply_m(snapshot: &StochasticSnapshot, dangling_dist: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = snapshot.transition.mul_vec(y);
    let uy: f64 = dangling_dist.iter().zip(y).map(|(u, v)| u * v).sum();
    for (o, &d) in out.iter_mut().zip(&snapshot.dangling) {
        if d {
            *o += uy;
        }
    }
    out
}

/// Column `node` of `X` by the Neumann series `(1 − λ) Σ_m λᵐ Mᵐ e_i`.
pub fn resolvent_column_neumann(
    snapshot: &StochasticSnapshot,
    damping: f64,
    dangling_dist: &[f64],
    node: usize,
    tol: f64,
) -> Result<ResolventColumn> {
    check_inputs(snapshot, damping, dangling_dist, node)?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    let n = snapshot.dim();
    let mut term = vec![0.0; n];
    term[node] = 1.0;
    let mut sum = term.clone();
    let threshold = tol * (1.0 - damping);
    loop {
        term = apply_m(snapshot, dangling_dist, &term);
        term.iter_mut().for_each(|x| *x *= damping);
        sum.iter_mut().zip(&term).for_each(|(s, x)| *s += x);
        if term.iter().sum::<f64>() <= threshold {
            break;
        }
    }
    Ok(ResolventColumn {
        node,
        column: sum.into_iter().map(|y| (1.0 - damping) * y).collect(),
        damping,
        instant: snapshot.instant,
    })
}

/// LU factorization of `Id − λM`, reused across columns.
pub struct ResolventSolver {
    lu: LU<f64, Dyn, Dyn>,
    damping: f64,
    instant: f64,
    n: usize,
}

impl ResolventSolver {
    pub fn new(snapshot: &StochasticSnapshot, damping: f64, dangling_dist: &[f64]) -> Result<Self> {
        check_inputs(snapshot, damping, dangling_dist, 0)?;
        Ok(Self {
            lu: dense_system(snapshot, damping, dangling_dist).lu(),
            damping,
            instant: snapshot.instant,
            n: snapshot.dim(),
        })
    }

    pub fn column(&self, node: usize) -> Result<ResolventColumn> {
        if node >= self.n {
            return Err(Error::invalid(format!("node {} outside 1..{}", node + 1, self.n)));
        }
        let mut rhs = DVector::zeros(self.n);
        rhs[node] = 1.0 - self.damping;
        let y = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::Internal("resolvent system is singular".into()))?;
        Ok(ResolventColumn {
            node,
            column: y.iter().copied().collect(),
            damping: self.damping,
            instant: self.instant,
        })
    }

    /// The whole matrix `X`; intended for small networks and tests.
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        let mut x = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let col = self.column(i)?;
            x.set_column(i, &DVector::from_vec(col.column));
        }
        Ok(x)
    }
}

pub fn resolvent_column(
    snapshot: &StochasticSnapshot,
    damping: f64,
    dangling_dist: &[f64],
    node: usize,
    method: ColumnMethod,
) -> Result<ResolventColumn> {
    match method {
        ColumnMethod::Neumann { tol } => resolvent_column_neumann(snapshot, damping, dangling_dist, node, tol),
        ColumnMethod::Auto { tol } if snapshot.dim() > DIRECT_SOLVER_LIMIT => {
            resolvent_column_neumann(snapshot, damping, dangling_dist, node, tol)
        }
        _ => ResolventSolver::new(snapshot, damping, dangling_dist)?.column(node),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeBounds {
    /// 0-based.
    pub node: usize,
    /// `min_j X_ji`
    pub lo: f64,
    /// `X_ii`
    pub hi: f64,
}

impl NodeBounds {
    pub fn contains(&self, score: f64, slack: f64) -> bool {
        self.lo - slack <= score && score <= self.hi + slack
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bounds from a resolvent column; fails if the diagonal entry is not the
/// column maximum, which would indicate a solver defect.
pub fn bounds_from_column(col: &ResolventColumn) -> Result<NodeBounds> {
    let lo = col.column.iter().copied().fold(f64::INFINITY, f64::min);
    let max = col.column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = col.column[col.node];
    if max - hi > DOMINANCE_TOL {
        return Err(Error::Internal(format!(
            "resolvent column {} at t = {}: diagonal {hi} below column maximum {max}",
            col.node + 1,
            col.instant
        )));
    }
    Ok(NodeBounds {
        node: col.node,
        lo: lo.max(0.0),
        hi,
    })
}

pub fn bounds_for_node(
    snapshot: &StochasticSnapshot,
    damping: f64,
    dangling_dist: &[f64],
    node: usize,
) -> Result<NodeBounds> {
    bounds_from_column(&resolvent_column(
        snapshot,
        damping,
        dangling_dist,
        node,
        ColumnMethod::default(),
    )?)
}

/// Bounds for `nodes` under one instant's `(P, λ, u)`.
pub fn bounds_for_problem(problem: &InstantProblem, nodes: &[usize], method: ColumnMethod) -> Result<Vec<NodeBounds>> {
    let n = problem.snapshot.dim();
    let direct = match method {
        ColumnMethod::Direct => true,
        ColumnMethod::Auto { .. } => n <= DIRECT_SOLVER_LIMIT,
        ColumnMethod::Neumann { .. } => false,
    };
    if direct {
        let solver = ResolventSolver::new(&problem.snapshot, problem.damping, &problem.dangling_dist)?;
        nodes
            .iter()
            .map(|&i| bounds_from_column(&solver.column(i)?))
            .collect()
    } else {
        nodes
            .par_iter()
            .map(|&i| {
                bounds_from_column(&resolvent_column(
                    &problem.snapshot,
                    problem.damping,
                    &problem.dangling_dist,
                    i,
                    method,
                )?)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationBounds {
    pub instants: Vec<f64>,
    /// 0-based node indices, in request order.
    pub nodes: Vec<usize>,
    /// `bounds[k][m]` belongs to `instants[k]` and `nodes[m]`.
    pub bounds: Vec<Vec<NodeBounds>>,
}

/// Node subset to bound; `None` means all nodes, allowed up to
/// [`DIRECT_SOLVER_LIMIT`] nodes.
pub fn resolve_nodes(n: usize, nodes: Option<&[usize]>) -> Result<Vec<usize>> {
    match nodes {
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&i| i >= n) {
                return Err(Error::invalid(format!("node {} outside 1..{n}", bad + 1)));
            }
            Ok(list.to_vec())
        }
        None if n <= DIRECT_SOLVER_LIMIT => Ok((0..n).collect()),
        None => Err(Error::invalid(format!(
            "network has {n} nodes; list the nodes to bound explicitly"
        ))),
    }
}

pub fn bounds_for_problems(
    problems: &[InstantProblem],
    nodes: Option<&[usize]>,
    method: ColumnMethod,
) -> Result<LocalizationBounds> {
    let n = problems.first().map_or(0, |p| p.snapshot.dim());
    let nodes = resolve_nodes(n, nodes)?;
    let bounds = problems
        .par_iter()
        .map(|p| bounds_for_problem(p, &nodes, method))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalizationBounds {
        instants: problems.iter().map(|p| p.snapshot.instant).collect(),
        nodes,
        bounds,
    })
}

/// Bounds at every instant of a discrete network. Only the kernel, damping
/// and dangling distribution of `opts` matter.
pub fn bounds_discrete(
    net: &DiscreteTemporalNetwork,
    opts: &TrajectoryOptions,
    nodes: Option<&[usize]>,
) -> Result<LocalizationBounds> {
    bounds_for_problems(&discrete_problems(net, opts)?, nodes, ColumnMethod::default())
}

pub fn bounds_continuous(
    net: &ContinuousTemporalNetwork,
    opts: &TrajectoryOptions,
    grid: &[f64],
    quad: &QuadratureConfig,
    nodes: Option<&[usize]>,
) -> Result<LocalizationBounds> {
    bounds_for_problems(&continuous_problems(net, opts, grid, quad)?, nodes, ColumnMethod::default())
}
