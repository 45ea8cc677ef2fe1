//! Google matrix, PageRank solvers and PageRank trajectories.
//!
//! For a transition matrix `P` with dangling indicator `d`, damping `λ`,
//! personalization `v` and dangling distribution `u`, the Google matrix is
//!
//! ```text
//! G = λ (P + d uᵀ) + (1 − λ) e vᵀ
//! ```
//!
//! and the PageRank vector is the unique positive `π` with `πᵀ G = πᵀ`,
//! `πᵀ e = 1`. Equivalently `πᵀ (Id − λ (P + d uᵀ)) = (1 − λ) vᵀ`, which is
//! what [`pagerank_direct`] factorizes. [`pagerank_power`] iterates `Gᵀ`
//! using only sparse products, so `G` is never formed.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accumulate::{
    accumulate_continuous, accumulate_discrete, row_normalize, StochasticSnapshot,
};
use crate::error::{Error, Result};
use crate::network::{
    ContinuousTemporalNetwork, DampingSchedule, DecayKernel, DiscreteTemporalNetwork, InstantRef,
    PersonalizationSchedule,
};
use crate::quadrature::QuadratureConfig;

/// Largest size handled by the dense direct solver under [`SolverKind::Auto`].
pub const DIRECT_SOLVER_LIMIT: usize = 2000;

/// Implicit `G = λ(P + d uᵀ) + (1 − λ) e vᵀ`.
#[derive(Debug, Clone, Copy)]
pub struct GoogleOperator<'a> {
    pub snapshot: &'a StochasticSnapshot,
    pub damping: f64,
    pub teleport: &'a [f64],
    pub dangling_dist: &'a [f64],
}

impl<'a> GoogleOperator<'a> {
    pub fn new(
        snapshot: &'a StochasticSnapshot,
        damping: f64,
        teleport: &'a [f64],
        dangling_dist: &'a [f64],
    ) -> Result<Self> {
        let n = snapshot.dim();
        for len in [teleport.len(), dangling_dist.len(), snapshot.dangling.len()] {
            if len != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: len,
                });
            }
        }
        if !(damping > 0.0 && damping < 1.0) {
            return Err(Error::ScheduleRange(format!("damping {damping} outside (0, 1)")));
        }
        Ok(Self {
            snapshot,
            damping,
            teleport,
            dangling_dist,
        })
    }

    pub fn dim(&self) -> usize {
        self.snapshot.dim()
    }

    /// `Gᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: x.len(),
            });
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("vector entry {bad} is not finite")));
        }
        let lambda = self.damping;
        let mut y = self.snapshot.transition.mul_transpose_vec(x);
        let dangling_mass: f64 = x
            .iter()
            .zip(&self.snapshot.dangling)
            .filter(|(_, &d)| d)
            .map(|(xi, _)| xi)
            .sum();
        let total: f64 = x.iter().sum();
        for ((yj, uj), vj) in y.iter_mut().zip(self.dangling_dist).zip(self.teleport) {
            *yj = lambda * *yj + lambda * dangling_mass * uj + (1.0 - lambda) * total * vj;
        }
        Ok(y)
    }

    /// `‖Gᵀ x − x‖₁`.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        let gx = self.apply_transpose(x)?;
        Ok(gx.iter().zip(x).map(|(a, b)| (a - b).abs()).sum())
    }

    /// Row sums of `G` for the given rows; each should be 1.
    pub fn row_sums(&self, rows: impl IntoIterator<Item = usize>) -> Vec<f64> {
        let lambda = self.damping;
        rows.into_iter()
            .map(|i| {
                let link = if self.snapshot.dangling[i] {
                    self.dangling_dist.iter().sum::<f64>()
                } else {
                    self.snapshot.transition.row_sum(i)
                };
                lambda * link + (1.0 - lambda) * self.teleport.iter().sum::<f64>()
            })
            .collect()
    }
}

/// Dense `Id − λ (P + d uᵀ)`.
pub(crate) fn dense_system(snapshot: &StochasticSnapshot, damping: f64, dangling_dist: &[f64]) -> DMatrix<f64> {
    let n = snapshot.dim();
    let mut m = DMatrix::<f64>::identity(n, n);
    for (i, j, p) in snapshot.transition.iter() {
        m[(i, j)] -= damping * p;
    }
    for (i, _) in snapshot.dangling.iter().enumerate().filter(|(_, &d)| d) {
        for (j, &uj) in dangling_dist.iter().enumerate() {
            m[(i, j)] -= damping * uj;
        }
    }
    m
}

fn check_probability(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: v.len(),
        });
    }
    if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::invalid(format!("{name} has negative or non-finite entries")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

fn renormalize(mut x: Vec<f64>) -> Vec<f64> {
    let s: f64 = x.iter().map(|v| v.abs()).sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Solves `(Id − λ(P + d uᵀ))ᵀ π = (1 − λ) v` by dense LU factorization.
pub fn pagerank_direct(
    snapshot: &StochasticSnapshot,
    damping: f64,
    teleport: &[f64],
    dangling_dist: &[f64],
) -> Result<Vec<f64>> {
    let n = snapshot.dim();
    GoogleOperator::new(snapshot, damping, teleport, dangling_dist)?;
    check_probability("personalization", teleport, n)?;
    check_probability("dangling distribution", dangling_dist, n)?;
    let system = dense_system(snapshot, damping, dangling_dist).transpose();
    let rhs = nalgebra::DVector::from_iterator(n, teleport.iter().map(|v| (1.0 - damping) * v));
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("PageRank system is singular".into()))?;
    Ok(renormalize(solution.iter().copied().collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerOutcome {
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// 1-norm of the last step.
    pub residual: f64,
}

/// Power iteration `x ← Gᵀx / ‖Gᵀx‖₁` from `x₀ = v` until the 1-norm of the
/// step is at most `tol`.
pub fn pagerank_power(op: &GoogleOperator<'_>, tol: f64, max_iter: usize) -> Result<PowerOutcome> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    let mut x = op.teleport.to_vec();
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let next = renormalize(op.apply_transpose(&x)?);
        residual = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if residual <= tol {
            return Ok(PowerOutcome {
                vector: x,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Direct up to [`DIRECT_SOLVER_LIMIT`] nodes, power iteration above.
    #[default]
    Auto,
    Direct,
    Power,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverKind::Auto),
            "direct" => Ok(SolverKind::Direct),
            "power" => Ok(SolverKind::Power),
            other => Err(Error::invalid(format!("unknown solver '{other}'"))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Auto => "auto",
            SolverKind::Direct => "direct",
            SolverKind::Power => "power",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Auto,
            tol: 1e-12,
            max_iter: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn direct() -> Self {
        Self {
            kind: SolverKind::Direct,
            ..Self::default()
        }
    }

    pub fn power() -> Self {
        Self {
            kind: SolverKind::Power,
            ..Self::default()
        }
    }

    pub fn resolve(&self, n: usize) -> SolverKind {
        match self.kind {
            SolverKind::Auto if n <= DIRECT_SOLVER_LIMIT => SolverKind::Direct,
            SolverKind::Auto => SolverKind::Power,
            k => k,
        }
    }
}

/// Everything needed to compute PageRank at one instant.
#[derive(Debug, Clone)]
pub struct InstantProblem {
    pub snapshot: StochasticSnapshot,
    pub damping: f64,
    pub teleport: Vec<f64>,
    pub dangling_dist: Vec<f64>,
}

impl InstantProblem {
    pub fn operator(&self) -> Result<GoogleOperator<'_>> {
        GoogleOperator::new(&self.snapshot, self.damping, &self.teleport, &self.dangling_dist)
    }

    pub fn solve(&self, solver: &SolverConfig) -> Result<InstantSolution> {
        let op = self.operator()?;
        let (scores, iterations) = match solver.resolve(self.snapshot.dim()) {
            SolverKind::Direct => (
                pagerank_direct(&self.snapshot, self.damping, &self.teleport, &self.dangling_dist)?,
                0,
            ),
            _ => {
                let out = pagerank_power(&op, solver.tol, solver.max_iter)?;
                (out.vector, out.iterations)
            }
        };
        if let Some((i, x)) = scores.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
            return Err(Error::Internal(format!(
                "PageRank entry {} is {x}, expected positive",
                i + 1
            )));
        }
        let residual = op.residual(&scores)?;
        Ok(InstantSolution {
            scores,
            iterations,
            residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstantSolution {
    pub scores: Vec<f64>,
    /// Zero for the direct solver.
    pub iterations: usize,
    /// `‖Gᵀπ − π‖₁`
    pub residual: f64,
}

/// Model parameters shared by both time scales.
#[derive(Debug, Clone)]
pub struct TrajectoryOptions {
    pub kernel: DecayKernel,
    pub damping: DampingSchedule,
    pub personalization: PersonalizationSchedule,
    /// Defaults to `personalization` when `None`.
    pub dangling: Option<PersonalizationSchedule>,
    pub solver: SolverConfig,
}

impl TrajectoryOptions {
    pub fn new(kernel: DecayKernel, damping: DampingSchedule, personalization: PersonalizationSchedule) -> Self {
        Self {
            kernel,
            damping,
            personalization,
            dangling: None,
            solver: SolverConfig::default(),
        }
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_dangling(mut self, dangling: PersonalizationSchedule) -> Self {
        self.dangling = Some(dangling);
        self
    }

    fn metadata(&self) -> TrajectoryMetadata {
        TrajectoryMetadata {
            kernel: self.kernel.to_string(),
            damping: self.damping.to_string(),
            personalization: self.personalization.to_string(),
            dangling: self
                .dangling
                .as_ref()
                .unwrap_or(&self.personalization)
                .to_string(),
            solver: self.solver,
        }
    }
}

fn problem(
    opts: &TrajectoryOptions,
    snapshot: StochasticSnapshot,
    adjacency: &crate::sparse::CsrMatrix,
    index: usize,
    count: usize,
) -> Result<InstantProblem> {
    let at = InstantRef {
        index,
        time: snapshot.instant,
    };
    let damping = opts.damping.at(index, count, snapshot.instant)?;
    let teleport = opts.personalization.at(at, adjacency)?;
    let dangling_dist = match &opts.dangling {
        Some(u) => u.at(at, adjacency)?,
        None => teleport.clone(),
    };
    Ok(InstantProblem {
        snapshot,
        damping,
        teleport,
        dangling_dist,
    })
}

/// Per-instant problems of a discrete network, in instant order.
pub fn discrete_problems(net: &DiscreteTemporalNetwork, opts: &TrajectoryOptions) -> Result<Vec<InstantProblem>> {
    let count = net.len();
    (0..count)
        .into_par_iter()
        .map(|k| {
            let b = accumulate_discrete(net, &opts.kernel, k)?;
            problem(opts, row_normalize(&b), net.snapshot(k), k, count)
        })
        .collect()
}

/// Per-instant problems of a continuous network on `grid`.
pub fn continuous_problems(
    net: &ContinuousTemporalNetwork,
    opts: &TrajectoryOptions,
    grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<InstantProblem>> {
    if grid.is_empty() {
        return Err(Error::invalid("evaluation grid is empty"));
    }
    if let Some(t) = grid.iter().find(|&&t| !net.contains(t)) {
        let (a, b) = net.interval();
        return Err(Error::invalid(format!("grid point {t} outside [{a}, {b}]")));
    }
    let count = grid.len();
    grid.par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let snapshot = accumulate_continuous(net, &opts.kernel, t, quad)?;
            problem(opts, snapshot, &net.adjacency_at(t), k, count)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub kernel: String,
    pub damping: String,
    pub personalization: String,
    pub dangling: String,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantDiagnostics {
    pub damping: f64,
    pub iterations: usize,
    pub residual: f64,
    pub dangling_nodes: usize,
}

/// PageRank vectors at successive instants.
#[derive(Debug, Clone, PartialEq)]
pub struct PageRankTrajectory {
    pub instants: Vec<f64>,
    pub scores: Vec<Vec<f64>>,
    pub diagnostics: Vec<InstantDiagnostics>,
    pub metadata: TrajectoryMetadata,
}

impl PageRankTrajectory {
    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.scores.first().map_or(0, Vec::len)
    }

    /// Value of the step function equal to `scores[k]` on `[t_k, t_{k+1})`
    /// (and on `[t_N, ∞)`). `None` before the first instant.
    pub fn step_value(&self, t: f64) -> Option<&[f64]> {
        let k = self.instants.partition_point(|&s| s <= t);
        (k > 0).then(|| self.scores[k - 1].as_slice())
    }
}

fn solve_all(
    problems: &[InstantProblem],
    opts: &TrajectoryOptions,
) -> Result<PageRankTrajectory> {
    let solutions = problems
        .par_iter()
        .map(|p| p.solve(&opts.solver))
        .collect::<Result<Vec<_>>>()?;
    let diagnostics = problems
        .iter()
        .zip(&solutions)
        .map(|(p, s)| InstantDiagnostics {
            damping: p.damping,
            iterations: s.iterations,
            residual: s.residual,
            dangling_nodes: p.snapshot.dangling_count(),
        })
        .collect();
    Ok(PageRankTrajectory {
        instants: problems.iter().map(|p| p.snapshot.instant).collect(),
        scores: solutions.into_iter().map(|s| s.scores).collect(),
        diagnostics,
        metadata: opts.metadata(),
    })
}

pub fn trajectory_discrete(net: &DiscreteTemporalNetwork, opts: &TrajectoryOptions) -> Result<PageRankTrajectory> {
    solve_all(&discrete_problems(net, opts)?, opts)
}

pub fn trajectory_continuous(
    net: &ContinuousTemporalNetwork,
    opts: &TrajectoryOptions,
    grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<PageRankTrajectory> {
    solve_all(&continuous_problems(net, opts, grid, quad)?, opts)
}
