//! Temporal networks on discrete and continuous time scales, decay kernels,
//! and damping/personalization schedules.
//!
//! Node indices are 0-based in memory and 1-based in every file format and
//! user-facing message.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use crate::timefn::TimeFunction;

/// A fixed node set observed at strictly increasing instants.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTemporalNetwork {
    n: usize,
    instants: Vec<f64>,
    snapshots: Vec<CsrMatrix>,
    initial: Option<CsrMatrix>,
}

impl DiscreteTemporalNetwork {
    /// Builds and validates a network. Fails with the full violation list.
    pub fn new(n: usize, instants: Vec<f64>, snapshots: Vec<CsrMatrix>) -> Result<Self> {
        let net = Self::new_unchecked(n, instants, snapshots, None);
        net.check()?;
        Ok(net)
    }

    pub fn with_initial(mut self, initial: CsrMatrix) -> Result<Self> {
        self.initial = Some(initial);
        self.check()?;
        Ok(self)
    }

    /// Skips validation; call [`validate`] to get the violation list.
    pub fn new_unchecked(
        n: usize,
        instants: Vec<f64>,
        snapshots: Vec<CsrMatrix>,
        initial: Option<CsrMatrix>,
    ) -> Self {
        Self {
            n,
            instants,
            snapshots,
            initial,
        }
    }

    fn check(&self) -> Result<()> {
        match validate_discrete(self) {
            Validation::Ok => Ok(()),
            Validation::Violations(v) => Err(Error::invalid(v.join("; "))),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    pub fn snapshots(&self) -> &[CsrMatrix] {
        &self.snapshots
    }

    pub fn snapshot(&self, k: usize) -> &CsrMatrix {
        &self.snapshots[k]
    }

    pub fn initial(&self) -> Option<&CsrMatrix> {
        self.initial.as_ref()
    }
}

/// An edge of a continuous network: `a_ij(t)` for `t` in the network interval.
#[derive(Debug, Clone)]
pub struct ContinuousEdge {
    pub row: usize,
    pub col: usize,
    pub weight: TimeFunction,
}

#[derive(Debug, Clone)]
pub struct ContinuousTemporalNetwork {
    n: usize,
    start: f64,
    end: f64,
    symmetric: bool,
    edges: Vec<ContinuousEdge>,
}

/// Sample points used to check that edge functions are finite and nonnegative.
const SAMPLE_CHECKS: usize = 257;

impl ContinuousTemporalNetwork {
    /// `edges` holds `(i, j, a_ij)` with 0-based indices. With `symmetric`
    /// set, each edge is also stored as `(j, i, a_ij)`.
    pub fn new(
        n: usize,
        interval: (f64, f64),
        symmetric: bool,
        edges: Vec<(usize, usize, TimeFunction)>,
    ) -> Result<Self> {
        let (start, end) = interval;
        if n == 0 {
            return Err(Error::invalid("node count must be positive"));
        }
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::invalid(format!(
                "interval [{start}, {end}] must satisfy t0 < t1"
            )));
        }
        let mut stored = Vec::with_capacity(edges.len() * if symmetric { 2 } else { 1 });
        for (i, j, f) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) references a node outside 1..{n}",
                    i + 1,
                    j + 1
                )));
            }
            for s in 0..SAMPLE_CHECKS {
                let t = start + (end - start) * s as f64 / (SAMPLE_CHECKS - 1) as f64;
                let w = f.eval(t);
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::invalid(format!(
                        "edge ({}, {}) weight {f} evaluates to {w} at t = {t}",
                        i + 1,
                        j + 1
                    )));
                }
            }
            if symmetric && i != j {
                stored.push(ContinuousEdge {
                    row: j,
                    col: i,
                    weight: f.clone(),
                });
            }
            stored.push(ContinuousEdge {
                row: i,
                col: j,
                weight: f,
            });
        }
        stored.sort_by_key(|e| (e.row, e.col));
        for pair in stored.windows(2) {
            if (pair[0].row, pair[0].col) == (pair[1].row, pair[1].col) {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) defined more than once",
                    pair[0].row + 1,
                    pair[0].col + 1
                )));
            }
        }
        Ok(Self {
            n,
            start,
            end,
            symmetric,
            edges: stored,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Stored edges in row-major order, mirrored copies included.
    pub fn edges(&self) -> &[ContinuousEdge] {
        &self.edges
    }

    /// Edges as originally declared (for symmetric networks, only `i <= j`).
    pub fn declared_edges(&self) -> impl Iterator<Item = &ContinuousEdge> {
        self.edges
            .iter()
            .filter(move |e| !self.symmetric || e.row <= e.col)
    }

    /// Pointwise adjacency `A(t)`.
    pub fn adjacency_at(&self, t: f64) -> CsrMatrix {
        let triplets: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.row, e.col, e.weight.eval(t)))
            .collect();
        CsrMatrix::from_sorted_sum(self.n, triplets)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

/// Weight `ω(s, t)` that an interaction at time `s` carries at time `t`.
#[derive(Clone)]
pub enum DecayKernel {
    /// `ω(s, t) = e^{-rate (t - s)}` for `s <= t`. Negative rates are allowed
    /// and make older interactions weigh more.
    Exponential { rate: f64 },
    /// Must return finite values `>= 0`, with `ω(t, t) > 0`. The cutoff
    /// `ω(s, t) = 0` for `s > t` is applied by [`DecayKernel::eval`], not by
    /// the evaluator.
    Custom {
        label: String,
        eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    },
}

impl DecayKernel {
    pub fn exponential(rate: f64) -> Self {
        DecayKernel::Exponential { rate }
    }

    pub fn custom<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        DecayKernel::Custom {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        if !s.is_finite() || !t.is_finite() {
            return Err(Error::invalid(format!("kernel evaluated at ({s}, {t})")));
        }
        if s > t {
            return Ok(0.0);
        }
        match self {
            DecayKernel::Exponential { rate } => Ok((-rate * (t - s)).exp()),
            DecayKernel::Custom { label, eval } => {
                let w = eval(s, t);
                if !w.is_finite() || w < 0.0 || (s == t && w == 0.0) {
                    return Err(Error::invalid(format!(
                        "kernel {label} returned {w} at ({s}, {t})"
                    )));
                }
                Ok(w)
            }
        }
    }

    /// `ln 2 / rate` for exponential kernels with positive rate.
    pub fn half_life(&self) -> Option<f64> {
        match self {
            DecayKernel::Exponential { rate } if *rate > 0.0 => Some(std::f64::consts::LN_2 / rate),
            _ => None,
        }
    }

    pub fn rate(&self) -> Option<f64> {
        match self {
            DecayKernel::Exponential { rate } => Some(*rate),
            DecayKernel::Custom { .. } => None,
        }
    }
}

impl fmt::Display for DecayKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayKernel::Exponential { rate } => write!(f, "exponential(alpha={rate})"),
            DecayKernel::Custom { label, .. } => write!(f, "custom({label})"),
        }
    }
}

impl fmt::Debug for DecayKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecayKernel::{self}")
    }
}

/// Damping factor `λ` per instant. Values are checked to lie in `(0, 1)`.
#[derive(Clone)]
pub enum DampingSchedule {
    Constant(f64),
    /// `start + (end - start)(k - 1)/(N - 1)` for 1-based `k`.
    LinearByIndex { start: f64, end: f64 },
    Custom {
        label: String,
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl DampingSchedule {
    pub fn custom<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        DampingSchedule::Custom {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    /// Damping at 0-based instant `index` of `count`, occurring at time `t`.
    pub fn at(&self, index: usize, count: usize, t: f64) -> Result<f64> {
        if count == 0 || index >= count {
            return Err(Error::invalid(format!(
                "instant index {} outside 1..{count}",
                index + 1
            )));
        }
        let value = match self {
            DampingSchedule::Constant(l) => *l,
            DampingSchedule::LinearByIndex { start, end } => {
                if count == 1 {
                    *start
                } else {
                    start + (end - start) * index as f64 / (count - 1) as f64
                }
            }
            DampingSchedule::Custom { eval, .. } => eval(t),
        };
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ScheduleRange(format!(
                "damping {value} at instant {} is outside (0, 1)",
                index + 1
            )));
        }
        Ok(value)
    }
}

/// Damping at 1-based instant `k` of `count` for index-driven schedules.
pub fn damping_at(schedule: &DampingSchedule, k: usize, count: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("instant indices are 1-based"));
    }
    schedule.at(k - 1, count, f64::NAN)
}

impl fmt::Display for DampingSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DampingSchedule::Constant(l) => write!(f, "{l}"),
            DampingSchedule::LinearByIndex { start, end } => write!(f, "linear:{start}:{end}"),
            DampingSchedule::Custom { label, .. } => write!(f, "custom:{label}"),
        }
    }
}

impl fmt::Debug for DampingSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DampingSchedule({self})")
    }
}

/// Where an instant sits, handed to custom personalization evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantRef {
    /// 0-based.
    pub index: usize,
    pub time: f64,
}

pub type PersonalizationFn = dyn Fn(InstantRef, &CsrMatrix) -> Vec<f64> + Send + Sync;

/// Teleportation (or dangling) distribution per instant.
///
/// Every produced vector is strictly positive and normalized to unit 1-norm.
#[derive(Clone)]
pub enum PersonalizationSchedule {
    /// `e / n`
    Uniform,
    /// Proportional to `e + ` column sums of the instantaneous adjacency.
    Input,
    /// Proportional to `1 / (1 + column sum)` componentwise.
    InverseInput,
    Custom {
        label: String,
        eval: Arc<PersonalizationFn>,
    },
}

impl PersonalizationSchedule {
    pub fn custom<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(InstantRef, &CsrMatrix) -> Vec<f64> + Send + Sync + 'static,
    {
        PersonalizationSchedule::Custom {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    /// A fixed vector for every instant; normalized on each call.
    pub fn fixed(label: impl Into<String>, v: Vec<f64>) -> Self {
        Self::custom(label, move |_, _| v.clone())
    }

    /// One vector per instant (0-based index).
    pub fn per_instant(label: impl Into<String>, vectors: Vec<Vec<f64>>) -> Self {
        Self::custom(label, move |at, _| {
            vectors
                .get(at.index)
                .or_else(|| vectors.last())
                .cloned()
                .unwrap_or_default()
        })
    }

    pub fn at(&self, at: InstantRef, adjacency: &CsrMatrix) -> Result<Vec<f64>> {
        let n = adjacency.dim();
        let raw = match self {
            PersonalizationSchedule::Uniform => vec![1.0; n],
            PersonalizationSchedule::Input => {
                adjacency.column_sums().into_iter().map(|c| 1.0 + c).collect()
            }
            PersonalizationSchedule::InverseInput => adjacency
                .column_sums()
                .into_iter()
                .map(|c| 1.0 / (1.0 + c))
                .collect(),
            PersonalizationSchedule::Custom { eval, .. } => eval(at, adjacency),
        };
        if raw.len() != n {
            return Err(Error::ScheduleRange(format!(
                "personalization {self} produced {} entries for {n} nodes",
                raw.len()
            )));
        }
        normalize_positive(raw).map_err(|msg| {
            Error::ScheduleRange(format!(
                "personalization {self} at instant {}: {msg}",
                at.index + 1
            ))
        })
    }
}

/// Personalization for a single adjacency matrix.
pub fn personalization_at(
    schedule: &PersonalizationSchedule,
    adjacency: &CsrMatrix,
) -> Result<Vec<f64>> {
    schedule.at(InstantRef { index: 0, time: 0.0 }, adjacency)
}

fn normalize_positive(mut v: Vec<f64>) -> std::result::Result<Vec<f64>, String> {
    if let Some((i, x)) = v
        .iter()
        .enumerate()
        .find(|(_, x)| !(x.is_finite() && **x > 0.0))
    {
        return Err(format!("entry {} is {x}, must be positive", i + 1));
    }
    let total: f64 = v.iter().sum();
    if !total.is_finite() {
        return Err("vector is not normalizable".into());
    }
    v.iter_mut().for_each(|x| *x /= total);
    Ok(v)
}

impl fmt::Display for PersonalizationSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PersonalizationSchedule::Uniform => write!(f, "uniform"),
            PersonalizationSchedule::Input => write!(f, "input"),
            PersonalizationSchedule::InverseInput => write!(f, "inverse-input"),
            PersonalizationSchedule::Custom { label, .. } => write!(f, "custom:{label}"),
        }
    }
}

impl fmt::Debug for PersonalizationSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PersonalizationSchedule({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "violations", rename_all = "lowercase")]
pub enum Validation {
    Ok,
    Violations(Vec<String>),
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validation::Ok)
    }

    fn from_list(list: Vec<String>) -> Self {
        if list.is_empty() {
            Validation::Ok
        } else {
            Validation::Violations(list)
        }
    }
}

/// Reports every invariant violation of a discrete network.
pub fn validate_discrete(net: &DiscreteTemporalNetwork) -> Validation {
    let mut out = Vec::new();
    if net.n == 0 {
        out.push("node count must be positive".to_string());
    }
    if net.instants.is_empty() {
        out.push("network has no instants".to_string());
    }
    if net.instants.len() != net.snapshots.len() {
        out.push(format!(
            "{} instants but {} snapshots",
            net.instants.len(),
            net.snapshots.len()
        ));
    }
    for (k, t) in net.instants.iter().enumerate() {
        if !t.is_finite() {
            out.push(format!("instant {} is not finite", k + 1));
        }
    }
    for (k, pair) in net.instants.windows(2).enumerate() {
        if !(pair[0] < pair[1]) {
            out.push(format!(
                "instants not strictly increasing: t{} = {} and t{} = {}",
                k + 1,
                pair[0],
                k + 2,
                pair[1]
            ));
        }
    }
    let matrices = net
        .snapshots
        .iter()
        .enumerate()
        .map(|(k, m)| (format!("snapshot {}", k + 1), m))
        .chain(net.initial.iter().map(|m| ("initial adjacency".to_string(), m)));
    for (name, m) in matrices {
        if m.dim() != net.n {
            out.push(format!(
                "{name} dimension mismatch: {}x{} for {} nodes",
                m.dim(),
                m.dim(),
                net.n
            ));
        }
        for (i, j, w) in m.iter() {
            if w < 0.0 {
                out.push(format!("{name} has negative weight {w} at ({}, {})", i + 1, j + 1));
            } else if !w.is_finite() {
                out.push(format!("{name} has non-finite weight at ({}, {})", i + 1, j + 1));
            }
        }
    }
    Validation::from_list(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> CsrMatrix {
        CsrMatrix::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn kernel_half_life() {
        let k = DecayKernel::exponential(0.001);
        let w = k.eval(0.0, 693.147).unwrap();
        assert!((w - 0.5).abs() < 1e-6);
        assert!((k.half_life().unwrap() - 693.147_180_559_945_3).abs() < 1e-9);
        assert!(DecayKernel::exponential(-4.0).half_life().is_none());
    }

    #[test]
    fn kernel_diagonal_and_future() {
        for k in [DecayKernel::exponential(3.0), DecayKernel::exponential(-4.0)] {
            assert_eq!(k.eval(2.5, 2.5).unwrap(), 1.0);
            assert_eq!(k.eval(5.0, 3.0).unwrap(), 0.0);
        }
        let c = DecayKernel::custom("flat", |_, _| 2.0);
        assert_eq!(c.eval(5.0, 3.0).unwrap(), 0.0);
        assert_eq!(c.eval(1.0, 3.0).unwrap(), 2.0);
    }

    #[test]
    fn kernel_rejects_non_finite_times() {
        let k = DecayKernel::exponential(1.0);
        assert!(matches!(k.eval(f64::NAN, 1.0), Err(Error::InvalidInput(_))));
        assert!(k.eval(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn custom_kernel_range_checked() {
        let bad = DecayKernel::custom("neg", |_, _| -1.0);
        assert!(bad.eval(0.0, 1.0).is_err());
        let zero_diag = DecayKernel::custom("zero", |s, t| t - s);
        assert!(zero_diag.eval(1.0, 1.0).is_err());
    }

    #[test]
    fn linear_damping_schedule() {
        let s = DampingSchedule::LinearByIndex {
            start: 0.01,
            end: 0.99,
        };
        assert_eq!(damping_at(&s, 1, 21).unwrap(), 0.01);
        assert!((damping_at(&s, 21, 21).unwrap() - 0.99).abs() < 1e-15);
        assert!((damping_at(&s, 11, 21).unwrap() - 0.50).abs() < 1e-15);
        assert_eq!(damping_at(&s, 1, 1).unwrap(), 0.01);
    }

    #[test]
    fn damping_range_errors() {
        assert!(matches!(
            damping_at(&DampingSchedule::Constant(1.0), 1, 1),
            Err(Error::ScheduleRange(_))
        ));
        let wild = DampingSchedule::custom("wild", |t| t);
        assert!(wild.at(0, 2, 0.5).is_ok());
        assert!(wild.at(1, 2, 1.5).is_err());
        let s = DampingSchedule::LinearByIndex {
            start: 0.5,
            end: 1.5,
        };
        assert!(damping_at(&s, 3, 3).is_err());
        assert!(damping_at(&s, 0, 3).is_err());
    }

    #[test]
    fn personalization_recipes() {
        let a = dense(&[&[0.0, 1.0], &[1.0, 1.0]]);
        let uni = personalization_at(&PersonalizationSchedule::Uniform, &CsrMatrix::zeros(4)).unwrap();
        assert_eq!(uni, vec![0.25; 4]);
        let input = personalization_at(&PersonalizationSchedule::Input, &a).unwrap();
        assert!((input[0] - 0.4).abs() < 1e-15 && (input[1] - 0.6).abs() < 1e-15);
        let inv = personalization_at(&PersonalizationSchedule::InverseInput, &a).unwrap();
        assert!((inv[0] - 0.6).abs() < 1e-15 && (inv[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn custom_personalization_checked() {
        let a = CsrMatrix::zeros(3);
        let zero = PersonalizationSchedule::fixed("z", vec![1.0, 0.0, 1.0]);
        assert!(matches!(personalization_at(&zero, &a), Err(Error::ScheduleRange(_))));
        let short = PersonalizationSchedule::fixed("s", vec![1.0, 1.0]);
        assert!(personalization_at(&short, &a).is_err());
        let ok = PersonalizationSchedule::fixed("ok", vec![1.0, 2.0, 1.0]);
        assert_eq!(personalization_at(&ok, &a).unwrap(), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn validate_reports_violations() {
        let a = dense(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let good = DiscreteTemporalNetwork::new_unchecked(2, vec![0.0, 1.0], vec![a.clone(), a.clone()], None);
        assert!(validate_discrete(&good).is_ok());

        let repeated = DiscreteTemporalNetwork::new_unchecked(2, vec![3.0, 3.0], vec![a.clone(), a.clone()], None);
        let Validation::Violations(v) = validate_discrete(&repeated) else {
            panic!("expected violations")
        };
        assert!(v[0].contains("not strictly increasing"));

        let neg = dense(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let negative = DiscreteTemporalNetwork::new_unchecked(2, vec![0.0, 1.0], vec![a.clone(), neg], None);
        let Validation::Violations(v) = validate_discrete(&negative) else {
            panic!("expected violations")
        };
        assert!(v.iter().any(|m| m.contains("negative weight")));

        let wrong_dim = DiscreteTemporalNetwork::new_unchecked(3, vec![0.0], vec![a], None);
        assert!(!validate_discrete(&wrong_dim).is_ok());
    }

    #[test]
    fn continuous_network_checks() {
        let f = TimeFunction::parse("t - 0.5").unwrap();
        assert!(ContinuousTemporalNetwork::new(2, (0.0, 1.0), false, vec![(0, 1, f)]).is_err());
        let g = TimeFunction::constant(1.0);
        assert!(ContinuousTemporalNetwork::new(2, (1.0, 1.0), false, vec![]).is_err());
        assert!(ContinuousTemporalNetwork::new(2, (0.0, 1.0), false, vec![(0, 2, g.clone())]).is_err());
        let net = ContinuousTemporalNetwork::new(2, (0.0, 1.0), true, vec![(0, 1, g.clone())]).unwrap();
        assert_eq!(net.edges().len(), 2);
        assert_eq!(net.declared_edges().count(), 1);
        assert!(ContinuousTemporalNetwork::new(2, (0.0, 1.0), true, vec![(0, 1, g.clone()), (1, 0, g)]).is_err());
    }
}
