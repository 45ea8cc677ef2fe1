//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Criterion 8 needs the it-wiki link-dynamic event file; point
//! `TEMPORANK_WIKI_EVENTS` at it to run that check.

use std::f64::consts::{E, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use temporank::accumulate::{accumulated_continuous, uniform_partition};
use temporank::converge::convergence_study;
use temporank::ingest::{build_snapshots, parse_events, sample_grid, Origin, ParseOptions, Policy, TimeUnit};
use temporank::localization::{bounds_for_problem, ColumnMethod, ResolventSolver, DOMINANCE_TOL};
use temporank::pagerank::{discrete_problems, pagerank_direct, pagerank_power, SolverConfig};
use temporank::presets::paper_synthetic;
use temporank::quadrature::QuadratureConfig;
use temporank::rank::{compare_trajectories, pair_counts, PairCounts};
use temporank::{
    trajectory_discrete, CsrMatrix, DampingSchedule, DecayKernel, DiscreteTemporalNetwork,
    PersonalizationSchedule, TrajectoryOptions,
};

// Tolerances as fixed by the acceptance criteria.
const CONVERGENCE_MAX_ERROR: f64 = 3e-3;
const HALF_LIFE_TOL: f64 = 1e-3;
const CONTAINMENT_SLACK: f64 = 1e-12;
const SOLVER_AGREEMENT: f64 = 1e-10;
const QUADRATURE_TOL: f64 = 1e-8;
const REDUCTION_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let net = paper_synthetic().map_err(|e| e.to_string())?;
    let grid = uniform_partition(0.0, 1.0, 101);
    let quad = QuadratureConfig::default();
    let mut summary = Vec::new();
    for alpha in [-4.0, 1.0, 6.0] {
        let opts = TrajectoryOptions::new(
            DecayKernel::exponential(alpha),
            DampingSchedule::Constant(0.85),
            PersonalizationSchedule::Uniform,
        );
        let report = convergence_study(&net, &opts, &[5, 9, 101], &grid, &quad).map_err(|e| e.to_string())?;
        let errs = report.max_errors();
        ensure(errs[0] > errs[1] && errs[1] > errs[2], || {
            format!("alpha {alpha}: errors not strictly decreasing {errs:?}")
        })?;
        ensure(errs[2] <= CONVERGENCE_MAX_ERROR, || {
            format!("alpha {alpha}: N=101 error {:.3e} > {CONVERGENCE_MAX_ERROR:e}", errs[2])
        })?;
        summary.push(format!("alpha {alpha}: {:.2e}/{:.2e}/{:.2e}", errs[0], errs[1], errs[2]));
    }
    Ok(summary.join("; "))
}

fn criterion_2() -> Outcome {
    let kernel = DecayKernel::exponential(0.001);
    let t = 1234.5;
    let w = kernel.eval(t, t + 693.15).map_err(|e| e.to_string())?;
    ensure((w - 0.5).abs() <= HALF_LIFE_TOL, || format!("omega = {w}"))?;
    Ok(format!("omega(t, t + 693.15) = {w:.6}"))
}

struct RandomNet {
    net: DiscreteTemporalNetwork,
    opts: TrajectoryOptions,
}

fn random_network(rng: &mut ChaCha8Rng) -> RandomNet {
    let n = rng.gen_range(2..=50);
    let count = rng.gen_range(1..=6);
    let density = rng.gen_range(0.02..0.4);
    let dangling_rate = rng.gen_range(0.0..0.3);
    let mut snapshots = Vec::with_capacity(count);
    for _ in 0..count {
        let mut triplets = Vec::new();
        for i in 0..n {
            if rng.gen_bool(dangling_rate) {
                continue;
            }
            for j in 0..n {
                if rng.gen_bool(density) {
                    triplets.push((i, j, rng.gen_range(0.01..5.0)));
                }
            }
        }
        snapshots.push(CsrMatrix::from_triplets(n, &triplets).unwrap());
    }
    let mut t = 0.0;
    let instants: Vec<f64> = (0..count)
        .map(|_| {
            t += rng.gen_range(0.1..3.0);
            t
        })
        .collect();
    let lambdas: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..0.95)).collect();
    let vs: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(0.01..1.0)).collect())
        .collect();
    let times = instants.clone();
    let damping = DampingSchedule::custom("random", move |t| {
        let k = times.iter().position(|&s| s == t).expect("known instant");
        lambdas[k]
    });
    let alpha = rng.gen_range(-0.5..2.0);
    let opts = TrajectoryOptions::new(
        DecayKernel::exponential(alpha),
        damping,
        PersonalizationSchedule::per_instant("random", vs),
    );
    RandomNet {
        net: DiscreteTemporalNetwork::new(n, instants, snapshots).unwrap(),
        opts,
    }
}

fn inf_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Criteria 3 and 4 share the random suite.
fn criteria_3_4() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e3a_11c5);
    let mut checked = 0usize;
    let mut dangling_instants = 0usize;
    let mut worst_containment = f64::NEG_INFINITY;
    let mut worst_dominance = 0.0f64;
    let mut worst_agreement = 0.0f64;
    let mut c3: Result<(), String> = Ok(());
    let mut c4: Result<(), String> = Ok(());
    for case in 0..500 {
        let RandomNet { net, opts } = random_network(&mut rng);
        let problems = match discrete_problems(&net, &opts) {
            Ok(p) => p,
            Err(e) => {
                let msg = format!("case {case}: {e}");
                return (Err(msg.clone()), Err(msg));
            }
        };
        for (k, p) in problems.iter().enumerate() {
            let n = p.snapshot.dim();
            if p.snapshot.has_dangling() {
                dangling_instants += 1;
            }
            let direct = pagerank_direct(&p.snapshot, p.damping, &p.teleport, &p.dangling_dist).unwrap();
            let op = p.operator().unwrap();
            let power = pagerank_power(&op, 1e-12, 100_000).unwrap().vector;
            let x = ResolventSolver::new(&p.snapshot, p.damping, &p.dangling_dist)
                .unwrap()
                .matrix()
                .unwrap();
            let closed: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| p.teleport[j] * x[(j, i)]).sum())
                .collect();

            let gap = inf_norm(&direct, &power).max(inf_norm(&direct, &closed)).max(inf_norm(&power, &closed));
            worst_agreement = worst_agreement.max(gap);
            if gap > SOLVER_AGREEMENT && c4.is_ok() {
                c4 = Err(format!("case {case} instant {k}: solvers differ by {gap:e}"));
            }

            for i in 0..n {
                let col_max = (0..n).map(|j| x[(j, i)]).fold(f64::NEG_INFINITY, f64::max);
                let excess = col_max - x[(i, i)];
                worst_dominance = worst_dominance.max(excess);
                if excess > DOMINANCE_TOL && c3.is_ok() {
                    c3 = Err(format!("case {case} instant {k} node {}: X_ii below column max by {excess:e}", i + 1));
                }
            }
            let nodes: Vec<usize> = (0..n).collect();
            match bounds_for_problem(p, &nodes, ColumnMethod::default()) {
                Ok(bounds) => {
                    for b in &bounds {
                        for score in [direct[b.node], power[b.node]] {
                            let slip = (b.lo - score).max(score - b.hi);
                            worst_containment = worst_containment.max(slip);
                            if !b.contains(score, CONTAINMENT_SLACK) && c3.is_ok() {
                                c3 = Err(format!(
                                    "case {case} instant {k} node {}: {score} outside [{}, {}]",
                                    b.node + 1,
                                    b.lo,
                                    b.hi
                                ));
                            }
                        }
                    }
                }
                Err(e) if c3.is_ok() => c3 = Err(format!("case {case} instant {k}: {e}")),
                Err(_) => {}
            }
            checked += 1;
        }
    }
    let c3 = c3.map(|_| {
        format!(
            "{checked} instants ({dangling_instants} with dangling nodes); worst slip {worst_containment:.1e}, worst dominance excess {worst_dominance:.1e}"
        )
    });
    let c4 = c4.map(|_| format!("{checked} instants; worst disagreement {worst_agreement:.1e}"));
    (c3, c4)
}

fn brute_counts(x: &[f64], y: &[f64]) -> PairCounts {
    let n = x.len();
    let mut c = PairCounts {
        pairs: 0,
        tied_x: 0,
        tied_y: 0,
        tied_xy: 0,
        discordant: 0,
    };
    for i in 0..n {
        for j in i + 1..n {
            c.pairs += 1;
            let tx = x[i] == x[j];
            let ty = y[i] == y[j];
            c.tied_x += tx as u64;
            c.tied_y += ty as u64;
            c.tied_xy += (tx && ty) as u64;
            if !tx && !ty && ((x[i] < x[j]) != (y[i] < y[j])) {
                c.discordant += 1;
            }
        }
    }
    c
}

fn brute_tau(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut conc, mut disc, mut tx, mut ty, mut pairs) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let dx = x[i].partial_cmp(&x[j]).unwrap();
            let dy = y[i].partial_cmp(&y[j]).unwrap();
            if dx.is_eq() {
                tx += 1;
            }
            if dy.is_eq() {
                ty += 1;
            }
            if dx.is_ne() && dy.is_ne() {
                if dx == dy {
                    conc += 1;
                } else {
                    disc += 1;
                }
            }
        }
    }
    let (nx, ny) = (pairs - tx, pairs - ty);
    if nx == 0 || ny == 0 {
        None
    } else {
        Some((conc - disc) as f64 / ((nx as f64) * (ny as f64)).sqrt())
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab_0c0d);
    let mut undefined = 0;
    for case in 0..1000 {
        let n = rng.gen_range(2..=200);
        let levels = rng.gen_range(1..=n.min(12)) as u32;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64 * 0.5).collect();
        let fast = pair_counts(&x, &y).map_err(|e| e.to_string())?;
        let slow = brute_counts(&x, &y);
        ensure(fast == slow, || format!("case {case}: counts {fast:?} vs {slow:?}"))?;
        match (fast.tau_b().ok(), brute_tau(&x, &y)) {
            (Some(a), Some(b)) => ensure(a == b, || format!("case {case}: tau {a} vs {b}"))?,
            (None, None) => undefined += 1,
            (a, b) => return Err(format!("case {case}: tau {a:?} vs {b:?}")),
        }
        if x.iter().any(|&v| v != x[0]) {
            let own = temporank::kendall_tau(&x, &x).map_err(|e| e.to_string())?;
            ensure(own == 1.0, || format!("case {case}: tau(x, x) = {own}"))?;
        }
        let strict: Vec<f64> = (0..n).map(|i| i as f64 + rng.gen_range(0.0..0.5)).collect();
        let reversed: Vec<f64> = strict.iter().map(|v| -v).collect();
        let r = temporank::kendall_tau(&strict, &reversed).map_err(|e| e.to_string())?;
        ensure(r == -1.0, || format!("case {case}: tau(x, reversed) = {r}"))?;
    }
    Ok(format!("1000 vectors exact ({undefined} all-tied, undefined in both)"))
}

/// `∫_0^t s^k e^{a s} ds` for `k ≤ 2`.
fn moment(k: u32, a: f64, t: f64) -> f64 {
    if a == 0.0 {
        return t.powi(k as i32 + 1) / (k + 1) as f64;
    }
    let prim = |s: f64| -> f64 {
        let e = (a * s).exp();
        match k {
            0 => e / a,
            1 => e * (s / a - 1.0 / (a * a)),
            2 => e * (s * s / a - 2.0 * s / (a * a) + 2.0 / (a * a * a)),
            _ => unreachable!(),
        }
    };
    prim(t) - prim(0.0)
}

/// `∫_0^t e^{a s} sin(w s) ds` and the cosine counterpart.
fn trig_moments(a: f64, w: f64, t: f64) -> (f64, f64) {
    let d = a * a + w * w;
    let sin_prim = |s: f64| (a * s).exp() * (a * (w * s).sin() - w * (w * s).cos()) / d;
    let cos_prim = |s: f64| (a * s).exp() * (a * (w * s).cos() + w * (w * s).sin()) / d;
    (sin_prim(t) - sin_prim(0.0), cos_prim(t) - cos_prim(0.0))
}

/// `∫_0^t a_ij(s) e^{-α(t-s)} ds` for the six synthetic edges, in the order
/// (1,2), (3,5), (3,4), (2,5), (1,4), (2,3).
fn synthetic_integrals(alpha: f64, t: f64) -> [((usize, usize), f64); 6] {
    let damp = (-alpha * t).exp();
    let w = 2.0 * PI;
    let (s, c) = trig_moments(alpha, w, t);
    let m0 = moment(0, alpha, t);
    let m1 = moment(1, alpha, t);
    let m2 = moment(2, alpha, t);
    let shifted = if alpha + 1.0 == 0.0 {
        t
    } else {
        (((alpha + 1.0) * t).exp() - 1.0) / (alpha + 1.0)
    };
    [
        ((0, 1), damp * 0.5 * (s + m0)),
        ((2, 4), damp * 0.5 * m0),
        ((2, 3), damp * (shifted - m0) / E),
        ((1, 4), damp * m2),
        ((0, 3), damp * 0.5 * (c + m0)),
        ((1, 2), damp * (2.0 * m1 - m2)),
    ]
}

fn criterion_6() -> Outcome {
    let net = paper_synthetic().map_err(|e| e.to_string())?;
    let quad = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for alpha in [-4.0, 0.0, 1.0, 6.0] {
        let kernel = DecayKernel::exponential(alpha);
        for k in 0..21 {
            let t = k as f64 / 20.0;
            let b = accumulated_continuous(&net, &kernel, t, &quad).map_err(|e| e.to_string())?;
            for ((i, j), exact) in synthetic_integrals(alpha, t) {
                for (r, c) in [(i, j), (j, i)] {
                    let err = (b.matrix.get(r, c) - exact).abs();
                    worst = worst.max(err);
                    ensure(err <= QUADRATURE_TOL, || {
                        format!("alpha {alpha}, t {t}, edge ({}, {}): error {err:e}", r + 1, c + 1)
                    })?;
                }
            }
        }
    }
    Ok(format!("504 integrals; worst error {worst:.1e}"))
}

/// Static personalized PageRank by Gauss-Jordan elimination on the dense
/// Google matrix, independent of the library's solvers.
fn static_pagerank(a: &[Vec<f64>], lambda: f64, v: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        let s: f64 = a[i].iter().sum();
        for j in 0..n {
            let p = if s > 0.0 { a[i][j] / s } else { v[j] };
            g[i][j] = lambda * p + (1.0 - lambda) * v[j];
        }
    }
    // Solve (I - Gᵀ) π = 0 with the last equation replaced by Σπ = 1.
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut row: Vec<f64> = (0..n).map(|c| (r == c) as u8 as f64 - g[c][r]).collect();
            row.push(0.0);
            row
        })
        .collect();
    m[n - 1] = vec![1.0; n + 1];
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot = m[col].clone();
                for (x, p) in m[r][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}

fn criterion_7() -> Outcome {
    let mut cases: Vec<(Vec<Vec<f64>>, f64, Vec<f64>)> = vec![(
        vec![vec![0.0, 1.0], vec![1.0, 1.0]],
        0.85,
        vec![0.5, 0.5],
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(0x2b1d);
    for _ in 0..50 {
        let n = rng.gen_range(2..=30);
        let a: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let dangling = rng.gen_bool(0.15);
                (0..n)
                    .map(|_| if !dangling && rng.gen_bool(0.3) { rng.gen_range(0.1..3.0) } else { 0.0 })
                    .collect()
            })
            .collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let s: f64 = v.iter().sum();
        cases.push((a, rng.gen_range(0.05..0.95), v.iter().map(|x| x / s).collect()));
    }
    let mut worst = 0.0f64;
    let mut first = Vec::new();
    for (idx, (a, lambda, v)) in cases.iter().enumerate() {
        let n = a.len();
        let triplets: Vec<_> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0.0)
            .map(|(i, j)| (i, j, a[i][j]))
            .collect();
        let net = DiscreteTemporalNetwork::new(n, vec![3.0], vec![CsrMatrix::from_triplets(n, &triplets).unwrap()])
            .map_err(|e| e.to_string())?;
        let expected = static_pagerank(a, *lambda, v);
        for solver in [SolverConfig::direct(), SolverConfig::power()] {
            let opts = TrajectoryOptions::new(
                DecayKernel::exponential(1.0),
                DampingSchedule::Constant(*lambda),
                PersonalizationSchedule::fixed("v", v.clone()),
            )
            .with_solver(solver);
            let traj = trajectory_discrete(&net, &opts).map_err(|e| e.to_string())?;
            let gap = inf_norm(&traj.scores[0], &expected);
            worst = worst.max(gap);
            ensure(gap <= REDUCTION_TOL, || format!("case {idx} ({solver:?}): differs by {gap:e}"))?;
            if idx == 0 {
                first = traj.scores[0].clone();
            }
        }
    }
    let pi2 = 0.925 / 1.425;
    ensure((first[1] - pi2).abs() <= REDUCTION_TOL && (first[0] - (1.0 - pi2)).abs() <= REDUCTION_TOL, || {
        format!("2-node case gave {first:?}")
    })?;
    Ok(format!(
        "{} networks; worst gap {worst:.1e}; 2-node pi = ({:.6}, {:.6})",
        cases.len(),
        first[0],
        first[1]
    ))
}

fn criterion_8() -> Option<Outcome> {
    let path = std::env::var_os("TEMPORANK_WIKI_EVENTS")?;
    Some((|| {
        let file = std::fs::File::open(&path).map_err(|e| format!("{}: {e}", path.to_string_lossy()))?;
        let opts = ParseOptions {
            lenient: false,
            origin: Origin::First,
        };
        let log = parse_events(std::io::BufReader::new(file), &opts).map_err(|e| e.to_string())?;
        let samples = sample_grid(0.0, 50.0, 21).map_err(|e| e.to_string())?;
        let log = log.until(samples[20] * TimeUnit::Day.seconds());
        let ingested = build_snapshots(&log, &samples, TimeUnit::Day, None, Policy::Clamp).map_err(|e| e.to_string())?;
        ensure(ingested.summary.n == 82168, || format!("n = {}", ingested.summary.n))?;
        let mut trajectories = Vec::new();
        for p in [
            PersonalizationSchedule::Uniform,
            PersonalizationSchedule::Input,
            PersonalizationSchedule::InverseInput,
        ] {
            let opts = TrajectoryOptions::new(DecayKernel::exponential(0.001), DampingSchedule::Constant(0.85), p)
                .with_solver(SolverConfig::power());
            trajectories.push(trajectory_discrete(&ingested.network, &opts).map_err(|e| e.to_string())?);
        }
        let mean = |i: usize, j: usize| -> Result<f64, String> {
            Ok(compare_trajectories(&trajectories[i], &trajectories[j], "")
                .map_err(|e| e.to_string())?
                .mean())
        };
        let (ui, uv, iv) = (mean(0, 1)?, mean(0, 2)?, mean(1, 2)?);
        ensure(ui > uv && ui > iv, || format!("mean tau U/I {ui:.4}, U/II {uv:.4}, I/II {iv:.4}"))?;
        Ok(format!("n = 82168; mean tau U/I {ui:.4} > U/II {uv:.4}, I/II {iv:.4}"))
    })())
}

fn main() {
    let mut failed = 0;
    let mut report = |id: &str, name: &str, started: Instant, outcome: Option<Outcome>| {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Some(Ok(detail)) => println!("PASS  {id} {name} [{secs:.2}s]: {detail}"),
            Some(Err(detail)) => {
                failed += 1;
                println!("FAIL  {id} {name} [{secs:.2}s]: {detail}");
            }
            None => println!("SKIP  {id} {name}: set TEMPORANK_WIKI_EVENTS to the it-wiki event file"),
        }
    };

    let t = Instant::now();
    report("1", "synthetic convergence", t, Some(criterion_1()));
    let t = Instant::now();
    report("2", "half-life", t, Some(criterion_2()));
    let t = Instant::now();
    let (c3, c4) = criteria_3_4();
    report("3", "localization containment", t, Some(c3));
    report("4", "solver/closed-form equivalence", t, Some(c4));
    let t = Instant::now();
    report("5", "kendall oracle equivalence", t, Some(criterion_5()));
    let t = Instant::now();
    report("6", "quadrature vs antiderivative", t, Some(criterion_6()));
    let t = Instant::now();
    report("7", "single-instant reduction", t, Some(criterion_7()));
    let t = Instant::now();
    report("8", "wikipedia study", t, criterion_8());

    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
