//! Command-line front end.
//!
//! Settings resolve in the order flag, then `TEMPORANK_THREADS` (threads
//! only), then config file, then built-in default.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::accumulate::{truncate, uniform_partition};
use crate::config::RunConfig;
use crate::converge::convergence_study;
use crate::error::{Error, Result};
use crate::format::{write_discrete, NetworkFile};
use crate::ingest::{
    build_snapshots, parse_events, parse_initial, sample_grid, Origin, ParseOptions, Policy, TimeUnit,
};
use crate::localization::{bounds_for_problems, ColumnMethod, LocalizationBounds};
use crate::network::{PersonalizationSchedule, Validation};
use crate::output::{bounds_csv, provenance_line, tau_csv, write_trajectory, Format};
use crate::pagerank::{
    continuous_problems, discrete_problems, InstantProblem, PageRankTrajectory, SolverKind,
    TrajectoryOptions,
};
use crate::rank::{compare_trajectories, TauSeries};

#[derive(Debug, Parser)]
#[command(name = "temporank", version, about = "Personalized PageRank of temporal networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a PageRank trajectory.
    Compute(ComputeArgs),
    /// Compare truncations of a continuous network with its continuous PageRank.
    Converge(ConvergeArgs),
    /// Per-node localization bounds.
    Localize(LocalizeArgs),
    /// Kendall tau-b series between two trajectories.
    Compare(CompareArgs),
    /// Build a discrete network from a KONECT edge-event file.
    Ingest(IngestArgs),
    /// Check a network file for invariant violations.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Config file (sectioned key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Network description file.
    #[arg(long, conflicts_with = "preset")]
    pub network: Option<PathBuf>,
    /// Built-in network, e.g. paper-synthetic.
    #[arg(long)]
    pub preset: Option<String>,
    /// Decay rate of the exponential kernel, per time unit; may be negative.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Damping: a constant like 0.85 or linear:START:END.
    #[arg(long)]
    pub damping: Option<String>,
    /// uniform | input | inverse-input | file:PATH
    #[arg(long)]
    pub personalization: Option<String>,
    /// Dangling distribution: same (as personalization) or a personalization spec.
    #[arg(long)]
    pub dangling: Option<String>,
    /// auto | direct | power
    #[arg(long)]
    pub solver: Option<SolverKind>,
    /// Power-iteration tolerance (1-norm of successive differences).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Grid size for continuous networks.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Solve the truncation with this many partition points instead.
    #[arg(long)]
    pub truncate: Option<usize>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    #[arg(long)]
    pub quad_max_subdiv: Option<usize>,
    /// csv | json
    #[arg(long)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Omit the provenance comment line.
    #[arg(long)]
    pub no_header: bool,
    #[arg(long, env = "TEMPORANK_THREADS")]
    pub threads: Option<usize>,
    /// Write the resolved configuration to this file.
    #[arg(long)]
    pub dump_config: Option<PathBuf>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.network {
            cfg.network.file = Some(p.clone());
            cfg.network.preset = None;
        }
        if let Some(p) = &self.preset {
            cfg.network.preset = Some(p.clone());
            cfg.network.file = None;
        }
        macro_rules! set {
            ($flag:expr, $field:expr) => {
                if let Some(v) = &$flag {
                    $field = v.clone();
                }
            };
        }
        set!(self.alpha, cfg.model.alpha);
        set!(self.damping, cfg.model.damping);
        set!(self.personalization, cfg.model.personalization);
        set!(self.dangling, cfg.model.dangling);
        set!(self.solver, cfg.solver.kind);
        set!(self.tol, cfg.solver.tol);
        set!(self.max_iter, cfg.solver.max_iter);
        set!(self.grid_points, cfg.grid.points);
        set!(self.truncate, cfg.grid.truncate);
        set!(self.quad_tol, cfg.quadrature.tol);
        set!(self.quad_max_subdiv, cfg.quadrature.max_subdivisions);
        set!(self.format, cfg.output.format);
        set!(self.threads, cfg.threads);
        if let Some(p) = &self.output {
            cfg.output.path = Some(p.clone());
        }
        if self.no_header {
            cfg.output.header = false;
        }
        cfg.validate()?;
        if let Some(path) = &self.dump_config {
            std::fs::write(path, cfg.to_toml()?)?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Partition sizes to compare.
    #[arg(long, value_delimiter = ',', default_value = "5,9,101")]
    pub sizes: Vec<usize>,
    /// Per-node error curves as CSV.
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// 1-based node list, or "all".
    #[arg(long, default_value = "all")]
    pub nodes: String,
    /// 1-based instant indices, or "all".
    #[arg(long, default_value = "all")]
    pub instants: String,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Config for the second trajectory; defaults to the first one's.
    #[arg(long)]
    pub b_config: Option<PathBuf>,
    #[arg(long)]
    pub b_personalization: Option<String>,
    #[arg(long)]
    pub b_damping: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_alpha: Option<f64>,
    /// Compare uniform, input and inverse-input pairwise instead.
    #[arg(long)]
    pub standard_pairs: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// KONECT out.* file: `src dst ±1 timestamp` lines.
    #[arg(long)]
    pub events: PathBuf,
    /// Sample grid as start,step,count in --unit.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub grid: Vec<f64>,
    #[arg(long, default_value = "strict")]
    pub policy: Policy,
    #[arg(long, default_value = "day")]
    pub unit: TimeUnit,
    /// zero | first | absolute seconds.
    #[arg(long, default_value = "first", allow_hyphen_values = true)]
    pub origin: Origin,
    /// Baseline adjacency: `src dst [weight]` lines in dataset ids.
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// Skip lines whose delta is not ±1.
    #[arg(long)]
    pub lenient: bool,
    /// Keep nodes that only appear after the last sample instant.
    #[arg(long)]
    pub keep_all_nodes: bool,
    /// Network description output; not written when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Summary JSON output; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub network: PathBuf,
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotFound(_) => 2,
        _ => 1,
    }
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if threads == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?
        .install(f)
}

/// Per-instant problems for the configured network and time grid.
fn problems(cfg: &RunConfig, opts: &TrajectoryOptions) -> Result<Vec<InstantProblem>> {
    match cfg.load_network()? {
        NetworkFile::Discrete(net) => discrete_problems(&net, opts),
        NetworkFile::Continuous(net) if cfg.grid.truncate > 0 => {
            discrete_problems(&truncate(&net, cfg.grid.truncate)?, opts)
        }
        NetworkFile::Continuous(net) => {
            let (a, b) = net.interval();
            if cfg.grid.points == 0 {
                return Err(Error::invalid("grid needs at least one point"));
            }
            let grid = uniform_partition(a, b, cfg.grid.points);
            continuous_problems(&net, opts, &grid, &cfg.quadrature)
        }
    }
}

fn solve(problems: &[InstantProblem], opts: &TrajectoryOptions) -> Result<PageRankTrajectory> {
    use rayon::prelude::*;
    let solutions = problems
        .par_iter()
        .map(|p| p.solve(&opts.solver))
        .collect::<Result<Vec<_>>>()?;
    Ok(PageRankTrajectory {
        instants: problems.iter().map(|p| p.snapshot.instant).collect(),
        diagnostics: problems
            .iter()
            .zip(&solutions)
            .map(|(p, s)| crate::pagerank::InstantDiagnostics {
                damping: p.damping,
                iterations: s.iterations,
                residual: s.residual,
                dangling_nodes: p.snapshot.dangling_count(),
            })
            .collect(),
        scores: solutions.into_iter().map(|s| s.scores).collect(),
        metadata: crate::pagerank::TrajectoryMetadata {
            kernel: opts.kernel.to_string(),
            damping: opts.damping.to_string(),
            personalization: opts.personalization.to_string(),
            dangling: opts.dangling.as_ref().unwrap_or(&opts.personalization).to_string(),
            solver: opts.solver,
        },
    })
}

pub fn compute(cfg: &RunConfig) -> Result<PageRankTrajectory> {
    let opts = cfg.trajectory_options()?;
    with_threads(cfg.threads, || solve(&problems(cfg, &opts)?, &opts))
}

fn cmd_compute(args: &ComputeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = args.run.resolve()?;
    let traj = compute(&cfg)?;
    let text = write_trajectory(&traj, cfg.output.format, cfg.output.header)?;
    emit(cfg.output.path.as_deref(), &text, stdout)?;
    let max_residual = traj.diagnostics.iter().map(|d| d.residual).fold(0.0, f64::max);
    let iterations: usize = traj.diagnostics.iter().map(|d| d.iterations).sum();
    writeln!(
        stderr,
        "instants: {}  nodes: {}  solver: {}  iterations: {}  max residual: {:e}",
        traj.len(),
        traj.node_count(),
        cfg.solver.resolve(traj.node_count()),
        iterations,
        max_residual
    )?;
    Ok(())
}

fn cmd_converge(args: &ConvergeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = args.run.resolve()?;
    let NetworkFile::Continuous(net) = cfg.load_network()? else {
        return Err(Error::invalid("converge needs a continuous network"));
    };
    let opts = cfg.trajectory_options()?;
    let (a, b) = net.interval();
    let grid = uniform_partition(a, b, cfg.grid.points.max(2));
    let report = with_threads(cfg.threads, || {
        convergence_study(&net, &opts, &args.sizes, &grid, &cfg.quadrature)
    })?;

    let mut table = if cfg.output.header { provenance_line() } else { String::new() };
    table.push_str("partition_size,max_abs_error,max_abs_error_at_partition\n");
    for p in &report.partitions {
        table.push_str(&format!(
            "{},{:?},{:?}\n",
            p.partition_size, p.max_abs_error, p.max_abs_error_at_partition
        ));
    }
    emit(cfg.output.path.as_deref(), &table, stdout)?;

    if let Some(path) = &args.curves {
        let mut curves = String::from("partition_size,instant,node,error\n");
        for p in &report.partitions {
            for (t, errs) in report.grid.iter().zip(&p.node_errors) {
                for (i, e) in errs.iter().enumerate() {
                    curves.push_str(&format!("{},{t:?},{},{e:?}\n", p.partition_size, i + 1));
                }
            }
        }
        std::fs::write(path, curves)?;
    }
    let errors = report.max_errors();
    if errors.windows(2).any(|w| w[1] >= w[0]) {
        writeln!(stderr, "warning: errors are not decreasing in the partition size")?;
    }
    Ok(())
}

fn parse_index_list(spec: &str, limit: usize, what: &str) -> Result<Option<Vec<usize>>> {
    if spec == "all" {
        return Ok(None);
    }
    spec.split(',')
        .map(|s| {
            let k: usize = s
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad {what} '{s}'")))?;
            if k == 0 || k > limit {
                return Err(Error::invalid(format!("{what} {k} outside 1..{limit}")));
            }
            Ok(k - 1)
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

pub fn localize(cfg: &RunConfig, nodes: &str, instants: &str) -> Result<(LocalizationBounds, PageRankTrajectory)> {
    let opts = cfg.trajectory_options()?;
    with_threads(cfg.threads, || {
        let all = problems(cfg, &opts)?;
        let picked: Vec<InstantProblem> = match parse_index_list(instants, all.len(), "instant")? {
            None => all,
            Some(idx) => idx.into_iter().map(|k| all[k].clone()).collect(),
        };
        let n = picked.first().map_or(0, |p| p.snapshot.dim());
        let node_list = parse_index_list(nodes, n, "node")?;
        let bounds = bounds_for_problems(&picked, node_list.as_deref(), ColumnMethod::default())?;
        let traj = solve(&picked, &opts)?;
        Ok((bounds, traj))
    })
}

/// Slack allowed when re-checking that scores lie inside their bounds.
const CONTAINMENT_SLACK: f64 = 1e-12;

fn cmd_localize(args: &LocalizeArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = args.run.resolve()?;
    let (bounds, traj) = localize(&cfg, &args.nodes, &args.instants)?;
    for (k, row) in bounds.bounds.iter().enumerate() {
        for b in row {
            let score = traj.scores[k][b.node];
            if !b.contains(score, CONTAINMENT_SLACK) {
                return Err(Error::Internal(format!(
                    "node {} at t = {}: score {score} outside [{}, {}]",
                    b.node + 1,
                    bounds.instants[k],
                    b.lo,
                    b.hi
                )));
            }
        }
    }
    emit(cfg.output.path.as_deref(), &bounds_csv(&bounds, cfg.output.header), stdout)
}

fn short_label(p: &PersonalizationSchedule) -> String {
    match p {
        PersonalizationSchedule::Uniform => "Uniform".into(),
        PersonalizationSchedule::Input => "Input".into(),
        PersonalizationSchedule::InverseInput => "Inverse-Input".into(),
        other => other.to_string(),
    }
}

pub fn compare(args: &CompareArgs) -> Result<Vec<TauSeries>> {
    let cfg_a = args.run.resolve()?;
    let opts_a = cfg_a.trajectory_options()?;
    with_threads(cfg_a.threads, || {
        let shared = problems(&cfg_a, &opts_a)?;
        if args.standard_pairs {
            let mut trajectories = Vec::new();
            for p in [
                PersonalizationSchedule::Uniform,
                PersonalizationSchedule::Input,
                PersonalizationSchedule::InverseInput,
            ] {
                let mut opts = opts_a.clone();
                opts.personalization = p;
                trajectories.push(solve(&problems(&cfg_a, &opts)?, &opts)?);
            }
            let label = |k: usize| short_label(&[
                PersonalizationSchedule::Uniform,
                PersonalizationSchedule::Input,
                PersonalizationSchedule::InverseInput,
            ][k]);
            return [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(i, j)| {
                    compare_trajectories(
                        &trajectories[i],
                        &trajectories[j],
                        format!("{} vs {}", label(i), label(j)),
                    )
                })
                .collect();
        }
        let mut cfg_b = match &args.b_config {
            Some(path) => {
                let mut c = RunConfig::load(path)?;
                c.network = cfg_a.network.clone();
                c
            }
            None => cfg_a.clone(),
        };
        if let Some(v) = &args.b_personalization {
            cfg_b.model.personalization = v.clone();
        }
        if let Some(v) = &args.b_damping {
            cfg_b.model.damping = v.clone();
        }
        if let Some(v) = args.b_alpha {
            cfg_b.model.alpha = v;
        }
        let opts_b = cfg_b.trajectory_options()?;
        let a = solve(&shared, &opts_a)?;
        let b = solve(&problems(&cfg_b, &opts_b)?, &opts_b)?;
        let label = format!(
            "{}/{} vs {}/{}",
            short_label(&opts_a.personalization),
            opts_a.damping,
            short_label(&opts_b.personalization),
            opts_b.damping
        );
        Ok(vec![compare_trajectories(&a, &b, label)?])
    })
}

fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = args.run.resolve()?;
    let series = compare(args)?;
    for s in &series {
        writeln!(stderr, "{}: mean tau {:.6}", s.label, s.mean())?;
    }
    emit(cfg.output.path.as_deref(), &tau_csv(&series, cfg.output.header), stdout)
}

fn cmd_ingest(args: &IngestArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    if args.grid.len() != 3 {
        return Err(Error::invalid("--grid takes start,step,count"));
    }
    let count = args.grid[2];
    if !(count >= 1.0 && count.fract() == 0.0) {
        return Err(Error::invalid(format!("grid count {count} must be a positive integer")));
    }
    let samples = sample_grid(args.grid[0], args.grid[1], count as usize)?;
    if !args.events.exists() {
        return Err(Error::NotFound(args.events.clone()));
    }
    let file = std::io::BufReader::new(std::fs::File::open(&args.events)?);
    let opts = ParseOptions {
        lenient: args.lenient,
        origin: args.origin,
    };
    let mut log = parse_events(file, &opts)?;
    if !args.keep_all_nodes {
        let last = samples.last().copied().unwrap_or_default() * args.unit.seconds();
        log = log.until(last);
    }
    let initial = match &args.initial {
        Some(path) => {
            let edges = parse_initial(std::io::BufReader::new(std::fs::File::open(path)?))?;
            let (l, m) = log.attach_initial(&edges)?;
            log = l;
            Some(m)
        }
        None => None,
    };
    let ingested = build_snapshots(&log, &samples, args.unit, initial.as_ref(), args.policy)?;
    for w in &ingested.summary.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    if let Some(path) = &args.output {
        let mut text = String::new();
        text.push_str(&format!(
            "# ingested from {} ({} nodes, instants in {:?}s)\n",
            args.events.display(),
            ingested.summary.n,
            args.unit
        ));
        text.push_str(&write_discrete(&ingested.network));
        std::fs::write(path, text)?;
        let map: String = log
            .node_ids
            .iter()
            .enumerate()
            .map(|(i, id)| format!("{} {id}\n", i + 1))
            .collect();
        std::fs::write(path.with_extension("nodes"), map)?;
    }
    let json = serde_json::to_string_pretty(&ingested.summary).map_err(|e| Error::Internal(e.to_string()))?;
    emit(args.summary.as_deref(), &(json + "\n"), stdout)
}

fn cmd_validate(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<bool> {
    if !args.network.exists() {
        return Err(Error::NotFound(args.network.clone()));
    }
    let text = std::fs::read_to_string(&args.network)?;
    // Parse without the constructor checks so every violation is listed.
    let verdict = match crate::format::parse_network(&text) {
        Ok(_) => Validation::Ok,
        Err(Error::InvalidInput(msg)) => Validation::Violations(msg.split("; ").map(String::from).collect()),
        Err(e) => return Err(e),
    };
    match &verdict {
        Validation::Ok => writeln!(stdout, "ok")?,
        Validation::Violations(list) => {
            for v in list {
                writeln!(stdout, "violation: {v}")?;
            }
        }
    }
    Ok(verdict.is_ok())
}

/// Runs a parsed command; returns the process exit status.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a, stdout, stderr).map(|_| 0),
        Command::Converge(a) => cmd_converge(a, stdout, stderr).map(|_| 0),
        Command::Localize(a) => cmd_localize(a, stdout).map(|_| 0),
        Command::Compare(a) => cmd_compare(a, stdout, stderr).map(|_| 0),
        Command::Ingest(a) => cmd_ingest(a, stdout, stderr).map(|_| 0),
        Command::Validate(a) => cmd_validate(a, stdout).map(|ok| if ok { 0 } else { 1 }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
