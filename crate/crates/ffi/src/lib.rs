//! C ABI over the temporank engine.
//!
//! Every fallible call returns a [`TrStatus`]; on failure the message is
//! available from [`tr_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use temporank::accumulate::{truncate, uniform_partition};
use temporank::format::{load_network, NetworkFile};
use temporank::localization::{bounds_continuous, bounds_discrete};
use temporank::pagerank::{trajectory_continuous, trajectory_discrete, SolverConfig, SolverKind};
use temporank::presets;
use temporank::quadrature::QuadratureConfig;
use temporank::{DampingSchedule, DecayKernel, Error, PageRankTrajectory, PersonalizationSchedule, TrajectoryOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrStatus {
    Ok = 0,
    InvalidInput = 1,
    NotFound = 2,
    Parse = 3,
    ScheduleRange = 4,
    Convergence = 5,
    Integration = 6,
    UndefinedTau = 7,
    Io = 8,
    Internal = 9,
    NullPointer = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrPersonalization {
    Uniform = 0,
    Input = 1,
    InverseInput = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrSolver {
    Auto = 0,
    Direct = 1,
    Power = 2,
}

/// Model and solver settings. Start from [`tr_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TrOptions {
    /// Decay rate of the exponential kernel.
    pub alpha: f64,
    /// Constant damping factor in (0, 1).
    pub damping: f64,
    pub personalization: TrPersonalization,
    pub solver: TrSolver,
    pub tol: f64,
    pub max_iter: usize,
    /// Evaluation grid size for continuous networks.
    pub grid_points: usize,
    /// When non-zero, continuous networks are replaced by their truncation
    /// on this many partition points.
    pub truncate: usize,
}

/// Opaque network handle.
pub struct TrNetwork(NetworkFile);

/// Opaque trajectory handle.
pub struct TrTrajectory(PageRankTrajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &Error) -> TrStatus {
    match err {
        Error::InvalidInput(_) | Error::Dimension { .. } => TrStatus::InvalidInput,
        Error::ScheduleRange(_) => TrStatus::ScheduleRange,
        Error::Convergence { .. } => TrStatus::Convergence,
        Error::Integration { .. } => TrStatus::Integration,
        Error::UndefinedTau(_) => TrStatus::UndefinedTau,
        Error::Parse { .. } | Error::Consistency { .. } => TrStatus::Parse,
        Error::NotFound(_) => TrStatus::NotFound,
        Error::Io(_) => TrStatus::Io,
        Error::Internal(_) => TrStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), TrStatus>) -> TrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TrStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            TrStatus::Panic
        }
    }
}

fn fail(err: Error) -> TrStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> TrStatus {
    set_error(format!("{what} is null"));
    TrStatus::NullPointer
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, TrStatus> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        TrStatus::InvalidInput
    })
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, TrStatus> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), TrStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn tr_options_default() -> TrOptions {
    let solver = SolverConfig::default();
    TrOptions {
        alpha: 1.0,
        damping: 0.85,
        personalization: TrPersonalization::Uniform,
        solver: TrSolver::Auto,
        tol: solver.tol,
        max_iter: solver.max_iter,
        grid_points: 101,
        truncate: 0,
    }
}

/// Loads a network description file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_network_load(path: *const c_char, out: *mut *mut TrNetwork) -> TrStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        let net = load_network(Path::new(path)).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(TrNetwork(net))), "out")
    })
}

/// Builds a named preset such as `paper-synthetic`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_network_preset(name: *const c_char, out: *mut *mut TrNetwork) -> TrStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let net = presets::by_name(name)
            .ok_or_else(|| fail(Error::InvalidInput(format!("unknown preset '{name}'"))))?
            .map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(TrNetwork(NetworkFile::Continuous(net)))), "out")
    })
}

/// # Safety
/// `net` must come from a `tr_network_*` constructor and not be freed yet;
/// null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tr_network_free(net: *mut TrNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_network_node_count(net: *const TrNetwork, out: *mut usize) -> TrStatus {
    guard(|| {
        let n = match &deref(net, "net")?.0 {
            NetworkFile::Discrete(d) => d.node_count(),
            NetworkFile::Continuous(c) => c.node_count(),
        };
        write_out(out, n, "out")
    })
}

/// Writes 1 for a continuous network, 0 for a discrete one.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_network_is_continuous(net: *const TrNetwork, out: *mut i32) -> TrStatus {
    guard(|| {
        let continuous = matches!(deref(net, "net")?.0, NetworkFile::Continuous(_));
        write_out(out, continuous as i32, "out")
    })
}

fn trajectory_options(opts: &TrOptions) -> TrajectoryOptions {
    let personalization = match opts.personalization {
        TrPersonalization::Uniform => PersonalizationSchedule::Uniform,
        TrPersonalization::Input => PersonalizationSchedule::Input,
        TrPersonalization::InverseInput => PersonalizationSchedule::InverseInput,
    };
    let kind = match opts.solver {
        TrSolver::Auto => SolverKind::Auto,
        TrSolver::Direct => SolverKind::Direct,
        TrSolver::Power => SolverKind::Power,
    };
    TrajectoryOptions::new(
        DecayKernel::exponential(opts.alpha),
        DampingSchedule::Constant(opts.damping),
        personalization,
    )
    .with_solver(SolverConfig {
        kind,
        tol: opts.tol,
        max_iter: opts.max_iter,
    })
}

enum Resolved<'a> {
    Discrete(std::borrow::Cow<'a, temporank::DiscreteTemporalNetwork>),
    Continuous(&'a temporank::ContinuousTemporalNetwork, Vec<f64>),
}

fn resolve<'a>(net: &'a NetworkFile, opts: &TrOptions) -> Result<Resolved<'a>, TrStatus> {
    Ok(match net {
        NetworkFile::Discrete(d) => Resolved::Discrete(std::borrow::Cow::Borrowed(d)),
        NetworkFile::Continuous(c) if opts.truncate > 0 => {
            Resolved::Discrete(std::borrow::Cow::Owned(truncate(c, opts.truncate).map_err(fail)?))
        }
        NetworkFile::Continuous(c) => {
            if opts.grid_points == 0 {
                return Err(fail(Error::InvalidInput("grid_points must be positive".into())));
            }
            let (a, b) = c.interval();
            Resolved::Continuous(c, uniform_partition(a, b, opts.grid_points))
        }
    })
}

/// Computes the PageRank trajectory of `net`.
///
/// # Safety
/// `net` and `opts` must be valid pointers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_trajectory_compute(
    net: *const TrNetwork,
    opts: *const TrOptions,
    out: *mut *mut TrTrajectory,
) -> TrStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let opts = deref(opts, "opts")?;
        let topts = trajectory_options(opts);
        let traj = match resolve(&net.0, opts)? {
            Resolved::Discrete(d) => trajectory_discrete(&d, &topts),
            Resolved::Continuous(c, grid) => trajectory_continuous(c, &topts, &grid, &QuadratureConfig::default()),
        }
        .map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(TrTrajectory(traj))), "out")
    })
}

/// # Safety
/// `traj` must come from [`tr_trajectory_compute`] and not be freed yet;
/// null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tr_trajectory_free(traj: *mut TrTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of instants in the trajectory.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_trajectory_len(traj: *const TrTrajectory, out: *mut usize) -> TrStatus {
    guard(|| write_out(out, deref(traj, "traj")?.0.len(), "out"))
}

/// Number of nodes per score vector.
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_trajectory_node_count(traj: *const TrTrajectory, out: *mut usize) -> TrStatus {
    guard(|| write_out(out, deref(traj, "traj")?.0.node_count(), "out"))
}

fn instant_index(traj: &PageRankTrajectory, k: usize) -> Result<(), TrStatus> {
    if k >= traj.len() {
        return Err(fail(Error::InvalidInput(format!(
            "instant index {k} outside 0..{}",
            traj.len()
        ))));
    }
    Ok(())
}

/// Time of instant `k` (0-based).
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_trajectory_instant(traj: *const TrTrajectory, k: usize, out: *mut f64) -> TrStatus {
    guard(|| {
        let traj = &deref(traj, "traj")?.0;
        instant_index(traj, k)?;
        write_out(out, traj.instants[k], "out")
    })
}

/// Copies the scores at instant `k` into `buf`, which must hold at least
/// the node count.
///
/// # Safety
/// `traj` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tr_trajectory_scores(
    traj: *const TrTrajectory,
    k: usize,
    buf: *mut f64,
    len: usize,
) -> TrStatus {
    guard(|| {
        let traj = &deref(traj, "traj")?.0;
        instant_index(traj, k)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let scores = &traj.scores[k];
        if len < scores.len() {
            return Err(fail(Error::Dimension {
                expected: scores.len(),
                found: len,
            }));
        }
        std::ptr::copy_nonoverlapping(scores.as_ptr(), buf, scores.len());
        Ok(())
    })
}

/// Localization interval of `node` (0-based) at instant `k`, under the
/// model in `opts`. Personalization does not affect the bounds.
///
/// # Safety
/// `net` and `opts` must be valid pointers; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_bounds(
    net: *const TrNetwork,
    opts: *const TrOptions,
    k: usize,
    node: usize,
    lo: *mut f64,
    hi: *mut f64,
) -> TrStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let opts = deref(opts, "opts")?;
        let topts = trajectory_options(opts);
        let nodes = [node];
        let bounds = match resolve(&net.0, opts)? {
            Resolved::Discrete(d) => {
                if k >= d.len() {
                    return Err(fail(Error::InvalidInput(format!("instant index {k} outside 0..{}", d.len()))));
                }
                bounds_discrete(&d, &topts, Some(&nodes))
            }
            Resolved::Continuous(c, grid) => {
                let t = *grid
                    .get(k)
                    .ok_or_else(|| fail(Error::InvalidInput(format!("instant index {k} outside 0..{}", grid.len()))))?;
                bounds_continuous(c, &topts, &[t], &QuadratureConfig::default(), Some(&nodes))
            }
        }
        .map_err(fail)?;
        let b = match &bounds.bounds[..] {
            [only] => only[0],
            all => all[k][0],
        };
        write_out(lo, b.lo, "lo")?;
        write_out(hi, b.hi, "hi")
    })
}

/// Kendall tau-b of two score vectors of length `len`.
///
/// # Safety
/// `x` and `y` must each point to `len` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tr_kendall_tau(x: *const f64, y: *const f64, len: usize, out: *mut f64) -> TrStatus {
    guard(|| {
        if x.is_null() {
            return Err(null("x"));
        }
        if y.is_null() {
            return Err(null("y"));
        }
        let xs = std::slice::from_raw_parts(x, len);
        let ys = std::slice::from_raw_parts(y, len);
        let tau = temporank::kendall_tau(xs, ys).map_err(fail)?;
        write_out(out, tau, "out")
    })
}
