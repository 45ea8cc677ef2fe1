//! Adaptive composite Simpson quadrature with interval bisection.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Absolute tolerance on the integral.
    pub tol: f64,
    /// Maximum number of bisections per integral.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_subdivisions: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureError {
    /// The subdivision budget ran out; carries the best estimate so far.
    Exhausted { estimate: f64 },
    /// The integrand produced NaN or an infinite value at `s`.
    NonFinite { s: f64, value: f64 },
}

// Panels are always split at least this many times so that an integrand
// sampled only at its zeros cannot fake convergence.
const MIN_DEPTH: u32 = 4;
const MAX_DEPTH: u32 = 60;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]`.
///
/// Accepted panels are summed left to right so the result does not depend on
/// traversal order.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return match integrate(f, b, a, cfg) {
            Ok(v) => Ok(-v),
            Err(QuadratureError::Exhausted { estimate }) => {
                Err(QuadratureError::Exhausted { estimate: -estimate })
            }
            Err(e) => Err(e),
        };
    }
    let mut eval = |s: f64| -> Result<f64, QuadratureError> {
        let v = f(s);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { s, value: v })
        }
    };
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (eval(a)?, eval(m)?, eval(b)?);
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol: cfg.tol,
        depth: 0,
    }];
    let mut accepted: Vec<(f64, f64)> = Vec::new();
    let mut splits = 0usize;
    let mut exhausted = false;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (eval(lm)?, eval(rm)?);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        let converged = p.depth >= MIN_DEPTH && delta.abs() <= 15.0 * p.tol;
        if converged || exhausted || p.depth >= MAX_DEPTH || m <= p.a || m >= p.b {
            if !converged && !exhausted {
                exhausted = true;
            }
            accepted.push((p.a, left + right + delta / 15.0));
            continue;
        }
        splits += 1;
        if splits > cfg.max_subdivisions {
            exhausted = true;
        }
        let tol = 0.5 * p.tol;
        // Right half pushed first so the left half is processed first.
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol,
            depth: p.depth + 1,
        });
    }
    // Depth-first left-first traversal already yields ascending order.
    debug_assert!(accepted.windows(2).all(|w| w[0].0 <= w[1].0));
    let total = accepted.iter().map(|&(_, v)| v).sum();
    if exhausted {
        Err(QuadratureError::Exhausted { estimate: total })
    } else {
        Ok(total)
    }
}
