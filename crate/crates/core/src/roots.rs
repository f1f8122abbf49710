//! Scalar root finding: safeguarded Newton with a bisection fallback, and
//! plain bisection. These kernels back every implicit solve in the crate
//! (Riemann middle states, steady velocities, sonic radii, interaction
//! times).

use crate::error::{Error, Result};

/// Outcome of a converged solve.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

/// Safeguarded Newton iteration on a bracket [a, b] with f(a) and f(b) of
/// opposite sign. Newton steps are taken while they stay inside the
/// current bracket and shrink |f|; otherwise the step falls back to
/// bisection, so convergence is guaranteed for continuous f.
///
/// Terminates when |f| <= f_tol or the bracket width drops below x_tol.
pub fn newton_bisect<F, D>(
    what: &'static str,
    f: F,
    df: D,
    a: f64,
    b: f64,
    x0: f64,
    f_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    if f_lo.abs() <= f_tol {
        return Ok(Root { x: lo, f: f_lo, iterations: 0 });
    }
    let f_hi = f(hi);
    if f_hi.abs() <= f_tol {
        return Ok(Root { x: hi, f: f_hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { what, lo, hi });
    }

    let mut x = if x0.is_finite() && x0 > lo && x0 < hi {
        x0
    } else {
        0.5 * (lo + hi)
    };
    for it in 0..max_iter {
        let fx = f(x);
        if fx.abs() <= f_tol {
            return Ok(Root { x, f: fx, iterations: it });
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= x_tol {
            return Ok(Root { x: 0.5 * (lo + hi), f: fx, iterations: it });
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence {
        what,
        iterations: max_iter,
        last_x: x,
        last_f: f(x),
    })
}

/// Plain bisection on a bracket with a sign change. Converges to x_tol in
/// the bracket width or |f| <= f_tol, whichever comes first.
pub fn bisect<F>(
    what: &'static str,
    f: F,
    a: f64,
    b: f64,
    f_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let f_lo = f(lo);
    if f_lo.abs() <= f_tol {
        return Ok(Root { x: lo, f: f_lo, iterations: 0 });
    }
    let f_hi = f(hi);
    if f_hi.abs() <= f_tol {
        return Ok(Root { x: hi, f: f_hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { what, lo, hi });
    }
    let neg_lo = f_lo < 0.0;
    for it in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= f_tol || hi - lo <= x_tol {
            return Ok(Root { x: mid, f: fm, iterations: it });
        }
        if (fm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok(Root { x: mid, f: f(mid), iterations: max_iter })
}

/// Expands [x0 - step, x0 + step] geometrically until f changes sign over
/// the interval, then returns the bracket.
pub fn expand_bracket<F>(
    what: &'static str,
    f: &F,
    x0: f64,
    mut step: f64,
    max_doublings: usize,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let f0 = f(x0);
    if f0 == 0.0 {
        return Ok((x0, x0));
    }
    for _ in 0..max_doublings {
        let lo = x0 - step;
        let hi = x0 + step;
        if f(lo).signum() != f0.signum() {
            return Ok((lo, x0));
        }
        if f(hi).signum() != f0.signum() {
            return Ok((x0, hi));
        }
        step *= 2.0;
    }
    Err(Error::NoBracket {
        what,
        lo: x0 - step,
        hi: x0 + step,
    })
}
