//! Elementary waves and the exact solver for the standard (homogeneous)
//! Riemann problem.
//!
//! Curve conventions, with anchor `U_L` for family 1 and `U_R` for
//! family 2:
//!
//! ```text
//!   R1(U_L): v - v_L = -k ln(rho/rho_L)        (w constant)
//!   S1(U_L): v - v_L = -k (sqrt(rho/rho_L) - sqrt(rho_L/rho)),
//!            sigma_1 = v - k sqrt(rho_L/rho)
//!   R2(U_R): v - v_R = +k ln(rho/rho_R)        (z constant)
//!   S2(U_R): v - v_R = +k (sqrt(rho/rho_R) - sqrt(rho_R/rho)),
//!            sigma_2 = v + k sqrt(rho_R/rho)
//! ```
//!
//! The curve evaluators are total on rho > 0 and do not enforce
//! admissibility; only [`solve_riemann`] selects entropic branches. The
//! Lax inequalities single out the compressive halves: a 1-wave is a
//! shock iff rho_M > rho_L (equivalently v_M < v_L), a 2-wave is a shock
//! iff rho_M > rho_R (equivalently v_M > v_R).

use crate::error::{Error, Result};
use crate::model::{FluidState, ModelParams};
use crate::roots;
use crate::tol;

/// Wave family of the 2x2 system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveFamily {
    One,
    Two,
}

/// Classification tag of an elementary wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Null,
}

/// Geometry of one wave in self-similar coordinates xi = (r - r0)/t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveShape {
    /// Zero-strength wave; `xi` is the characteristic speed it rides.
    Null { xi: f64 },
    Shock { sigma: f64 },
    Rarefaction { xi_left: f64, xi_right: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveDescriptor {
    pub family: WaveFamily,
    pub shape: WaveShape,
}

impl WaveDescriptor {
    pub fn kind(&self) -> WaveKind {
        match self.shape {
            WaveShape::Null { .. } => WaveKind::Null,
            WaveShape::Shock { .. } => WaveKind::Shock,
            WaveShape::Rarefaction { .. } => WaveKind::Rarefaction,
        }
    }

    /// Slowest and fastest self-similar speed carried by the wave.
    pub fn speed_range(&self) -> (f64, f64) {
        match self.shape {
            WaveShape::Null { xi } => (xi, xi),
            WaveShape::Shock { sigma } => (sigma, sigma),
            WaveShape::Rarefaction { xi_left, xi_right } => (xi_left, xi_right),
        }
    }
}

/// Self-similar solution of the standard Riemann problem: three states
/// joined by a 1-wave and a 2-wave with non-overlapping speed ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFan {
    pub left: FluidState,
    pub middle: FluidState,
    pub right: FluidState,
    pub wave1: WaveDescriptor,
    pub wave2: WaveDescriptor,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::NonPositiveDensity { rho });
    }
    Ok(())
}

/// Point of the 1-rarefaction curve through `anchor` at density `rho`.
pub fn rarefaction1(rho: f64, anchor: FluidState, p: &ModelParams) -> Result<FluidState> {
    check_rho(rho)?;
    Ok(FluidState::new(rho, anchor.v - p.k() * (rho / anchor.rho).ln()))
}

/// Point of the 2-rarefaction curve through `anchor` at density `rho`.
pub fn rarefaction2(rho: f64, anchor: FluidState, p: &ModelParams) -> Result<FluidState> {
    check_rho(rho)?;
    Ok(FluidState::new(rho, anchor.v + p.k() * (rho / anchor.rho).ln()))
}

/// Point of the 1-shock Hugoniot through `anchor` at density `rho`, and
/// the associated shock speed sigma_1.
pub fn shock1(rho: f64, anchor: FluidState, p: &ModelParams) -> Result<(FluidState, f64)> {
    check_rho(rho)?;
    let q = (rho / anchor.rho).sqrt();
    let v = anchor.v - p.k() * (q - 1.0 / q);
    let sigma = v - p.k() / q;
    Ok((FluidState::new(rho, v), sigma))
}

/// Point of the 2-shock Hugoniot through `anchor` at density `rho`, and
/// the associated shock speed sigma_2.
pub fn shock2(rho: f64, anchor: FluidState, p: &ModelParams) -> Result<(FluidState, f64)> {
    check_rho(rho)?;
    let q = (rho / anchor.rho).sqrt();
    let v = anchor.v + p.k() * (q - 1.0 / q);
    let sigma = v + p.k() / q;
    Ok((FluidState::new(rho, v), sigma))
}

/// Normalized Rankine-Hugoniot residual of a discontinuity between `a`
/// (left) and `b` (right) moving at speed `sigma`: the larger of the two
/// jump-condition defects, each scaled by the magnitude of its terms.
pub fn rh_residual(a: FluidState, b: FluidState, sigma: f64, p: &ModelParams) -> f64 {
    let fa = crate::model::flux(a, p);
    let fb = crate::model::flux(b, p);
    let r1 = sigma * (b.rho - a.rho) - (fb[0] - fa[0]);
    let r2 = sigma * (fb[0] - fa[0]) - (fb[1] - fa[1]);
    let s1 = (sigma * b.rho)
        .abs()
        .max((sigma * a.rho).abs())
        .max(fb[0].abs())
        .max(fa[0].abs())
        .max(f64::MIN_POSITIVE);
    let s2 = (sigma * fb[0])
        .abs()
        .max((sigma * fa[0]).abs())
        .max(fb[1].abs())
        .max(fa[1].abs())
        .max(f64::MIN_POSITIVE);
    (r1 / s1).abs().max((r2 / s2).abs())
}

/// Branch selector for [`phi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiBranch {
    Plus,
    Minus,
}

/// Phi_pm(gamma) = 1 + gamma (1 pm sqrt(1 + 2/gamma)), continuously
/// extended by Phi_pm(0) = 1. The two branches satisfy
/// Phi_plus * Phi_minus = 1 and parametrize the shock increments of the
/// Riemann invariants, see [`shock_invariant_deltas`].
///
/// The minus branch is evaluated in the cancellation-free form
/// (2/gamma) / (1 + sqrt(1 + 2/gamma))^2.
pub fn phi(gamma: f64, branch: PhiBranch) -> Result<f64> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter { name: "gamma", value: gamma });
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    Ok(match branch {
        PhiBranch::Plus => 1.0 + gamma + (gamma * gamma + 2.0 * gamma).sqrt(),
        PhiBranch::Minus => {
            let s = (1.0 + 2.0 / gamma).sqrt();
            (2.0 / gamma) / ((1.0 + s) * (1.0 + s))
        }
    })
}

/// Increments (w - w_0, z - z_0) along the full shock Hugoniot of the
/// given family through an anchor, parametrized by
/// gamma = (v - v_0)^2 / (2 k^2):
///
/// ```text
///   family 1: (dw, dz) = (-k sqrt(2 gamma) + k ln Phi_plus,
///                         -k sqrt(2 gamma) - k ln Phi_plus)
///   family 2: (dw, dz) = (-k sqrt(2 gamma) + k ln Phi_minus,
///                         -k sqrt(2 gamma) - k ln Phi_minus)
/// ```
///
/// The two loci are mirror images across the diagonal through the anchor:
/// dw_1(gamma) = dz_2(gamma) and dz_1(gamma) = dw_2(gamma).
pub fn shock_invariant_deltas(
    family: WaveFamily,
    gamma: f64,
    p: &ModelParams,
) -> Result<(f64, f64)> {
    let branch = match family {
        WaveFamily::One => PhiBranch::Plus,
        WaveFamily::Two => PhiBranch::Minus,
    };
    let k = p.k();
    let ph = phi(gamma, branch)?;
    let root = k * (2.0 * gamma).sqrt();
    Ok((-root + k * ph.ln(), -root - k * ph.ln()))
}

/// Velocity reachable from `anchor` along the composite 1-wave curve at
/// log-density `x = ln rho`: shock branch for rho >= rho_anchor,
/// rarefaction branch below.
fn composite1_v(x: f64, ln_anchor: f64, v_anchor: f64, k: f64) -> f64 {
    let d = x - ln_anchor;
    if d >= 0.0 {
        v_anchor - 2.0 * k * (0.5 * d).sinh()
    } else {
        v_anchor - k * d
    }
}

fn composite1_dv(x: f64, ln_anchor: f64, k: f64) -> f64 {
    let d = x - ln_anchor;
    if d >= 0.0 {
        -k * (0.5 * d).cosh()
    } else {
        -k
    }
}

fn composite2_v(x: f64, ln_anchor: f64, v_anchor: f64, k: f64) -> f64 {
    let d = x - ln_anchor;
    if d >= 0.0 {
        v_anchor + 2.0 * k * (0.5 * d).sinh()
    } else {
        v_anchor + k * d
    }
}

fn composite2_dv(x: f64, ln_anchor: f64, k: f64) -> f64 {
    let d = x - ln_anchor;
    if d >= 0.0 {
        k * (0.5 * d).cosh()
    } else {
        k
    }
}

/// Exact entropic solution of the standard Riemann problem with constant
/// data (`left`, `right`).
///
/// The middle state is the unique intersection of the composite wave
/// curves; it is found by a safeguarded Newton/bisection solve on
/// x = ln rho_M of the strictly decreasing velocity mismatch
/// v1(x) - v2(x) (the slope lemma in the (w, z) plane makes the mismatch
/// monotone with |d/dx| >= 2k, so bracketing always succeeds).
///
/// ```
/// use wbeuler::model::{FluidState, ModelParams};
/// use wbeuler::waves::{sample_fan, solve_riemann, WaveKind};
///
/// let p = ModelParams::new(1.0, 1.0).unwrap();
/// // symmetric inflow compresses into two shocks around a static core
/// let fan = solve_riemann(
///     FluidState::new(1.0, 1.0),
///     FluidState::new(1.0, -1.0),
///     &p,
/// ).unwrap();
/// assert_eq!(fan.wave1.kind(), WaveKind::Shock);
/// assert!(fan.middle.v.abs() < 1e-12 && fan.middle.rho > 2.6);
/// // the self-similar profile is sampled at xi = (r - r0) / t
/// let far_left = sample_fan(&fan, -10.0, &p);
/// assert_eq!(far_left, fan.left);
/// ```
pub fn solve_riemann(left: FluidState, right: FluidState, p: &ModelParams) -> Result<WaveFan> {
    solve_riemann_with_guess(left, right, p, f64::NAN)
}

/// [`solve_riemann`] with an explicit initial guess for ln rho_M; used to
/// check that the solve is insensitive to its starting point.
pub fn solve_riemann_with_guess(
    left: FluidState,
    right: FluidState,
    p: &ModelParams,
    guess_ln_rho: f64,
) -> Result<WaveFan> {
    check_rho(left.rho)?;
    check_rho(right.rho)?;
    let k = p.k();
    let ln_l = left.rho.ln();
    let ln_r = right.rho.ln();

    let scale = 1.0_f64
        .max(left.v.abs())
        .max(right.v.abs())
        .max(k * ln_l.abs())
        .max(k * ln_r.abs());
    let f_tol = tol::RIEMANN * scale;

    let mismatch = |x: f64| {
        composite1_v(x, ln_l, left.v, k) - composite2_v(x, ln_r, right.v, k)
    };
    let mismatch_d = |x: f64| composite1_dv(x, ln_l, k) - composite2_dv(x, ln_r, k);

    // The mismatch decreases strictly from +inf to -inf; expand the
    // initial bracket around the anchors until it straddles zero.
    let mut lo = ln_l.min(ln_r);
    let mut hi = ln_l.max(ln_r);
    let mut step = 1.0 + (left.v - right.v).abs() / k;
    let mut guard = 0;
    while mismatch(lo) < 0.0 {
        lo -= step;
        step *= 2.0;
        guard += 1;
        if guard > 100 {
            return Err(Error::NoBracket { what: "riemann middle state", lo, hi });
        }
    }
    step = 1.0 + (left.v - right.v).abs() / k;
    while mismatch(hi) > 0.0 {
        hi += step;
        step *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NoBracket { what: "riemann middle state", lo, hi });
        }
    }

    let root = roots::newton_bisect(
        "riemann middle state",
        mismatch,
        mismatch_d,
        lo,
        hi,
        guess_ln_rho,
        f_tol,
        0.0,
        tol::MAX_ITER,
    )?;

    let x = root.x;
    let mut rho_m = x.exp().max(f64::MIN_POSITIVE);
    let mut v_m = 0.5 * (composite1_v(x, ln_l, left.v, k) + composite2_v(x, ln_r, right.v, k));

    // Zero-strength snap: below the null band (the stated tolerance,
    // widened by the solver's own noise floor) a wave collapses to a
    // characteristic and the middle state snaps onto the side state, so
    // pure one-wave data reproduces its other side bit-exactly.
    let null_band = tol::NULL_WAVE.max(f_tol / k);
    let is_null = |d: f64, v_side: f64| {
        d.abs() <= null_band && (v_m - v_side).abs() <= null_band * k.max(1.0)
    };
    if is_null(x - ln_l, left.v) {
        rho_m = left.rho;
        v_m = left.v;
    } else if is_null(x - ln_r, right.v) {
        rho_m = right.rho;
        v_m = right.v;
    }
    let middle = FluidState::new(rho_m, v_m);
    let x = rho_m.ln();

    let d_l = x - ln_l;
    let wave1 = if d_l.abs() <= null_band && (v_m - left.v).abs() <= null_band * k.max(1.0) {
        WaveDescriptor {
            family: WaveFamily::One,
            shape: WaveShape::Null { xi: v_m - k },
        }
    } else if d_l > 0.0 {
        let sigma = v_m - k * (-0.5 * d_l).exp();
        WaveDescriptor {
            family: WaveFamily::One,
            shape: WaveShape::Shock { sigma },
        }
    } else {
        WaveDescriptor {
            family: WaveFamily::One,
            shape: WaveShape::Rarefaction {
                xi_left: left.v - k,
                xi_right: v_m - k,
            },
        }
    };

    let d_r = x - ln_r;
    let wave2 = if d_r.abs() <= null_band && (v_m - right.v).abs() <= null_band * k.max(1.0) {
        WaveDescriptor {
            family: WaveFamily::Two,
            shape: WaveShape::Null { xi: v_m + k },
        }
    } else if d_r > 0.0 {
        let sigma = v_m + k * (-0.5 * d_r).exp();
        WaveDescriptor {
            family: WaveFamily::Two,
            shape: WaveShape::Shock { sigma },
        }
    } else {
        WaveDescriptor {
            family: WaveFamily::Two,
            shape: WaveShape::Rarefaction {
                xi_left: v_m + k,
                xi_right: right.v + k,
            },
        }
    };

    Ok(WaveFan { left, middle, right, wave1, wave2 })
}

/// Samples the self-similar fan at slope xi = (r - r0) / t. Ties at fan
/// edges resolve to the fan interior (the value is continuous there, so
/// the choice only pins determinism).
pub fn sample_fan(fan: &WaveFan, xi: f64, p: &ModelParams) -> FluidState {
    let k = p.k();
    match fan.wave1.shape {
        WaveShape::Null { xi: c } | WaveShape::Shock { sigma: c } => {
            if xi < c {
                return fan.left;
            }
        }
        WaveShape::Rarefaction { xi_left, xi_right } => {
            if xi < xi_left {
                return fan.left;
            }
            if xi <= xi_right {
                // inside the 1-fan: lambda(U) = xi and w = w_L
                let v = xi + k;
                let ln_rho = fan.left.rho.ln() + (fan.left.v - v) / k;
                return FluidState::new(ln_rho.exp().max(f64::MIN_POSITIVE), v);
            }
        }
    }
    match fan.wave2.shape {
        WaveShape::Null { xi: c } | WaveShape::Shock { sigma: c } => {
            if xi < c {
                return fan.middle;
            }
        }
        WaveShape::Rarefaction { xi_left, xi_right } => {
            if xi < xi_left {
                return fan.middle;
            }
            if xi <= xi_right {
                // inside the 2-fan: mu(U) = xi and z = z_R
                let v = xi - k;
                let ln_rho = fan.right.rho.ln() + (v - fan.right.v) / k;
                return FluidState::new(ln_rho.exp().max(f64::MIN_POSITIVE), v);
            }
        }
    }
    fan.right
}

/// Wave strength of the Riemann problem (left, right):
/// |ln rho_L - ln rho_M| + |ln rho_R - ln rho_M|. Subadditive under
/// splitting of the data.
pub fn wave_strength(left: FluidState, right: FluidState, p: &ModelParams) -> Result<f64> {
    let fan = solve_riemann(left, right, p)?;
    let lm = fan.middle.rho.ln();
    Ok((left.rho.ln() - lm).abs() + (right.rho.ln() - lm).abs())
}
