//! The triple Riemann problem: three steady states with two jumps at
//! r_s < r_b, including detection of the first wave interaction and its
//! resolution.
//!
//! Before the first interaction the solution is the juxtaposition of the
//! two generalized Riemann problems (alpha | beta at r_s) and
//! (beta | gamma at r_b), switched anywhere inside their common beta
//! region. The first interaction pairs the left problem's 2-wave with the
//! right problem's 1-wave; the resolvable cases are
//!
//! * shock x shock: a fresh generalized Riemann problem posed at the
//!   collision point between the two middle steady states;
//! * rarefaction x shock (and its mirror shock x rarefaction): the shock
//!   penetrates the fan: a new steady state is anchored at the collision
//!   from the wave-curve intersection of the fan-edge trace and the trace
//!   behind the shock, the transmitted wave rides the evolving fan field,
//!   and once the fan is fully consumed a second, ordinary generalized
//!   Riemann problem takes over (the stage switch).
//!
//! A rarefaction x rarefaction adjacency is outside the machinery and
//! reported as a structured error. Zero-strength waves carry no jump, so
//! crossings that involve a Null wave are not interactions.

use crate::error::{Error, Result};
use crate::grp::{integrate_curve, solve_grp_with, GrpConfig, GrpSolution, WaveCurve};
use crate::model::{FluidState, ModelParams};
use crate::steady::{solve_steady, SteadySolution};
use crate::tol;
use crate::waves::{self, WaveKind};

/// Which cross-family pair collided first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionCase {
    /// 2-shock of the left problem x 1-shock of the right problem.
    ShockShock,
    /// 2-rarefaction of the left problem x 1-shock of the right problem.
    RarefactionShock,
    /// 2-shock of the left problem x 1-rarefaction of the right problem.
    ShockRarefaction,
}

/// A wave flanked by an evolving fan field on one side and a steady state
/// on the other (the transmitted wave while a shock crosses a fan).
/// Curves run in local time from the collision; a rarefaction interior is
/// represented by the frozen self-similar profile of the collision
/// traces, consistent with the O(t) fidelity of the staged construction.
#[derive(Debug, Clone)]
pub struct TransmittedWave {
    kind: WaveKind,
    minus: WaveCurve,
    plus: WaveCurve,
    r_c: f64,
    inner_trace: FluidState,
    outer_trace: FluidState,
    family_one: bool,
}

impl TransmittedWave {
    pub fn kind(&self) -> WaveKind {
        self.kind
    }

    fn interior(&self, tau: f64, r: f64, p: &ModelParams) -> FluidState {
        let k = p.k();
        if tau <= 0.0 {
            return self.inner_trace;
        }
        let xi = (r - self.r_c) / tau;
        if self.family_one {
            let xi = xi.clamp(self.inner_trace.v - k, self.outer_trace.v - k);
            let v = xi + k;
            let ln_rho = self.inner_trace.rho.ln() + (self.inner_trace.v - v) / k;
            FluidState::new(ln_rho.exp().max(f64::MIN_POSITIVE), v)
        } else {
            let xi = xi.clamp(self.inner_trace.v + k, self.outer_trace.v + k);
            let v = xi - k;
            let ln_rho = self.outer_trace.rho.ln() + (v - self.outer_trace.v) / k;
            FluidState::new(ln_rho.exp().max(f64::MIN_POSITIVE), v)
        }
    }
}

/// Resolution of the first interaction, valid from the collision time.
#[derive(Debug, Clone)]
pub enum InteractionResolution {
    /// New generalized Riemann problem between the two middle steady
    /// states, in local time from the collision.
    ShockShock {
        t_collision: f64,
        r_collision: f64,
        grp: GrpSolution,
    },
    /// Shock penetrating a rarefaction fan. `mirrored = false` is the
    /// rarefaction-shock case (left 2-fan, right 1-shock); `true` is the
    /// mirror. `steady_part` is the ordinary generalized problem on the
    /// steady side of the new intermediate state `mm`; `transmitted` is
    /// the wave riding the old fan. After `t_stage1` (fan consumed) the
    /// `stage1` generalized problem replaces the fan side.
    ShockFan {
        mirrored: bool,
        t_collision: f64,
        r_collision: f64,
        mm: SteadySolution,
        transmitted: TransmittedWave,
        steady_part: GrpSolution,
        t_stage1: Option<f64>,
        r_stage1: Option<f64>,
        stage1: Option<GrpSolution>,
    },
}

impl InteractionResolution {
    pub fn case(&self) -> InteractionCase {
        match self {
            InteractionResolution::ShockShock { .. } => InteractionCase::ShockShock,
            InteractionResolution::ShockFan { mirrored: false, .. } => {
                InteractionCase::RarefactionShock
            }
            InteractionResolution::ShockFan { mirrored: true, .. } => {
                InteractionCase::ShockRarefaction
            }
        }
    }

    pub fn t_collision(&self) -> f64 {
        match self {
            InteractionResolution::ShockShock { t_collision, .. }
            | InteractionResolution::ShockFan { t_collision, .. } => *t_collision,
        }
    }

    pub fn r_collision(&self) -> f64 {
        match self {
            InteractionResolution::ShockShock { r_collision, .. }
            | InteractionResolution::ShockFan { r_collision, .. } => *r_collision,
        }
    }

    /// Stage-switch time of the staged (shock-fan) cases.
    pub fn t_stage1(&self) -> Option<f64> {
        match self {
            InteractionResolution::ShockShock { .. } => None,
            InteractionResolution::ShockFan { t_stage1, .. } => *t_stage1,
        }
    }
}

/// Solution of the triple Riemann problem on [0, valid_until].
#[derive(Debug, Clone)]
pub struct TripleSolution {
    params: ModelParams,
    r_s: f64,
    r_b: f64,
    horizon: f64,
    left_grp: GrpSolution,
    right_grp: GrpSolution,
    t_first: Option<f64>,
    resolution: Option<InteractionResolution>,
    valid_until: f64,
}

/// Locates the first time in (t_lo, t_hi] where gap(t) = b(t) - a(t)
/// crosses zero from above, by a scan plus bisection to relative 1e-12.
fn first_crossing<A, B>(a: A, b: B, t_lo: f64, t_hi: f64) -> Option<f64>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let gap = |t: f64| b(t) - a(t);
    if t_hi <= t_lo {
        return None;
    }
    if gap(t_lo) <= 0.0 {
        return Some(t_lo);
    }
    let n = 256;
    let mut t_prev = t_lo;
    for i in 1..=n {
        let t = t_lo + (t_hi - t_lo) * i as f64 / n as f64;
        if gap(t) <= 0.0 {
            let (mut lo, mut hi) = (t_prev, t);
            for _ in 0..200 {
                if hi - lo <= 1e-12 * hi.max(1e-30) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if gap(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        t_prev = t;
    }
    None
}

/// Earliest time at which the left problem's outgoing 2-wave meets the
/// right problem's incoming 1-wave (upper edge against lower edge),
/// bisected to relative 1e-12; `None` when there is no crossing by the
/// horizon or when either wave is Null (zero-strength waves carry no jump
/// and do not interact).
pub fn first_interaction(
    left_grp: &GrpSolution,
    right_grp: &GrpSolution,
    horizon: f64,
) -> Option<f64> {
    if left_grp.wave_kinds().1 == WaveKind::Null || right_grp.wave_kinds().0 == WaveKind::Null {
        return None;
    }
    let a = |t: f64| left_grp.curves()[3].eval(t);
    let b = |t: f64| right_grp.curves()[0].eval(t);
    first_crossing(a, b, 0.0, horizon)
}

/// Resolves the first interaction of the two generalized problems at the
/// collision time `t_f`. The incoming pair must be one of shock x shock,
/// rarefaction x shock, shock x rarefaction.
pub fn resolve_interaction(
    left_grp: &GrpSolution,
    right_grp: &GrpSolution,
    t_f: f64,
    horizon: f64,
    p: &ModelParams,
    cfg: &GrpConfig,
) -> Result<InteractionResolution> {
    let r_c = 0.5 * (left_grp.curves()[3].eval(t_f) + right_grp.curves()[0].eval(t_f));
    let local = (horizon - t_f).max(1e-300);
    let kinds = (left_grp.wave_kinds().1, right_grp.wave_kinds().0);
    match kinds {
        (WaveKind::Shock, WaveKind::Shock) => {
            let grp = solve_grp_with(left_grp.middle(), right_grp.middle(), r_c, local, p, cfg)?;
            Ok(InteractionResolution::ShockShock {
                t_collision: t_f,
                r_collision: r_c,
                grp,
            })
        }
        (WaveKind::Rarefaction, WaveKind::Shock) => {
            resolve_shock_fan(left_grp, right_grp, t_f, r_c, local, false, p, cfg)
        }
        (WaveKind::Shock, WaveKind::Rarefaction) => {
            resolve_shock_fan(left_grp, right_grp, t_f, r_c, local, true, p, cfg)
        }
        other => Err(Error::Unsupported {
            what: format!("interaction pair {other:?} is outside the staged constructions"),
        }),
    }
}

/// Staged resolution of a shock penetrating a rarefaction fan.
#[allow(clippy::too_many_arguments)]
fn resolve_shock_fan(
    left_grp: &GrpSolution,
    right_grp: &GrpSolution,
    t_f: f64,
    r_c: f64,
    local: f64,
    mirrored: bool,
    p: &ModelParams,
    cfg: &GrpConfig,
) -> Result<InteractionResolution> {
    let k = p.k();
    // traces at the collision: the fan-edge value and the steady trace
    // behind the incoming shock
    let (rp_left, rp_right) = if !mirrored {
        (left_grp.eval(t_f, r_c)?, right_grp.middle().eval(r_c)?)
    } else {
        (left_grp.middle().eval(r_c)?, right_grp.eval(t_f, r_c)?)
    };
    let rp = waves::solve_riemann(rp_left, rp_right, p)?;
    let mm = solve_steady(r_c, rp.middle, p)?;

    // ordinary generalized problem on the steady-flanked side
    let steady_part = if !mirrored {
        solve_grp_with(&mm, right_grp.middle(), r_c, local, p, cfg)?
    } else {
        solve_grp_with(left_grp.middle(), &mm, r_c, local, p, cfg)?
    };

    let err_tol = tol::CURVE_LOCAL_ERROR * r_c.abs().max(1.0);
    let transmitted = if !mirrored {
        // family-1 wave between the old 2-fan (left flank) and mm
        let kind = rp.wave1.kind();
        let hint = std::cell::Cell::new(rp.middle.v.abs());
        let fan_side = |t_local: f64, r: f64| -> Result<FluidState> {
            left_grp.eval((t_f + t_local).min(left_grp.horizon()), r)
        };
        let sigma = |t_local: f64, r: f64| -> Result<f64> {
            let a = fan_side(t_local, r)?;
            let b = mm.eval_hinted(r, hint.get())?;
            hint.set(b.v.abs());
            Ok(b.v - k * (a.rho / b.rho).sqrt())
        };
        let lam_fan = |t_local: f64, r: f64| -> Result<f64> { Ok(fan_side(t_local, r)?.v - k) };
        let lam_mm = |_t: f64, r: f64| -> Result<f64> {
            let s = mm.eval_hinted(r, hint.get())?;
            hint.set(s.v.abs());
            Ok(s.v - k)
        };
        let (minus, plus) = match kind {
            WaveKind::Shock => {
                let c = integrate_curve(&sigma, r_c, local, cfg.curve_substeps, err_tol)?;
                (c.clone(), c)
            }
            WaveKind::Rarefaction => (
                integrate_curve(&lam_fan, r_c, local, cfg.curve_substeps, err_tol)?,
                integrate_curve(&lam_mm, r_c, local, cfg.curve_substeps, err_tol)?,
            ),
            WaveKind::Null => {
                let c = integrate_curve(&lam_mm, r_c, local, cfg.curve_substeps, err_tol)?;
                (c.clone(), c)
            }
        };
        TransmittedWave {
            kind,
            minus,
            plus,
            r_c,
            inner_trace: rp_left,
            outer_trace: rp.middle,
            family_one: true,
        }
    } else {
        // family-2 wave between mm and the old 1-fan (right flank)
        let kind = rp.wave2.kind();
        let hint = std::cell::Cell::new(rp.middle.v.abs());
        let fan_side = |t_local: f64, r: f64| -> Result<FluidState> {
            right_grp.eval((t_f + t_local).min(right_grp.horizon()), r)
        };
        let sigma = |t_local: f64, r: f64| -> Result<f64> {
            let a = mm.eval_hinted(r, hint.get())?;
            hint.set(a.v.abs());
            let b = fan_side(t_local, r)?;
            Ok(a.v + k * (b.rho / a.rho).sqrt())
        };
        let mu_fan = |t_local: f64, r: f64| -> Result<f64> { Ok(fan_side(t_local, r)?.v + k) };
        let mu_mm = |_t: f64, r: f64| -> Result<f64> {
            let s = mm.eval_hinted(r, hint.get())?;
            hint.set(s.v.abs());
            Ok(s.v + k)
        };
        let (minus, plus) = match kind {
            WaveKind::Shock => {
                let c = integrate_curve(&sigma, r_c, local, cfg.curve_substeps, err_tol)?;
                (c.clone(), c)
            }
            WaveKind::Rarefaction => (
                integrate_curve(&mu_mm, r_c, local, cfg.curve_substeps, err_tol)?,
                integrate_curve(&mu_fan, r_c, local, cfg.curve_substeps, err_tol)?,
            ),
            WaveKind::Null => {
                let c = integrate_curve(&mu_mm, r_c, local, cfg.curve_substeps, err_tol)?;
                (c.clone(), c)
            }
        };
        TransmittedWave {
            kind,
            minus,
            plus,
            r_c,
            inner_trace: rp.middle,
            outer_trace: rp_right,
            family_one: false,
        }
    };

    // stage switch: the transmitted wave consumes the old fan
    let (t_stage1, r_stage1) = if !mirrored {
        let fan_inner = |t: f64| left_grp.curves()[2].eval(t);
        let tw = |t: f64| transmitted.minus.eval(t - t_f);
        match first_crossing(fan_inner, tw, t_f, t_f + local) {
            Some(t) => (Some(t), Some(transmitted.minus.eval(t - t_f))),
            None => (None, None),
        }
    } else {
        let fan_outer = |t: f64| right_grp.curves()[1].eval(t);
        let tw = |t: f64| transmitted.plus.eval(t - t_f);
        match first_crossing(tw, fan_outer, t_f, t_f + local) {
            Some(t) => (Some(t), Some(transmitted.plus.eval(t - t_f))),
            None => (None, None),
        }
    };

    let stage1 = match (t_stage1, r_stage1) {
        (Some(t1), Some(r1)) => {
            let local1 = (t_f + local - t1).max(1e-300);
            Some(if !mirrored {
                solve_grp_with(left_grp.middle(), &mm, r1, local1, p, cfg)?
            } else {
                solve_grp_with(&mm, right_grp.middle(), r1, local1, p, cfg)?
            })
        }
        _ => None,
    };

    Ok(InteractionResolution::ShockFan {
        mirrored,
        t_collision: t_f,
        r_collision: r_c,
        mm,
        transmitted,
        steady_part,
        t_stage1,
        r_stage1,
        stage1,
    })
}

/// Solves the triple Riemann problem with default resolution knobs.
pub fn solve_triple(
    alpha: &SteadySolution,
    beta: &SteadySolution,
    gamma: &SteadySolution,
    r_s: f64,
    r_b: f64,
    horizon: f64,
    p: &ModelParams,
) -> Result<TripleSolution> {
    solve_triple_with(alpha, beta, gamma, r_s, r_b, horizon, p, &GrpConfig::default())
}

/// [`solve_triple`] with explicit resolution knobs.
#[allow(clippy::too_many_arguments)]
pub fn solve_triple_with(
    alpha: &SteadySolution,
    beta: &SteadySolution,
    gamma: &SteadySolution,
    r_s: f64,
    r_b: f64,
    horizon: f64,
    p: &ModelParams,
    cfg: &GrpConfig,
) -> Result<TripleSolution> {
    if !(r_s < r_b) {
        return Err(Error::InvalidParameter { name: "r_s", value: r_s });
    }
    let left_grp = solve_grp_with(alpha, beta, r_s, horizon, p, cfg)?;
    let right_grp = solve_grp_with(beta, gamma, r_b, horizon, p, cfg)?;
    let t_first = first_interaction(&left_grp, &right_grp, horizon);

    let mut valid_until = horizon;
    let resolution = match t_first {
        Some(t_f) if t_f < horizon => {
            let res = resolve_interaction(&left_grp, &right_grp, t_f, horizon, p, cfg)?;
            valid_until = resolution_validity(&left_grp, &right_grp, &res, horizon);
            Some(res)
        }
        _ => None,
    };

    Ok(TripleSolution {
        params: *p,
        r_s,
        r_b,
        horizon,
        left_grp,
        right_grp,
        t_first,
        resolution,
        valid_until,
    })
}

/// Validity horizon of a resolved interaction: the new waves may not
/// catch the surviving outer waves of the original problems (crossings
/// with zero-strength waves are immaterial and ignored).
fn resolution_validity(
    left_grp: &GrpSolution,
    right_grp: &GrpSolution,
    res: &InteractionResolution,
    horizon: f64,
) -> f64 {
    let mut valid = horizon;
    match res {
        InteractionResolution::ShockShock { t_collision, grp, .. } => {
            if left_grp.wave_kinds().0 != WaveKind::Null && grp.wave_kinds().0 != WaveKind::Null {
                let old = |t: f64| left_grp.curves()[1].eval(t);
                let new = |t: f64| grp.curves()[0].eval(t - t_collision);
                if let Some(t) = first_crossing(old, new, *t_collision, horizon) {
                    valid = valid.min(t);
                }
            }
            if right_grp.wave_kinds().1 != WaveKind::Null && grp.wave_kinds().1 != WaveKind::Null {
                let new = |t: f64| grp.curves()[3].eval(t - t_collision);
                let old = |t: f64| right_grp.curves()[2].eval(t);
                if let Some(t) = first_crossing(new, old, *t_collision, horizon) {
                    valid = valid.min(t);
                }
            }
        }
        InteractionResolution::ShockFan {
            mirrored,
            t_collision,
            steady_part,
            t_stage1,
            stage1,
            ..
        } => {
            if !mirrored {
                if right_grp.wave_kinds().1 != WaveKind::Null
                    && steady_part.wave_kinds().1 != WaveKind::Null
                {
                    let new = |t: f64| steady_part.curves()[3].eval(t - t_collision);
                    let old = |t: f64| right_grp.curves()[2].eval(t);
                    if let Some(t) = first_crossing(new, old, *t_collision, horizon) {
                        valid = valid.min(t);
                    }
                }
                if let (Some(t1), Some(g1)) = (t_stage1, stage1.as_ref()) {
                    if left_grp.wave_kinds().0 != WaveKind::Null
                        && g1.wave_kinds().0 != WaveKind::Null
                    {
                        let old = |t: f64| left_grp.curves()[1].eval(t);
                        let new = |t: f64| g1.curves()[0].eval(t - t1);
                        if let Some(t) = first_crossing(old, new, *t1, horizon) {
                            valid = valid.min(t);
                        }
                    }
                }
            } else {
                if left_grp.wave_kinds().0 != WaveKind::Null
                    && steady_part.wave_kinds().0 != WaveKind::Null
                {
                    let old = |t: f64| left_grp.curves()[1].eval(t);
                    let new = |t: f64| steady_part.curves()[0].eval(t - t_collision);
                    if let Some(t) = first_crossing(old, new, *t_collision, horizon) {
                        valid = valid.min(t);
                    }
                }
                if let (Some(t1), Some(g1)) = (t_stage1, stage1.as_ref()) {
                    if right_grp.wave_kinds().1 != WaveKind::Null
                        && g1.wave_kinds().1 != WaveKind::Null
                    {
                        let new = |t: f64| g1.curves()[3].eval(t - t1);
                        let old = |t: f64| right_grp.curves()[2].eval(t);
                        if let Some(t) = first_crossing(new, old, *t1, horizon) {
                            valid = valid.min(t);
                        }
                    }
                }
            }
        }
    }
    valid
}

impl TripleSolution {
    pub fn r_s(&self) -> f64 {
        self.r_s
    }

    pub fn r_b(&self) -> f64 {
        self.r_b
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Moment of the first interaction; `None` plays the role of the
    /// +infinity sentinel.
    pub fn t_first(&self) -> Option<f64> {
        self.t_first
    }

    pub fn resolution(&self) -> Option<&InteractionResolution> {
        self.resolution.as_ref()
    }

    /// Largest time this solution is defined for (the horizon, or earlier
    /// when a secondary interaction would occur first).
    pub fn valid_until(&self) -> f64 {
        self.valid_until
    }

    pub fn left_grp(&self) -> &GrpSolution {
        &self.left_grp
    }

    pub fn right_grp(&self) -> &GrpSolution {
        &self.right_grp
    }

    /// Juxtaposition of the two generalized problems, switched midway
    /// between the left problem's outgoing 2-wave and the right problem's
    /// incoming 1-wave (any curve inside the common beta region gives the
    /// same values).
    fn eval_juxtaposed(&self, t: f64, r: f64) -> Result<FluidState> {
        let switch = 0.5 * (self.left_grp.curves()[3].eval(t) + self.right_grp.curves()[0].eval(t));
        if r < switch {
            self.left_grp.eval(t, r)
        } else {
            self.right_grp.eval(t, r)
        }
    }

    /// Evaluates the triple solution at (t, r).
    pub fn eval(&self, t: f64, r: f64) -> Result<FluidState> {
        if t < 0.0 || t > self.valid_until * (1.0 + 1e-12) {
            return Err(Error::BeyondValidity { t, achieved: self.valid_until });
        }
        let res = match &self.resolution {
            None => return self.eval_juxtaposed(t, r),
            Some(res) => res,
        };
        if t <= res.t_collision() {
            return self.eval_juxtaposed(t, r);
        }
        match res {
            InteractionResolution::ShockShock { t_collision, grp, .. } => {
                let tau = t - t_collision;
                if r <= self.left_grp.curves()[1].eval(t) {
                    self.left_grp.eval(t, r)
                } else if r >= self.right_grp.curves()[2].eval(t) {
                    self.right_grp.eval(t, r)
                } else {
                    grp.eval(tau.min(grp.horizon()), r)
                }
            }
            InteractionResolution::ShockFan {
                mirrored,
                t_collision,
                transmitted,
                steady_part,
                t_stage1,
                stage1,
                ..
            } => {
                let tau = t - t_collision;
                let tau_sp = tau.min(steady_part.horizon());
                let in_stage1 = matches!(t_stage1, Some(t1) if t >= *t1);
                if !mirrored {
                    if in_stage1 {
                        let (t1, g1) = (t_stage1.unwrap(), stage1.as_ref().unwrap());
                        if r <= self.left_grp.curves()[1].eval(t) {
                            return self.left_grp.eval(t, r);
                        }
                        let tau1 = (t - t1).min(g1.horizon());
                        if r < steady_part.curves()[2].eval(tau_sp) {
                            return g1.eval(tau1, r);
                        }
                    } else {
                        if r <= self.left_grp.curves()[2].eval(t) {
                            return self.left_grp.eval(t, r);
                        }
                        let tw_lo = transmitted.minus.eval(tau);
                        if r < tw_lo {
                            // remnant of the old 2-fan
                            return self.left_grp.eval(t, r);
                        }
                        let tw_hi = transmitted.plus.eval(tau);
                        if r <= tw_hi && transmitted.kind == WaveKind::Rarefaction {
                            return Ok(transmitted.interior(tau, r, &self.params));
                        }
                    }
                    if r >= self.right_grp.curves()[2].eval(t) {
                        self.right_grp.eval(t, r)
                    } else {
                        steady_part.eval(tau_sp, r)
                    }
                } else {
                    if r <= self.left_grp.curves()[1].eval(t) {
                        return self.left_grp.eval(t, r);
                    }
                    if in_stage1 {
                        let (t1, g1) = (t_stage1.unwrap(), stage1.as_ref().unwrap());
                        let tau1 = (t - t1).min(g1.horizon());
                        if r <= steady_part.curves()[1].eval(tau_sp) {
                            return steady_part.eval(tau_sp, r);
                        }
                        if r < self.right_grp.curves()[2].eval(t) {
                            return g1.eval(tau1, r);
                        }
                        return self.right_grp.eval(t, r);
                    }
                    let tw_lo = transmitted.minus.eval(tau);
                    if r < tw_lo {
                        return steady_part.eval(tau_sp, r);
                    }
                    let tw_hi = transmitted.plus.eval(tau);
                    if r <= tw_hi && transmitted.kind == WaveKind::Rarefaction {
                        return Ok(transmitted.interior(tau, r, &self.params));
                    }
                    // remnant of the old 1-fan and everything beyond
                    self.right_grp.eval(t, r)
                }
            }
        }
    }
}
