//! Steady-state solutions of the static system
//!
//! ```text
//!   d/dr (r^2 rho v) = 0
//!   d/dr (r^2 rho (v^2 + k^2)) - 2 k^2 rho r + m rho = 0
//! ```
//!
//! A solution through anchor (r0, rho0, v0) conserves the mass flux
//! Q0 = r0^2 rho0 v0 and the Bernoulli-type quantity
//! B0 = v0^2/2 + k^2 ln rho0 - m/r0. Eliminating rho gives the scalar
//! relation G(r, v(r)) = G(r0, v0) with
//!
//! ```text
//!   G(r, v) = v^2/2 - k^2 ln(r^2 sgn(v0) v) - m/r.
//! ```
//!
//! dG/dv vanishes only at v = +-k and dG/dr only at r = m/2k^2, so the
//! level sets split into families by the sign of
//! S(r0, v0) = G(r0, v0) - G(m/2k^2, k):
//!
//! * S > 0: smooth on all of (0, inf), sub/supersonic character frozen;
//! * S = 0: one of four critical curves through (m/2k^2, +-k);
//! * S < 0: defined only up to a sonic radius where |v| = k.
//!
//! Evaluation solves the algebraic relation per requested radius with a
//! safeguarded Newton bracketed on the branch's velocity interval; the
//! degenerate ODE for v(r) is never integrated. Density is recovered as
//! rho = Q0 / (r^2 v), which keeps the mass-flux relation exact.

use crate::error::{Error, Result};
use crate::model::{FluidState, ModelParams};
use crate::roots;
use crate::tol;

/// The four critical curves, named by velocity sign (P positive,
/// N negative) and by which root branch they follow inside r < m/2k^2
/// (flat = closer to zero, sharp = farther from zero). Flat branches
/// accelerate through the sonic point, sharp branches decelerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalBranch {
    PFlat,
    PSharp,
    NFlat,
    NSharp,
}

impl CriticalBranch {
    pub fn is_positive(&self) -> bool {
        matches!(self, CriticalBranch::PFlat | CriticalBranch::PSharp)
    }

    fn is_flat(&self) -> bool {
        matches!(self, CriticalBranch::PFlat | CriticalBranch::NFlat)
    }
}

/// Family tag of a steady solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteadyFamily {
    /// Defined on all of (0, inf); |v| never meets k.
    GlobalSmooth,
    /// Lies on one of the four critical curves through (m/2k^2, +-k).
    Critical(CriticalBranch),
    /// Defined up to a sonic radius only.
    SonicLimited,
}

/// A branch-resolved steady solution, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadySolution {
    anchor_r: f64,
    anchor: FluidState,
    params: ModelParams,
    family: SteadyFamily,
    sign_v: f64,
    supersonic: bool,
    g0: f64,
    q0: f64,
    bernoulli: f64,
    dom_lo: f64,
    dom_hi: f64,
    sonic_r: Option<f64>,
}

/// G(r, v) for velocities of sign `sign_ref` (+1.0 or -1.0).
pub fn g_value(r: f64, v: f64, sign_ref: f64, p: &ModelParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    let arg = r * r * sign_ref * v;
    if !(arg > 0.0) {
        return Err(Error::LogDomain { what: "G(r, v)", value: arg });
    }
    Ok(0.5 * v * v - p.k() * p.k() * arg.ln() - p.m() / r)
}

/// Critical level G(m/2k^2, +-k) = -(3/2) k^2 - k^2 ln(m^2 / 4k^3).
pub fn critical_g(p: &ModelParams) -> f64 {
    let k2 = p.k() * p.k();
    -1.5 * k2 - k2 * (p.m() * p.m() / (4.0 * k2 * p.k())).ln()
}

/// S(r, v) = G(r, |v|) - G(m/2k^2, k); its sign classifies the family.
pub fn s_value(r: f64, v: f64, p: &ModelParams) -> Result<f64> {
    if v == 0.0 {
        return Err(Error::LogDomain { what: "S(r, v)", value: 0.0 });
    }
    Ok(g_value(r, v.abs(), 1.0, p)? - critical_g(p))
}

/// G(r, k): the branch minimum over v > 0 at fixed r. Increasing up to
/// r = m/2k^2 and decreasing past it, with maximum value critical_g.
fn g_at_sonic(r: f64, p: &ModelParams) -> f64 {
    let k2 = p.k() * p.k();
    0.5 * k2 - k2 * (r * r * p.k()).ln() - p.m() / r
}

/// Solves G(r, u) = g_target for u on the subsonic (0, k] or supersonic
/// [k, inf) branch. `hint` warm-starts the Newton iteration.
///
/// Near the sonic line the relation is quadratically flat in u, so the
/// solve switches to the offset e = u - k with the cancellation-free form
/// G(r, k + e) - G(r, k) = e^2/2 + k e - k^2 ln(1 + e/k), keeping the
/// velocity accurate to machine precision right up to the sonic point.
fn branch_velocity(
    r: f64,
    g_target: f64,
    supersonic: bool,
    hint: f64,
    p: &ModelParams,
) -> Result<f64> {
    let k = p.k();
    let k2 = k * k;

    let f_sonic = g_at_sonic(r, p) - g_target;
    let f_scale = 1.0_f64.max(g_target.abs());
    if f_sonic > 0.0 {
        // No root on this radius unless we are within rounding of the
        // sonic touch; otherwise the radius lies outside the domain.
        if f_sonic <= 1e-11 * f_scale {
            return Ok(k);
        }
        return Err(Error::SonicHit { r, t: f64::NAN });
    }
    if f_sonic == 0.0 {
        return Ok(k);
    }

    if -f_sonic <= 0.04 * k2 {
        // near-sonic: |e| <~ 0.2 k
        let g = |e: f64| f_sonic + 0.5 * e * e + k * e - k2 * (e / k).ln_1p();
        let dg = |e: f64| (k + e) - k2 / (k + e);
        let e_guess = (-2.0 * f_sonic).sqrt().min(0.5 * k);
        let (lo, hi) = if supersonic {
            let mut hi = 2.0 * e_guess;
            let mut guard = 0;
            while g(hi) <= 0.0 {
                hi *= 2.0;
                guard += 1;
                if guard > 100 {
                    return Err(Error::NoBracket { what: "steady velocity", lo: 0.0, hi });
                }
            }
            (0.0, hi)
        } else {
            let mut lo = -2.0 * e_guess.min(0.45 * k);
            let mut guard = 0;
            while g(lo) <= 0.0 {
                // move halfway toward the vacuum end e = -k
                lo = 0.5 * (lo - k);
                guard += 1;
                if guard > 100 {
                    return Err(Error::NoBracket { what: "steady velocity", lo, hi: 0.0 });
                }
            }
            (lo, 0.0)
        };
        let root = roots::newton_bisect(
            "steady velocity (near sonic)",
            g,
            dg,
            lo,
            hi,
            f64::NAN,
            0.0,
            4.0 * f64::EPSILON * k,
            tol::MAX_ITER,
        )?;
        return Ok(k + root.x);
    }

    let f_tol = 1e-14 * f_scale;
    if supersonic {
        let f = |u: f64| 0.5 * u * u - k2 * (r * r * u).ln() - p.m() / r - g_target;
        let df = |u: f64| u - k2 / u;
        let mut hi = 2.0 * k.max(hint);
        let mut guard = 0;
        while f(hi) <= 0.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 600 {
                return Err(Error::NoBracket { what: "steady velocity", lo: k, hi });
            }
        }
        let x0 = if hint.is_finite() && hint > k && hint < hi { hint } else { f64::NAN };
        // terminate on bracket collapse too: for large velocities the
        // terms of f carry rounding noise above the f tolerance
        let x_tol = 4.0 * f64::EPSILON * (k + hi);
        let root =
            roots::newton_bisect("steady velocity", f, df, k, hi, x0, f_tol, x_tol, tol::MAX_ITER)?;
        Ok(root.x)
    } else {
        // subsonic roots can sit hundreds of orders of magnitude below k
        // (deep pile-up toward r -> 0); solve in y = ln u for uniform
        // relative accuracy
        let g = |y: f64| 0.5 * (2.0 * y).exp() - k2 * ((r * r).ln() + y) - p.m() / r - g_target;
        let dg = |y: f64| (2.0 * y).exp() - k2;
        let y_hi = k.ln();
        let mut y_lo = y_hi - 1.0;
        let mut step = 1.0;
        let mut guard = 0;
        while g(y_lo) <= 0.0 {
            y_lo -= step;
            step *= 2.0;
            guard += 1;
            if guard > 60 {
                return Err(Error::NoBracket { what: "steady velocity", lo: y_lo, hi: y_hi });
            }
        }
        let y0 = if hint.is_finite() && hint > 0.0 {
            let y = hint.ln();
            if y > y_lo && y < y_hi {
                y
            } else {
                f64::NAN
            }
        } else {
            f64::NAN
        };
        let x_tol = 1e-14 * (1.0 + y_lo.abs().max(y_hi.abs()));
        let root = roots::newton_bisect(
            "steady velocity",
            g,
            dg,
            y_lo,
            y_hi,
            y0,
            f_tol,
            x_tol,
            tol::MAX_ITER,
        )?;
        Ok(root.x.exp())
    }
}

/// Side on which a sonic radius is sought relative to m/2k^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SonicSide {
    Below,
    Above,
}

/// Solves G(r_s, k) = g0 on the requested side of m/2k^2 (monotonicity of
/// G(., k) away from the critical radius guarantees a unique root when
/// g0 < critical_g).
fn sonic_radius(side: SonicSide, g0: f64, p: &ModelParams) -> Result<f64> {
    let rc = p.critical_radius();
    let f = |r: f64| g_at_sonic(r, p) - g0;
    let (mut a, mut b) = match side {
        SonicSide::Below => {
            let mut lo = 0.5 * rc;
            let mut guard = 0;
            while f(lo) >= 0.0 {
                lo *= 0.5;
                guard += 1;
                if guard > 1100 {
                    return Err(Error::NoBracket { what: "sonic radius", lo, hi: rc });
                }
            }
            (lo, rc)
        }
        SonicSide::Above => {
            let mut hi = 2.0 * rc;
            let mut guard = 0;
            while f(hi) >= 0.0 {
                hi *= 2.0;
                guard += 1;
                if guard > 600 {
                    return Err(Error::NoBracket { what: "sonic radius", lo: rc, hi });
                }
            }
            (rc, hi)
        }
    };
    // plain bisection to relative tolerance on the radius
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a) <= tol::SONIC_RADIUS * mid {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        let below_is_neg = matches!(side, SonicSide::Below);
        if (fm < 0.0) == below_is_neg {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Constructs and classifies the steady solution through
/// (anchor_r, anchor). Anchors with v = 0 are outside the construction
/// (G contains ln of sgn(v0) v) and are rejected.
pub fn solve_steady(anchor_r: f64, anchor: FluidState, p: &ModelParams) -> Result<SteadySolution> {
    if !(anchor_r > 0.0) || !anchor_r.is_finite() {
        return Err(Error::InvalidParameter { name: "anchor_r", value: anchor_r });
    }
    if !anchor.is_valid() {
        return Err(Error::NonPositiveDensity { rho: anchor.rho });
    }
    let k = p.k();
    let sign_v = if anchor.v >= 0.0 { 1.0 } else { -1.0 };
    let u0 = anchor.v.abs();
    let q0 = anchor_r * anchor_r * anchor.rho * anchor.v;
    let bernoulli = 0.5 * anchor.v * anchor.v + k * k * anchor.rho.ln() - p.m() / anchor_r;

    if !p.has_source() {
        // Homogeneous hook: steady solutions degenerate to constants
        // (including static ones: without the source, v = 0 is fine).
        return Ok(SteadySolution {
            anchor_r,
            anchor,
            params: *p,
            family: SteadyFamily::GlobalSmooth,
            sign_v,
            supersonic: u0 > k,
            g0: 0.0,
            q0,
            bernoulli,
            dom_lo: 0.0,
            dom_hi: f64::INFINITY,
            sonic_r: None,
        });
    }

    if anchor.v.abs() < tol::V_ZERO * k {
        return Err(Error::Unsupported {
            what: format!("steady anchor with v = {} (static data has no steady branch)", anchor.v),
        });
    }
    let g0 = g_value(anchor_r, u0, 1.0, p)?;

    let rc = p.critical_radius();
    let s = g0 - critical_g(p);
    let band = tol::CRITICAL_BAND * 1.0_f64.max(g0.abs());

    if (u0 - k).abs() <= 1e-13 * k && s.abs() > band {
        return Err(Error::Unsupported {
            what: format!(
                "steady anchor exactly sonic (v = {}) away from the critical radius",
                anchor.v
            ),
        });
    }
    let supersonic = u0 > k;

    let (family, dom_lo, dom_hi, sonic_r) = if s > band {
        (SteadyFamily::GlobalSmooth, 0.0, f64::INFINITY, None)
    } else if s >= -band {
        let at_crossing = (anchor_r - rc).abs() <= 1e-12 * rc;
        let branch = match (sign_v > 0.0, at_crossing) {
            (pos, true) => {
                if pos {
                    CriticalBranch::PFlat
                } else {
                    CriticalBranch::NFlat
                }
            }
            (pos, false) => {
                let flat = (anchor_r < rc) != supersonic;
                match (pos, flat) {
                    (true, true) => CriticalBranch::PFlat,
                    (true, false) => CriticalBranch::PSharp,
                    (false, true) => CriticalBranch::NFlat,
                    (false, false) => CriticalBranch::NSharp,
                }
            }
        };
        (SteadyFamily::Critical(branch), 0.0, f64::INFINITY, Some(rc))
    } else {
        if (anchor_r - rc).abs() <= 1e-12 * rc {
            // S < 0 cannot hold at the critical radius (G(., k) is maximal
            // there); reaching this means inconsistent input.
            return Err(Error::Unsupported {
                what: "sonic-limited anchor at the critical radius".to_string(),
            });
        }
        if anchor_r < rc {
            let rs = sonic_radius(SonicSide::Below, g0, p)?;
            (SteadyFamily::SonicLimited, 0.0, rs, Some(rs))
        } else {
            let rs = sonic_radius(SonicSide::Above, g0, p)?;
            (SteadyFamily::SonicLimited, rs, f64::INFINITY, Some(rs))
        }
    };

    Ok(SteadySolution {
        anchor_r,
        anchor,
        params: *p,
        family,
        sign_v,
        supersonic,
        g0,
        q0,
        bernoulli,
        dom_lo,
        dom_hi,
        sonic_r,
    })
}

impl SteadySolution {
    pub fn anchor_r(&self) -> f64 {
        self.anchor_r
    }

    pub fn anchor_state(&self) -> FluidState {
        self.anchor
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn family(&self) -> SteadyFamily {
        self.family
    }

    /// Conserved Bernoulli-type constant G0 = G(r0, v0).
    pub fn g0(&self) -> f64 {
        self.g0
    }

    /// Signed mass-flux constant Q0 = r0^2 rho0 v0.
    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn sign_v(&self) -> f64 {
        self.sign_v
    }

    /// Whether |v| > k at the anchor (frozen on the whole domain for
    /// non-critical families).
    pub fn supersonic(&self) -> bool {
        self.supersonic
    }

    /// Domain of definition (lo, hi); infinite ends use 0.0 / inf. Closed
    /// at the sonic endpoint when one exists.
    pub fn domain(&self) -> (f64, f64) {
        (self.dom_lo, self.dom_hi)
    }

    pub fn sonic_r(&self) -> Option<f64> {
        match self.family {
            SteadyFamily::SonicLimited => self.sonic_r,
            _ => None,
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        let grace = self.sonic_grace();
        r > 0.0 && r >= self.dom_lo - grace && r <= self.dom_hi + grace
    }

    fn sonic_grace(&self) -> f64 {
        match self.family {
            SteadyFamily::SonicLimited => {
                1e-11 * self.sonic_r.unwrap_or(self.anchor_r).max(1.0)
            }
            _ => 0.0,
        }
    }

    fn supersonic_at(&self, r: f64) -> bool {
        match self.family {
            SteadyFamily::Critical(branch) => {
                let rc = self.params.critical_radius();
                if branch.is_flat() {
                    r > rc
                } else {
                    r < rc
                }
            }
            _ => self.supersonic,
        }
    }

    /// [`SteadySolution::eval`] with a warm-start velocity magnitude for
    /// the Newton iteration; used by integrators that sweep nearby radii.
    pub(crate) fn eval_hinted(&self, r: f64, hint_u: f64) -> Result<FluidState> {
        self.eval_inner(r, hint_u)
    }

    /// Evaluates the steady state at radius r (closed at the sonic
    /// endpoint). Errors outside the domain carry the sonic radius.
    pub fn eval(&self, r: f64) -> Result<FluidState> {
        self.eval_inner(r, self.anchor.v.abs())
    }

    fn eval_inner(&self, r: f64, hint_u: f64) -> Result<FluidState> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter { name: "r", value: r });
        }
        if !self.params.has_source() {
            return Ok(self.anchor);
        }
        if r == self.anchor_r {
            return Ok(self.anchor);
        }
        if !self.contains(r) {
            return Err(Error::OutsideDomain {
                r,
                lo: self.dom_lo,
                hi: self.dom_hi,
                sonic_r: self.sonic_r,
            });
        }
        let k = self.params.k();
        let rc = self.params.critical_radius();

        let u = if matches!(self.family, SteadyFamily::Critical(_))
            && (r - rc).abs() <= 1e-13 * rc
        {
            k
        } else {
            // clamp radii within the sonic grace band onto the endpoint
            let r_eff = match self.family {
                SteadyFamily::SonicLimited => {
                    let rs = self.sonic_r.unwrap();
                    let past_end = (self.dom_hi == rs && r > rs) || (self.dom_lo == rs && r < rs);
                    if past_end {
                        rs
                    } else {
                        r
                    }
                }
                _ => r,
            };
            let hint = if hint_u > 0.0 { hint_u } else { self.anchor.v.abs() };
            match branch_velocity(r_eff, self.g0, self.supersonic_at(r_eff), hint, &self.params) {
                Ok(u) => u,
                Err(Error::SonicHit { .. }) => {
                    return Err(Error::OutsideDomain {
                        r,
                        lo: self.dom_lo,
                        hi: self.dom_hi,
                        sonic_r: self.sonic_r,
                    })
                }
                Err(e) => return Err(e),
            }
        };
        let v = self.sign_v * u;
        let rho = self.q0 / (r * r * v);
        if !rho.is_finite() || !(rho > 0.0) || !v.is_finite() {
            // the branch leaves the representable range (deep subsonic
            // pile-up toward r -> 0 underflows v and overflows rho)
            return Err(Error::NonPositiveDensity { rho });
        }
        Ok(FluidState::new(rho, v))
    }

    /// Residuals of the two conservation relations at radius r, relative
    /// to the magnitude of their terms: (mass-flux defect, Bernoulli
    /// defect).
    pub fn residuals(&self, r: f64) -> Result<(f64, f64)> {
        let s = self.eval(r)?;
        let k2 = self.params.k() * self.params.k();
        let q = r * r * s.rho * s.v;
        let b = 0.5 * s.v * s.v + k2 * s.rho.ln() - self.params.m() / r;
        let res_q = (q - self.q0).abs() / self.q0.abs().max(f64::MIN_POSITIVE);
        let res_b = (b - self.bernoulli).abs() / self.bernoulli.abs().max(1.0);
        Ok((res_q, res_b))
    }
}

/// Velocity of the named critical curve at radius r.
pub fn eval_critical(branch: CriticalBranch, r: f64, p: &ModelParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    let k = p.k();
    let rc = p.critical_radius();
    let sign = if branch.is_positive() { 1.0 } else { -1.0 };
    if (r - rc).abs() <= 1e-13 * rc {
        return Ok(sign * k);
    }
    let supersonic = if branch.is_flat() { r > rc } else { r < rc };
    let u = branch_velocity(r, critical_g(p), supersonic, f64::NAN, p)?;
    Ok(sign * u)
}

/// Conjugate state across a zero-speed steady shock:
/// v_R = k^2 / v_L and rho_R = rho_L v_L^2 / k^2. Admissible (entropic)
/// left velocities are v_L in (-k, 0) union (k, inf).
pub fn steady_shock_conjugate(s: FluidState, p: &ModelParams) -> Result<FluidState> {
    if !s.is_valid() {
        return Err(Error::NonPositiveDensity { rho: s.rho });
    }
    let k = p.k();
    let admissible = (s.v > k) || (s.v > -k && s.v < 0.0);
    if !admissible {
        return Err(Error::Unsupported {
            what: format!("steady shock with left velocity {} (needs v in (-k,0) or (k,inf))", s.v),
        });
    }
    let v_r = k * k / s.v;
    let rho_r = s.rho * s.v * s.v / (k * k);
    Ok(FluidState::new(rho_r, v_r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_rng::Xorshift;

    fn p11() -> ModelParams {
        ModelParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn g_value_example() {
        let p = p11();
        // r = m/2k^2 = 0.5, v = k = 1: G = 1/2 - ln(1/4) - 2 = -3/2 + ln 4
        let g = g_value(0.5, 1.0, 1.0, &p).unwrap();
        assert!((g - (-1.5 + 4f64.ln())).abs() < 1e-14);
        assert!((g - critical_g(&p)).abs() < 1e-14);
        assert!(g_value(0.5, -1.0, 1.0, &p).is_err());
        assert!(g_value(-0.5, 1.0, 1.0, &p).is_err());
    }

    #[test]
    fn g_partial_derivatives() {
        // dG/dv = v - k^2/v, dG/dr = (m - 2 k^2 r)/r^2, checked by
        // central differences at generic points and at their zeros.
        let p = ModelParams::new(1.3, 0.9).unwrap();
        let h = 1e-6;
        for &(r, v) in &[(0.7, 2.0), (2.0, 0.4), (1.1, 1.5)] {
            let dv = (g_value(r, v + h, 1.0, &p).unwrap() - g_value(r, v - h, 1.0, &p).unwrap())
                / (2.0 * h);
            assert!((dv - (v - p.k() * p.k() / v)).abs() < 1e-7);
            let dr = (g_value(r + h, v, 1.0, &p).unwrap() - g_value(r - h, v, 1.0, &p).unwrap())
                / (2.0 * h);
            assert!((dr - (p.m() - 2.0 * p.k() * p.k() * r) / (r * r)).abs() < 1e-6);
        }
        // stationary exactly at v = k and r = m/2k^2
        let k = p.k();
        assert_eq!(k - k * k / k, 0.0);
        let rc = p.critical_radius();
        assert!((p.m() - 2.0 * k * k * rc).abs() < 1e-15);
    }

    #[test]
    fn classification_examples() {
        let p = p11();
        // anchor on the critical curve: r0 = m/2k^2, v0 = k
        let sol = solve_steady(0.5, FluidState::new(0.7, 1.0), &p).unwrap();
        assert!(matches!(sol.family(), SteadyFamily::Critical(_)));
        // supersonic far anchor: S > 0
        let sol = solve_steady(2.0, FluidState::new(1.0, 3.0), &p).unwrap();
        assert_eq!(sol.family(), SteadyFamily::GlobalSmooth);
        assert_eq!(sol.domain(), (0.0, f64::INFINITY));
        // mildly supersonic: S < 0, sonic radius inside (0.5, 2)
        let sol = solve_steady(2.0, FluidState::new(1.0, 1.05), &p).unwrap();
        assert_eq!(sol.family(), SteadyFamily::SonicLimited);
        let rs = sol.sonic_r().unwrap();
        assert!(rs > 0.5 && rs < 2.0, "rs = {rs}");
        // oracle: straight bisection of G(., k) - G0 on (0.5, 2.0)
        let g0 = sol.g0();
        let f = |r: f64| {
            0.5 - (r * r).ln() - 1.0 / r - g0
        };
        let (mut a, mut b) = (0.5, 2.0);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((rs - 0.5 * (a + b)).abs() < 1e-9, "rs {rs} oracle {}", 0.5 * (a + b));
        // residual of the defining equation at the sonic radius
        assert!((g_at_sonic(rs, &p) - g0).abs() < 1e-10 * g0.abs().max(1.0));
    }

    #[test]
    fn rejects_static_and_off_critical_sonic_anchors() {
        let p = p11();
        assert!(matches!(
            solve_steady(1.0, FluidState::new(1.0, 0.0), &p),
            Err(Error::Unsupported { .. })
        ));
        assert!(matches!(
            solve_steady(2.0, FluidState::new(1.0, 1.0), &p),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn eval_reproduces_anchor_and_conserves() {
        let p = p11();
        let anchor = FluidState::new(0.8, 3.0);
        let sol = solve_steady(2.0, anchor, &p).unwrap();
        assert_eq!(sol.eval(2.0).unwrap(), anchor);
        let mut rng = Xorshift::new(11);
        for _ in 0..300 {
            let r = rng.log_range(0.05, 50.0);
            let (rq, rb) = sol.residuals(r).unwrap();
            assert!(rq < 1e-10 && rb < 1e-10, "r = {r}: {rq} {rb}");
        }
    }

    #[test]
    fn conservation_across_families() {
        let p = ModelParams::new(1.7, 0.8).unwrap();
        let mut rng = Xorshift::new(12);
        let mut seen_sonic = false;
        let mut seen_global = false;
        for _ in 0..60 {
            let r0 = rng.log_range(0.2, 8.0);
            let v0 = rng.in_range(-3.0, 3.0);
            if v0.abs() < 0.05 {
                continue;
            }
            let anchor = FluidState::new(rng.log_range(0.1, 10.0), v0);
            let sol = match solve_steady(r0, anchor, &p) {
                Ok(s) => s,
                Err(_) => continue,
            };
            match sol.family() {
                SteadyFamily::SonicLimited => seen_sonic = true,
                SteadyFamily::GlobalSmooth => seen_global = true,
                _ => {}
            }
            let (lo, hi) = sol.domain();
            let a = lo.max(r0 / 8.0);
            let b = hi.min(r0 * 8.0);
            for i in 0..40 {
                let r = a + (b - a) * (i as f64 + 0.5) / 40.0;
                if !sol.contains(r) {
                    continue;
                }
                // radii where the branch leaves the representable range
                // report an error and are skipped
                let Ok((rq, rb)) = sol.residuals(r) else { continue };
                assert!(rq < 1e-10 && rb < 1e-10);
                // sign preservation on the interior
                let s = sol.eval(r).unwrap();
                assert_eq!(s.v.signum(), sol.sign_v());
                assert!(s.rho > 0.0);
            }
        }
        assert!(seen_sonic && seen_global);
    }

    #[test]
    fn sonic_limited_supersonic_below_critical_radius() {
        // anchor left of m/2k^2 with S < 0: domain (0, rs], |v| -> k at rs
        let p = p11();
        let sol = solve_steady(0.2, FluidState::new(1.0, -2.0), &p).unwrap();
        assert_eq!(sol.family(), SteadyFamily::SonicLimited);
        let rs = sol.sonic_r().unwrap();
        assert!(rs > 0.2 && rs < 0.5);
        let s = sol.eval(rs).unwrap();
        assert!((s.v.abs() - 1.0).abs() < 1e-5, "v at sonic: {}", s.v);
        assert!(sol.eval(rs * 1.1).is_err());
    }

    #[test]
    fn critical_curves_ordering_and_values() {
        for &(m, k) in &[(1.0, 1.0), (2.0, 0.5), (0.3, 1.7)] {
            let p = ModelParams::new(m, k).unwrap();
            let rc = p.critical_radius();
            // exact sonic crossing
            assert_eq!(eval_critical(CriticalBranch::PFlat, rc, &p).unwrap(), k);
            assert_eq!(eval_critical(CriticalBranch::NSharp, rc, &p).unwrap(), -k);
            // a critical-family solution evaluated at the crossing is sonic
            let v03 = eval_critical(CriticalBranch::PFlat, 0.6 * rc, &p).unwrap();
            let crit = solve_steady(0.6 * rc, FluidState::new(1.0, v03), &p).unwrap();
            assert!(matches!(crit.family(), SteadyFamily::Critical(_)));
            assert!((crit.eval(rc).unwrap().v.abs() - k).abs() < 1e-6 * k);
            // each curve satisfies S = 0
            for &r in &[0.5 * rc, 2.0 * rc] {
                for br in [
                    CriticalBranch::PFlat,
                    CriticalBranch::PSharp,
                    CriticalBranch::NFlat,
                    CriticalBranch::NSharp,
                ] {
                    let v = eval_critical(br, r, &p).unwrap();
                    assert!(s_value(r, v, &p).unwrap().abs() < 1e-10 * (1.0 + k * k));
                }
            }
            // ordering inside: N# < -k < Nb < 0 < Pb < k < P#
            let r = 0.5 * rc;
            let (pf, ps) = (
                eval_critical(CriticalBranch::PFlat, r, &p).unwrap(),
                eval_critical(CriticalBranch::PSharp, r, &p).unwrap(),
            );
            let (nf, ns) = (
                eval_critical(CriticalBranch::NFlat, r, &p).unwrap(),
                eval_critical(CriticalBranch::NSharp, r, &p).unwrap(),
            );
            assert!(ns < -k && -k < nf && nf < 0.0 && 0.0 < pf && pf < k && k < ps);
            // ordering outside: Nb < -k < N# < 0 < P# < k < Pb
            let r = 2.0 * rc;
            let (pf, ps) = (
                eval_critical(CriticalBranch::PFlat, r, &p).unwrap(),
                eval_critical(CriticalBranch::PSharp, r, &p).unwrap(),
            );
            let (nf, ns) = (
                eval_critical(CriticalBranch::NFlat, r, &p).unwrap(),
                eval_critical(CriticalBranch::NSharp, r, &p).unwrap(),
            );
            assert!(nf < -k && -k < ns && ns < 0.0 && 0.0 < ps && ps < k && k < pf);
        }
    }

    #[test]
    fn critical_slope_at_crossing() {
        // one-sided difference quotient of the accelerating positive
        // branch tends to +2k^3/m (Richardson-extrapolated)
        let p = p11();
        let rc = p.critical_radius();
        let h = 1e-4 * rc;
        let q = |h: f64| (eval_critical(CriticalBranch::PFlat, rc + h, &p).unwrap() - 1.0) / h;
        let d = 2.0 * q(0.5 * h) - q(h);
        assert!((d - 2.0).abs() < 1e-6, "slope {d}");
    }

    #[test]
    fn ode_consistency_away_from_sonic() {
        // finite-difference dv/dr against (v/r^2)(2k^2 r - m)/(v^2 - k^2)
        let p = ModelParams::new(1.4, 1.1).unwrap();
        let k2 = p.k() * p.k();
        for (r0, v0) in [(3.0, 2.4), (3.0, 0.2), (0.4, -2.8)] {
            let sol = solve_steady(r0, FluidState::new(1.0, v0), &p).unwrap();
            for i in 0..20 {
                let r = r0 * (0.9 + 0.01 * i as f64);
                if !sol.contains(r) {
                    continue;
                }
                let v = sol.eval(r).unwrap().v;
                if (v * v - k2).abs() <= 0.01 * k2 {
                    continue;
                }
                let h = 1e-6 * r;
                let vp = sol.eval(r + h).unwrap().v;
                let vm = sol.eval(r - h).unwrap().v;
                let fd = (vp - vm) / (2.0 * h);
                let exact = v / (r * r) * (2.0 * k2 * r - p.m()) / (v * v - k2);
                assert!(
                    (fd - exact).abs() <= 1e-5 * exact.abs().max(1e-3),
                    "r = {r}: fd {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn steady_shock_conjugate_pairs() {
        let p = p11();
        let s = steady_shock_conjugate(FluidState::new(1.0, 2.0), &p).unwrap();
        assert_eq!(s.rho, 4.0);
        assert_eq!(s.v, 0.5);
        // boundary and inadmissible inputs
        assert!(steady_shock_conjugate(FluidState::new(1.0, 1.0), &p).is_err());
        assert!(steady_shock_conjugate(FluidState::new(1.0, 0.5), &p).is_err());
        assert!(steady_shock_conjugate(FluidState::new(1.0, -1.5), &p).is_err());
        assert!(steady_shock_conjugate(FluidState::new(1.0, -0.5), &p).is_ok());

        let mut rng = Xorshift::new(13);
        for _ in 0..1000 {
            let k = rng.in_range(0.3, 2.5);
            let p = ModelParams::new(1.0, k).unwrap();
            let v = if rng.next_unit() < 0.5 {
                rng.in_range(1.0001 * k, 8.0 * k)
            } else {
                rng.in_range(-0.9999 * k, -0.0001 * k)
            };
            let left = FluidState::new(rng.log_range(1e-2, 1e2), v);
            let right = steady_shock_conjugate(left, &p).unwrap();
            // exact steady Rankine-Hugoniot: [rho v] = 0, [rho(k^2+v^2)] = 0
            let mass = left.rho * left.v - right.rho * right.v;
            assert!(mass.abs() <= 1e-14 * (left.rho * left.v).abs());
            let mom = left.rho * (k * k + left.v * left.v) - right.rho * (k * k + right.v * right.v);
            assert!(mom.abs() <= 1e-13 * (left.rho * (k * k + left.v * left.v)).abs());
        }
    }

    #[test]
    fn source_hook_gives_constant_solutions() {
        let p = ModelParams::without_source(1.0, 1.0).unwrap();
        let anchor = FluidState::new(2.0, 0.4);
        let sol = solve_steady(3.0, anchor, &p).unwrap();
        assert_eq!(sol.family(), SteadyFamily::GlobalSmooth);
        assert_eq!(sol.eval(0.5).unwrap(), anchor);
        assert_eq!(sol.eval(40.0).unwrap(), anchor);
    }
}
