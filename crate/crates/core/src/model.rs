//! States, model parameters, characteristic quantities and the flux /
//! source pair of the isothermal system.
//!
//! The unknown is carried as primitive `(rho, v)` throughout; the
//! conservative pair `(rho, rho v)` appears only inside flux and
//! Rankine-Hugoniot arithmetic. Density comparisons are done on `ln rho`
//! wherever possible, matching the total-variation functional the scheme
//! controls.

use crate::error::{Error, Result};

/// Central mass `m` and constant sound speed `k`. Units are abstract:
/// fixing `m` and `k` fixes all scales of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    m: f64,
    k: f64,
    source_on: bool,
}

impl ModelParams {
    pub fn new(m: f64, k: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter { name: "m", value: m });
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter { name: "k", value: k });
        }
        Ok(Self { m, k, source_on: true })
    }

    /// Same parameters with the geometric source term switched off, so the
    /// system degenerates to the homogeneous isothermal equations and
    /// steady states degenerate to constants. Test hook: lets the
    /// generalized machinery be checked against the self-similar solver.
    pub fn without_source(m: f64, k: f64) -> Result<Self> {
        let mut p = Self::new(m, k)?;
        p.source_on = false;
        Ok(p)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn has_source(&self) -> bool {
        self.source_on
    }

    /// Radius m / (2 k^2) where the critical steady curves cross the sonic
    /// lines v = +-k.
    pub fn critical_radius(&self) -> f64 {
        self.m / (2.0 * self.k * self.k)
    }
}

/// Pointwise fluid state: density rho > 0 and signed velocity v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidState {
    pub rho: f64,
    pub v: f64,
}

impl FluidState {
    pub fn new(rho: f64, v: f64) -> Self {
        Self { rho, v }
    }

    pub fn is_valid(&self) -> bool {
        self.rho > 0.0 && self.rho.is_finite() && self.v.is_finite()
    }
}

/// Riemann-invariant coordinates: w = v + k ln rho, z = v - k ln rho.
/// w is the 1-family invariant (constant across 1-rarefactions), z the
/// 2-family invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantPoint {
    pub w: f64,
    pub z: f64,
}

/// Characteristic speeds (lambda, mu) = (v - k, v + k). Strict
/// hyperbolicity: mu - lambda = 2k > 0 for every state.
pub fn eigenvalues(s: FluidState, p: &ModelParams) -> (f64, f64) {
    (s.v - p.k, s.v + p.k)
}

pub fn to_invariants(s: FluidState, p: &ModelParams) -> Result<InvariantPoint> {
    if !(s.rho > 0.0) {
        return Err(Error::NonPositiveDensity { rho: s.rho });
    }
    let ln_rho = s.rho.ln();
    Ok(InvariantPoint {
        w: s.v + p.k * ln_rho,
        z: s.v - p.k * ln_rho,
    })
}

/// Inverse of [`to_invariants`]; total on the (w, z) plane. The returned
/// density is clamped to the smallest positive normal so the no-vacuum
/// closure holds even when exp underflows.
pub fn from_invariants(q: InvariantPoint, p: &ModelParams) -> FluidState {
    let rho = ((q.w - q.z) / (2.0 * p.k)).exp().max(f64::MIN_POSITIVE);
    FluidState {
        rho,
        v: 0.5 * (q.w + q.z),
    }
}

/// Flux F(U) = (rho v, rho (v^2 + k^2)).
pub fn flux(s: FluidState, p: &ModelParams) -> [f64; 2] {
    [s.rho * s.v, s.rho * (s.v * s.v + p.k * p.k)]
}

/// Geometric source S(r, U) = (-(2/r) rho v, -(2/r) rho v^2 - (m/r^2) rho).
pub fn source(r: f64, s: FluidState, p: &ModelParams) -> Result<[f64; 2]> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    if !p.source_on {
        return Ok([0.0, 0.0]);
    }
    let a = -2.0 / r * s.rho * s.v;
    let b = -2.0 / r * s.rho * s.v * s.v - p.m / (r * r) * s.rho;
    Ok([a, b])
}

/// Source components projected on the invariant coordinates:
/// along mu-characteristics dw/dt = S_w, along lambda-characteristics
/// dz/dt = S_z, with
/// S_w = -2 k v / r - m / r^2 and S_z = +2 k v / r - m / r^2.
pub(crate) fn invariant_source(r: f64, v: f64, p: &ModelParams) -> (f64, f64) {
    if !p.source_on {
        return (0.0, 0.0);
    }
    let grav = p.m / (r * r);
    let geo = 2.0 * p.k * v / r;
    (-geo - grav, geo - grav)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: f64, k: f64) -> ModelParams {
        ModelParams::new(m, k).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -2.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
        let p = params(1.0, 1.0);
        assert!(p.critical_radius() > 0.0);
        assert_eq!(p.critical_radius(), 0.5);
    }

    #[test]
    fn eigenvalues_split_by_two_k() {
        let p = params(1.0, 1.0);
        assert_eq!(eigenvalues(FluidState::new(1.0, 0.0), &p), (-1.0, 1.0));
        assert_eq!(eigenvalues(FluidState::new(3.0, 2.0), &p), (1.0, 3.0));
        let p2 = params(0.7, 2.5);
        for &v in &[-3.0, 0.0, 17.5] {
            let (l, mu) = eigenvalues(FluidState::new(0.3, v), &p2);
            assert!((mu - l - 2.0 * p2.k()).abs() < 1e-15);
            assert!(l < mu);
        }
    }

    #[test]
    fn invariants_direct_values() {
        let p = params(1.0, 1.0);
        let q = to_invariants(FluidState::new(1.0, 2.0), &p).unwrap();
        assert_eq!((q.w, q.z), (2.0, 2.0));
        let q = to_invariants(FluidState::new(std::f64::consts::E, 0.0), &p).unwrap();
        assert!((q.w - 1.0).abs() < 1e-15);
        assert!((q.z + 1.0).abs() < 1e-15);
        // direct arithmetic check at k = 2, rho = e^2, v = 1
        let p2 = params(1.0, 2.0);
        let q = to_invariants(FluidState::new(std::f64::consts::E.powi(2), 1.0), &p2).unwrap();
        assert!((q.w - 5.0).abs() < 1e-12);
        assert!((q.z + 3.0).abs() < 1e-12);
    }

    #[test]
    fn invariants_reject_vacuum() {
        let p = params(1.0, 1.0);
        assert!(to_invariants(FluidState::new(0.0, 1.0), &p).is_err());
        assert!(to_invariants(FluidState::new(-2.0, 1.0), &p).is_err());
    }

    #[test]
    fn invariant_round_trip() {
        // randomized round trip over rho in [1e-6, 1e6], |v| <= 1e3
        let mut rng = crate::test_rng::Xorshift::new(0x5eed_0001);
        for _ in 0..2000 {
            let k = 0.25 + 3.0 * rng.next_unit();
            let p = params(1.0, k);
            let rho = 10f64.powf(-6.0 + 12.0 * rng.next_unit());
            let v = 2e3 * (rng.next_unit() - 0.5);
            let s = FluidState::new(rho, v);
            let back = from_invariants(to_invariants(s, &p).unwrap(), &p);
            assert!(
                (back.rho - rho).abs() <= 1e-12 * rho,
                "rho {rho} -> {}",
                back.rho
            );
            assert!((back.v - v).abs() <= 1e-12 * v.abs().max(1.0));
            assert!(back.rho > 0.0);
        }
    }

    #[test]
    fn from_invariants_never_returns_vacuum() {
        let p = params(1.0, 1.0);
        let s = from_invariants(InvariantPoint { w: -2000.0, z: 2000.0 }, &p);
        assert!(s.rho > 0.0);
    }

    #[test]
    fn flux_values() {
        let p = params(1.0, 1.0);
        assert_eq!(flux(FluidState::new(1.0, 0.0), &p), [0.0, 1.0]);
        assert_eq!(flux(FluidState::new(2.0, 3.0), &p), [6.0, 20.0]);
        // f2 >= rho k^2 always
        let mut rng = crate::test_rng::Xorshift::new(0x5eed_0002);
        for _ in 0..200 {
            let s = FluidState::new(rng.next_unit() * 10.0 + 1e-9, 20.0 * (rng.next_unit() - 0.5));
            assert!(flux(s, &p)[1] >= s.rho * p.k() * p.k());
        }
    }

    #[test]
    fn source_values() {
        let p = params(1.0, 1.0);
        // v = 0: mass source vanishes, momentum source is -m rho / r^2
        let s = source(2.0, FluidState::new(3.0, 0.0), &p).unwrap();
        assert_eq!(s[0], 0.0);
        assert_eq!(s[1], -1.0 / 4.0 * 3.0);
        // direct substitution
        let s = source(1.0, FluidState::new(1.0, 1.0), &p).unwrap();
        assert_eq!(s, [-2.0, -3.0]);
        // momentum source strictly negative for rho > 0
        let mut rng = crate::test_rng::Xorshift::new(0x5eed_0003);
        for _ in 0..200 {
            let r = 0.1 + 10.0 * rng.next_unit();
            let st = FluidState::new(0.01 + rng.next_unit(), 10.0 * (rng.next_unit() - 0.5));
            assert!(source(r, st, &p).unwrap()[1] < 0.0);
        }
        assert!(source(0.0, FluidState::new(1.0, 1.0), &p).is_err());
        assert!(source(-1.0, FluidState::new(1.0, 1.0), &p).is_err());
    }

    #[test]
    fn source_hook_disables_both_components() {
        let p = ModelParams::without_source(1.0, 1.0).unwrap();
        assert_eq!(source(1.0, FluidState::new(1.0, 1.0), &p).unwrap(), [0.0, 0.0]);
        assert_eq!(invariant_source(1.0, 1.0, &p), (0.0, 0.0));
    }

    #[test]
    fn invariant_source_matches_projection() {
        // S_w = l2 . S' and S_z = l1 . S' with l1 = (-k, 1), l2 = (k, 1)
        // applied to the primitive-source pair (-2v/r, -m/r^2).
        let p = params(1.3, 0.8);
        let (r, v) = (2.7, -1.9);
        let s1 = -2.0 * v / r;
        let s2 = -p.m() / (r * r);
        let (sw, sz) = invariant_source(r, v, &p);
        assert!((sw - (p.k() * s1 + s2)).abs() < 1e-15);
        assert!((sz - (-p.k() * s1 + s2)).abs() < 1e-15);
    }
}
