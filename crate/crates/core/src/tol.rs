//! Numerical tolerances used across the crate, in one place.

/// Convergence threshold for the Riemann middle-state solve, measured on
/// the velocity mismatch of the two composite wave curves (invariant
/// coordinates differ by exactly this mismatch).
pub const RIEMANN: f64 = 1e-12;

/// Iteration cap for every safeguarded Newton/bisection solve.
pub const MAX_ITER: usize = 200;

/// Below this jump size (in ln rho and in v) a wave is classified Null.
pub const NULL_WAVE: f64 = 1e-13;

/// Rankine-Hugoniot residual allowed on any shock, relative to the local
/// flux scale.
pub const RANKINE_HUGONIOT: f64 = 1e-10;

/// Residual allowed on the two steady-state conservation relations.
pub const STEADY_RESIDUAL: f64 = 1e-10;

/// |S(r0, v0)| below this (times max(1, |G0|)) classifies an anchor as
/// lying on the critical curve; must sit well below solver tolerances.
pub const CRITICAL_BAND: f64 = 1e-11;

/// Relative tolerance on sonic radii (bisection on G(., k) - G0).
pub const SONIC_RADIUS: f64 = 1e-12;

/// Within |(|v| - k)| < NEAR_SONIC * k the steady velocity solve switches
/// from Newton to plain bisection (dG/dv vanishes at v = +-k).
pub const NEAR_SONIC: f64 = 1e-6;

/// Target local error of wave-boundary-curve integration, relative to r0.
pub const CURVE_LOCAL_ERROR: f64 = 1e-10;

/// Velocities with |v| < V_ZERO * k are treated as the unsupported v = 0
/// case when anchoring steady states.
pub const V_ZERO: f64 = 1e-10;
