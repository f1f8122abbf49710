//! Exact-solver machinery for the isothermal Euler equations with a
//! Schwarzschild-type geometric source term,
//!
//! ```text
//!   d/dt (rho)   + d/dr (rho v)            = -(2/r) rho v
//!   d/dt (rho v) + d/dr (rho (v^2 + k^2))  = -(2/r) rho v^2 - (m/r^2) rho
//! ```
//!
//! posed on r > 0, with constant sound speed `k` and central mass `m`.
//! The crate provides, bottom up:
//!
//! * [`model`]: states, Riemann invariants, flux and source;
//! * [`waves`]: elementary wave curves and the exact solver for the
//!   standard (homogeneous) Riemann problem;
//! * [`steady`]: families of steady-state solutions, critical curves,
//!   sonic radii and steady shocks;
//! * [`grp`]: the generalized Riemann problem: two steady states joined
//!   through exact wave structures that respect the source term;
//! * [`triple`]: three steady states with two jumps, including the first
//!   wave interaction and its resolution;
//! * [`glimm`]: the well-balanced random-choice (Glimm) scheme driving
//!   all of the above, with total-variation diagnostics.
//!
//! All floating-point work is `f64`. Everything is deterministic: the
//! sampling sequence is a binary van der Corput sequence and no operation
//! depends on iteration order of unordered containers. Solver objects are
//! immutable after construction and safe to share across threads.
//!
//! ```
//! use wbeuler::glimm::{self, GridSpec, RunOptions};
//! use wbeuler::model::{FluidState, ModelParams};
//! use wbeuler::steady::solve_steady;
//!
//! // a smooth supersonic equilibrium is preserved by the scheme
//! let p = ModelParams::new(1.0, 1.0).unwrap();
//! let base = solve_steady(2.0, FluidState::new(1.0, 3.0), &p).unwrap();
//! let grid = GridSpec { r_min: 1.0, r_max: 3.0, dr: 0.1, cfl: 0.45, t_end: 0.2 };
//! let out = glimm::run(
//!     &|r| base.eval(r).unwrap(),
//!     &grid,
//!     &p,
//!     0,
//!     &RunOptions::default(),
//! ).unwrap();
//! let s = out.state.eval_at(2.5).unwrap();
//! let exact = base.eval(2.5).unwrap();
//! assert!((s.rho - exact.rho).abs() < 1e-10 * exact.rho);
//! ```

pub mod error;
pub mod glimm;
pub mod grp;
pub mod model;
pub mod roots;
pub mod steady;
pub mod tol;
pub mod triple;
pub mod waves;

#[cfg(test)]
pub(crate) mod test_rng;

pub use error::{Error, Result};
pub use model::{FluidState, InvariantPoint, ModelParams};
pub use steady::{SteadyFamily, SteadySolution};
pub use waves::WaveFan;
