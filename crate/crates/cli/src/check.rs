//! Built-in invariant self-tests for the `check` verb: a quick pass over
//! the core identities without touching the filesystem.

use wbeuler::glimm;
use wbeuler::model::{from_invariants, to_invariants, FluidState, ModelParams};
use wbeuler::steady::{solve_steady, steady_shock_conjugate};
use wbeuler::waves::{self, PhiBranch, WaveShape};

struct Lcg(u64);

impl Lcg {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn run_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = Lcg(0x00c0ffee);

    // Riemann-invariant round trip
    {
        let p = ModelParams::new(1.0, 1.3).unwrap();
        let mut worst = 0.0_f64;
        for _ in 0..500 {
            let s = FluidState::new(10f64.powf(rng.range(-4.0, 4.0)), rng.range(-5.0, 5.0));
            let b = from_invariants(to_invariants(s, &p).unwrap(), &p);
            worst = worst.max(((b.rho - s.rho) / s.rho).abs()).max((b.v - s.v).abs());
        }
        out.push(CheckResult {
            name: "invariant round trip",
            passed: worst < 1e-12,
            detail: format!("worst relative error {worst:.2e}"),
        });
    }

    // Phi product identity
    {
        let mut worst = 0.0_f64;
        for _ in 0..500 {
            let g = 10f64.powf(rng.range(-6.0, 4.0));
            let prod = waves::phi(g, PhiBranch::Plus).unwrap() * waves::phi(g, PhiBranch::Minus).unwrap();
            worst = worst.max((prod - 1.0).abs());
        }
        out.push(CheckResult {
            name: "phi product identity",
            passed: worst < 1e-12,
            detail: format!("worst deviation {worst:.2e}"),
        });
    }

    // Riemann solves: Rankine-Hugoniot residuals on all shocks
    {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let mut worst = 0.0_f64;
        for _ in 0..200 {
            let l = FluidState::new(10f64.powf(rng.range(-1.5, 1.5)), rng.range(-2.5, 2.5));
            let r = FluidState::new(10f64.powf(rng.range(-1.5, 1.5)), rng.range(-2.5, 2.5));
            let fan = waves::solve_riemann(l, r, &p).unwrap();
            if let WaveShape::Shock { sigma } = fan.wave1.shape {
                worst = worst.max(waves::rh_residual(fan.left, fan.middle, sigma, &p));
            }
            if let WaveShape::Shock { sigma } = fan.wave2.shape {
                worst = worst.max(waves::rh_residual(fan.middle, fan.right, sigma, &p));
            }
        }
        out.push(CheckResult {
            name: "riemann shocks satisfy jump conditions",
            passed: worst < 1e-10,
            detail: format!("worst residual {worst:.2e}"),
        });
    }

    // Steady conservation residuals
    {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let mut worst = 0.0_f64;
        let mut done = 0;
        while done < 20 {
            let r0 = 10f64.powf(rng.range(-0.5, 0.8));
            let v0 = rng.range(-3.0, 3.0);
            if v0.abs() < 0.05 {
                continue;
            }
            let Ok(sol) = solve_steady(r0, FluidState::new(1.0, v0), &p) else {
                continue;
            };
            for i in 0..30 {
                let r = r0 * (0.6 + 0.03 * i as f64);
                if sol.contains(r) {
                    if let Ok((a, b)) = sol.residuals(r) {
                        worst = worst.max(a).max(b);
                    }
                }
            }
            done += 1;
        }
        out.push(CheckResult {
            name: "steady conservation relations",
            passed: worst < 1e-10,
            detail: format!("worst residual {worst:.2e}"),
        });
    }

    // Steady-shock conjugate identities
    {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let mut worst = 0.0_f64;
        for _ in 0..500 {
            let v = if rng.next_unit() < 0.5 {
                rng.range(1.001, 6.0)
            } else {
                rng.range(-0.999, -0.001)
            };
            let l = FluidState::new(10f64.powf(rng.range(-1.0, 1.0)), v);
            let r = steady_shock_conjugate(l, &p).unwrap();
            worst = worst.max((l.v * r.v - 1.0).abs());
            worst = worst.max((r.rho / l.rho - l.v * l.v).abs() / (l.v * l.v));
        }
        out.push(CheckResult {
            name: "steady shock conjugate identities",
            passed: worst < 1e-13,
            detail: format!("worst deviation {worst:.2e}"),
        });
    }

    // Well-balanced stepping over a short run
    {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let base = solve_steady(2.0, FluidState::new(1.0, 3.0), &p).unwrap();
        let grid = glimm::GridSpec { r_min: 1.0, r_max: 3.0, dr: 0.1, cfl: 0.45, t_end: 1e9 };
        let opts = glimm::RunOptions::default();
        let mut state = glimm::init_approximation(&|r| base.eval(r).unwrap(), &grid, &p).unwrap();
        for _ in 0..10 {
            state = glimm::step(&state, &grid, &p, &opts).unwrap();
        }
        let mut worst = 0.0_f64;
        for i in 0..=100 {
            let r = 1.0 + 2.0 * i as f64 / 100.0;
            let a = state.eval_at(r).unwrap();
            let b = base.eval(r).unwrap();
            worst = worst.max((a.rho.ln() - b.rho.ln()).abs()).max((a.v - b.v).abs());
        }
        out.push(CheckResult {
            name: "well-balanced steady preservation (10 steps)",
            passed: worst < 1e-10,
            detail: format!("sup-norm drift {worst:.2e}"),
        });
    }

    out
}
