//! Built-in initial-condition scenarios and tabulated data.

use crate::config::{ConfigError, Sections};
use wbeuler::model::{FluidState, ModelParams};
use wbeuler::steady::{solve_steady, steady_shock_conjugate};

/// Named initial-condition builder, resolved against model parameters at
/// run time.
#[derive(Debug, Clone)]
pub enum Scenario {
    /// A single smooth steady state (the well-balanced baseline).
    SteadyPreserve { anchor_r: f64, rho: f64, v: f64 },
    /// A steady state with its zero-speed conjugate jump at r_shock.
    SteadyShock { anchor_r: f64, rho: f64, v: f64, r_shock: f64 },
    /// Two steady states anchored at the jump radius.
    Riemann { r_jump: f64, left: (f64, f64), right: (f64, f64) },
    /// Three steady states with jumps at r_jump1 < r_jump2.
    Triple {
        r_jump1: f64,
        r_jump2: f64,
        alpha: (f64, f64),
        beta: (f64, f64),
        gamma: (f64, f64),
    },
    /// Steady state with a localized density bump.
    PerturbedSteady {
        anchor_r: f64,
        rho: f64,
        v: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Sampled table of (r, rho, v) rows, interpolated linearly in
    /// (ln rho, v).
    Table { rows: Vec<(f64, f64, f64)> },
}

fn pair(s: &Sections, section: &str, key: &str) -> Result<(f64, f64), ConfigError> {
    let v = s.require(section, key)?;
    let nums: Vec<f64> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse()
                .map_err(|_| ConfigError(format!("[{section}] {key}: {x:?} is not a number")))
        })
        .collect::<Result<_, _>>()?;
    if nums.len() != 2 {
        return Err(ConfigError(format!("[{section}] {key} = {v:?}: expected `rho v`")));
    }
    if !(nums[0] > 0.0) {
        return Err(ConfigError(format!("[{section}] {key}: rho must be positive")));
    }
    Ok((nums[0], nums[1]))
}

impl Scenario {
    pub fn from_sections(s: &Sections) -> Result<Self, ConfigError> {
        if let Some(path) = s.get("initial", "table") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("[initial] table = {path:?}: {e}")))?;
            return Self::table_from_csv(&text);
        }
        let name = s.require("initial", "scenario")?;
        match name {
            "steady-preserve" => {
                let (rho, v) = pair(s, "initial", "state")?;
                Ok(Scenario::SteadyPreserve { anchor_r: s.f64("initial", "anchor_r")?, rho, v })
            }
            "steady-shock" => {
                let (rho, v) = pair(s, "initial", "state")?;
                Ok(Scenario::SteadyShock {
                    anchor_r: s.f64("initial", "anchor_r")?,
                    rho,
                    v,
                    r_shock: s.f64("initial", "r_shock")?,
                })
            }
            "riemann" => Ok(Scenario::Riemann {
                r_jump: s.f64("initial", "r_jump")?,
                left: pair(s, "initial", "left")?,
                right: pair(s, "initial", "right")?,
            }),
            "triple" => {
                let r1 = s.f64("initial", "r_jump1")?;
                let r2 = s.f64("initial", "r_jump2")?;
                if !(r1 < r2) {
                    return Err(ConfigError(format!(
                        "[initial] r_jump1 = {r1} must be below r_jump2 = {r2}"
                    )));
                }
                Ok(Scenario::Triple {
                    r_jump1: r1,
                    r_jump2: r2,
                    alpha: pair(s, "initial", "alpha")?,
                    beta: pair(s, "initial", "beta")?,
                    gamma: pair(s, "initial", "gamma")?,
                })
            }
            "perturbed-steady" => {
                let (rho, v) = pair(s, "initial", "state")?;
                Ok(Scenario::PerturbedSteady {
                    anchor_r: s.f64("initial", "anchor_r")?,
                    rho,
                    v,
                    amplitude: s.f64("initial", "amplitude")?,
                    center: s.f64("initial", "center")?,
                    width: s.f64("initial", "width")?,
                })
            }
            other => Err(ConfigError(format!(
                "[initial] scenario = {other:?}: expected steady-preserve, steady-shock, \
                 riemann, triple or perturbed-steady"
            ))),
        }
    }

    pub fn table_from_csv(text: &str) -> Result<Self, ConfigError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('r') {
                continue;
            }
            let nums: Vec<f64> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse().map_err(|_| {
                        ConfigError(format!("table line {}: {x:?} is not a number", lineno + 1))
                    })
                })
                .collect::<Result<_, _>>()?;
            if nums.len() < 3 {
                return Err(ConfigError(format!(
                    "table line {}: expected `r rho v`",
                    lineno + 1
                )));
            }
            rows.push((nums[0], nums[1], nums[2]));
        }
        if rows.len() < 2 {
            return Err(ConfigError("table needs at least two rows".into()));
        }
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Scenario::Table { rows })
    }

    /// Resolves the scenario into a pointwise initial-data function.
    pub fn build(&self, p: &ModelParams) -> Result<Box<dyn Fn(f64) -> FluidState>, wbeuler::Error> {
        match self {
            Scenario::SteadyPreserve { anchor_r, rho, v } => {
                let sol = solve_steady(*anchor_r, FluidState::new(*rho, *v), p)?;
                Ok(Box::new(move |r| sol.eval(r).unwrap_or(sol.anchor_state())))
            }
            Scenario::SteadyShock { anchor_r, rho, v, r_shock } => {
                let left = solve_steady(*anchor_r, FluidState::new(*rho, *v), p)?;
                let conj = steady_shock_conjugate(left.eval(*r_shock)?, p)?;
                let right = solve_steady(*r_shock, conj, p)?;
                let rs = *r_shock;
                Ok(Box::new(move |r| {
                    if r < rs {
                        left.eval(r).unwrap_or(left.anchor_state())
                    } else {
                        right.eval(r).unwrap_or(right.anchor_state())
                    }
                }))
            }
            Scenario::Riemann { r_jump, left, right } => {
                let l = solve_steady(*r_jump, FluidState::new(left.0, left.1), p)?;
                let g = solve_steady(*r_jump, FluidState::new(right.0, right.1), p)?;
                let rj = *r_jump;
                Ok(Box::new(move |r| {
                    if r < rj {
                        l.eval(r).unwrap_or(l.anchor_state())
                    } else {
                        g.eval(r).unwrap_or(g.anchor_state())
                    }
                }))
            }
            Scenario::Triple { r_jump1, r_jump2, alpha, beta, gamma } => {
                let a = solve_steady(*r_jump1, FluidState::new(alpha.0, alpha.1), p)?;
                let b = solve_steady(*r_jump1, FluidState::new(beta.0, beta.1), p)?;
                let g = solve_steady(*r_jump2, FluidState::new(gamma.0, gamma.1), p)?;
                let (r1, r2) = (*r_jump1, *r_jump2);
                Ok(Box::new(move |r| {
                    if r < r1 {
                        a.eval(r).unwrap_or(a.anchor_state())
                    } else if r < r2 {
                        b.eval(r).unwrap_or(b.anchor_state())
                    } else {
                        g.eval(r).unwrap_or(g.anchor_state())
                    }
                }))
            }
            Scenario::PerturbedSteady { anchor_r, rho, v, amplitude, center, width } => {
                let sol = solve_steady(*anchor_r, FluidState::new(*rho, *v), p)?;
                let (a, c, w) = (*amplitude, *center, *width);
                Ok(Box::new(move |r| {
                    let s = sol.eval(r).unwrap_or(sol.anchor_state());
                    let factor = 1.0 + a * (-((r - c) / w).powi(2)).exp();
                    FluidState::new(s.rho * factor, s.v)
                }))
            }
            Scenario::Table { rows } => {
                let rows = rows.clone();
                Ok(Box::new(move |r| {
                    let n = rows.len();
                    if r <= rows[0].0 {
                        return FluidState::new(rows[0].1, rows[0].2);
                    }
                    if r >= rows[n - 1].0 {
                        return FluidState::new(rows[n - 1].1, rows[n - 1].2);
                    }
                    let i = rows.partition_point(|row| row.0 <= r) - 1;
                    let (r0, rho0, v0) = rows[i];
                    let (r1, rho1, v1) = rows[i + 1];
                    let a = if r1 > r0 { (r - r0) / (r1 - r0) } else { 0.0 };
                    let ln_rho = rho0.ln() + a * (rho1.ln() - rho0.ln());
                    FluidState::new(ln_rho.exp(), v0 + a * (v1 - v0))
                }))
            }
        }
    }
}
