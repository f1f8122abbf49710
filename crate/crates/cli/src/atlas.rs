//! Steady-state atlas: tabulates classified steady solutions and, on
//! request, the four critical curves.

use crate::config::AtlasConfig;
use crate::output::write_file;
use std::fmt::Write as _;
use std::path::Path;
use wbeuler::model::{FluidState, ModelParams};
use wbeuler::steady::{eval_critical, solve_steady, CriticalBranch, SteadyFamily};

fn family_name(f: SteadyFamily) -> String {
    match f {
        SteadyFamily::GlobalSmooth => "global-smooth".to_string(),
        SteadyFamily::SonicLimited => "sonic-limited".to_string(),
        SteadyFamily::Critical(b) => format!("critical-{}", branch_name(b)),
    }
}

fn branch_name(b: CriticalBranch) -> &'static str {
    match b {
        CriticalBranch::PFlat => "p-flat",
        CriticalBranch::PSharp => "p-sharp",
        CriticalBranch::NFlat => "n-flat",
        CriticalBranch::NSharp => "n-sharp",
    }
}

/// Runs the atlas: one CSV per anchor plus an index, and optional
/// critical-curve CSVs. Returns human-readable summary lines.
pub fn run_atlas(cfg: &AtlasConfig) -> Result<Vec<String>, Box<dyn std::error::Error>> {
    let p = ModelParams::new(cfg.m, cfg.k)?;
    let dir = Path::new(&cfg.output_dir);
    let mut summary = Vec::new();
    let mut index = String::from("anchor,r0,rho0,v0,family,sonic_r\n");

    for (idx, &(r0, rho0, v0)) in cfg.anchors.iter().enumerate() {
        let sol = solve_steady(r0, FluidState::new(rho0, v0), &p)?;
        let fam = family_name(sol.family());
        let sonic = sol
            .sonic_r()
            .map(|r| format!("{r:.16e}"))
            .unwrap_or_else(|| "-".to_string());
        let _ = writeln!(index, "{idx},{r0:.16e},{rho0:.16e},{v0:.16e},{fam},{sonic}");
        summary.push(match sol.sonic_r() {
            Some(rs) => format!("anchor {idx}: {fam}, sonic radius {rs:.12}"),
            None => format!("anchor {idx}: {fam}"),
        });

        let (lo, hi) = sol.domain();
        let lo = lo.max(cfg.r_lo);
        let hi = hi.min(cfg.r_hi);
        let mut csv = String::from("r,rho,v\n");
        let n = cfg.points.max(2);
        for j in 0..n {
            let r = lo + (hi - lo) * j as f64 / (n - 1) as f64;
            if !sol.contains(r) {
                continue;
            }
            if let Ok(s) = sol.eval(r) {
                let _ = writeln!(csv, "{r:.16e},{:.16e},{:.16e}", s.rho, s.v);
            }
        }
        write_file(dir, &format!("atlas_anchor_{idx:02}.csv"), &csv)?;
    }
    write_file(dir, "atlas_index.csv", &index)?;

    if cfg.export_critical {
        for b in [
            CriticalBranch::PFlat,
            CriticalBranch::PSharp,
            CriticalBranch::NFlat,
            CriticalBranch::NSharp,
        ] {
            let mut csv = String::from("r,v\n");
            let n = cfg.points.max(2);
            for j in 0..n {
                let r = cfg.r_lo + (cfg.r_hi - cfg.r_lo) * j as f64 / (n - 1) as f64;
                let v = eval_critical(b, r, &p)?;
                let _ = writeln!(csv, "{r:.16e},{v:.16e}");
            }
            write_file(dir, &format!("atlas_critical_{}.csv", branch_name(b)), &csv)?;
        }
        summary.push(format!(
            "critical curves exported through (m/2k^2, +-k) = ({:.12}, +-{})",
            p.critical_radius(),
            cfg.k
        ));
    }
    Ok(summary)
}
