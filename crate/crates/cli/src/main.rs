//! Command-line front end for the well-balanced solver.
//!
//! ```text
//! wbeuler run <config>    scenario run: snapshots + TV log + summary
//! wbeuler atlas <config>  steady-state atlas: classified curves as CSV
//! wbeuler check           built-in invariant self-tests
//! ```
//!
//! Flags: `--seed-offset N` (overrides the sampler offset), `--quiet`.
//! Exit codes: 0 success, 2 configuration error, 3 solver error.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;
use wbeuler::glimm::{self, RunOptions};
use wbeuler_cli::{atlas, check, config, output};
use wbeuler::model::ModelParams;

struct Cli {
    verb: String,
    config_path: Option<String>,
    seed_offset: Option<u64>,
    quiet: bool,
}

const USAGE: &str = "usage: wbeuler <run|atlas|check> [config] [--seed-offset N] [--quiet]";

fn parse_args(args: &[String]) -> Result<Cli, String> {
    let mut verb = None;
    let mut config_path = None;
    let mut seed_offset = None;
    let mut quiet = false;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--seed-offset" => {
                let v = it.next().ok_or("--seed-offset needs a value")?;
                seed_offset = Some(v.parse().map_err(|_| format!("bad --seed-offset {v:?}"))?);
            }
            "--quiet" => quiet = true,
            "--help" | "-h" => return Err(USAGE.to_string()),
            other if verb.is_none() => verb = Some(other.to_string()),
            other if config_path.is_none() => config_path = Some(other.to_string()),
            other => return Err(format!("unexpected argument {other:?}")),
        }
    }
    Ok(Cli {
        verb: verb.ok_or(USAGE)?,
        config_path,
        seed_offset,
        quiet,
    })
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match cli.verb.as_str() {
        "run" => cmd_run(&cli),
        "atlas" => cmd_atlas(&cli),
        "check" => cmd_check(&cli),
        other => {
            eprintln!("unknown verb {other:?}; {USAGE}");
            ExitCode::from(2)
        }
    }
}

fn read_config(cli: &Cli) -> Result<String, ExitCode> {
    let path = cli.config_path.as_ref().ok_or_else(|| {
        eprintln!("{}: missing config path", cli.verb);
        ExitCode::from(2)
    })?;
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read {path}: {e}");
        ExitCode::from(2)
    })
}

fn cmd_run(cli: &Cli) -> ExitCode {
    let text = match read_config(cli) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let mut cfg = match config::parse_run_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Some(off) = cli.seed_offset {
        cfg.seed_offset = off;
    }

    let params = match ModelParams::new(cfg.m, cfg.k) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let data = match cfg.scenario.build(&params) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("scenario setup failed: {e}");
            return ExitCode::from(3);
        }
    };

    let opts = RunOptions {
        snapshot_times: cfg.snapshot_times.clone(),
        output_points: cfg.output_points,
        ..RunOptions::default()
    };
    let started = Instant::now();
    let out = match glimm::run(&data, &cfg.grid, &params, cfg.seed_offset, &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("solver error: {e}");
            return ExitCode::from(3);
        }
    };
    let wall = started.elapsed();

    let dir = Path::new(&cfg.output_dir);
    let mut io_result = output::write_file(dir, "tv_log.csv", &output::tv_log_csv(&out.log));
    for (i, snap) in out.snapshots.iter().enumerate() {
        let r = match cfg.format {
            config::OutputFormat::Csv => output::write_file(
                dir,
                &format!("snapshot_{i:02}.csv"),
                &output::snapshot_csv(snap),
            ),
            config::OutputFormat::Json => output::write_file(
                dir,
                &format!("snapshot_{i:02}.json"),
                &output::snapshot_json(snap),
            ),
        };
        io_result = io_result.and(r);
    }
    if let Err(e) = io_result {
        eprintln!("output error: {e}");
        return ExitCode::from(3);
    }

    if !cli.quiet {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        let last = out.log.entries.last().unwrap();
        let first = &out.log.entries[0];
        println!("steps      : {}", last.n);
        println!("final time : {:.6}", last.t);
        println!("final TV   : {:.12e} (ln rho), {:.12e} (v)", last.tv_ln_rho, last.tv_v);
        println!(
            "TV drift   : {:.12e} (ln rho), {:.12e} (v)",
            (last.tv_ln_rho - first.tv_ln_rho).abs(),
            (last.tv_v - first.tv_v).abs()
        );
        println!("fitted C   : {:.6e} (per-step TV bound)", out.log.fitted_linear_c());
        println!("fitted C1  : {:.6e} (exponential envelope)", out.log.fitted_envelope_c1());
        let discs = out.state.discontinuities();
        match discs.len() {
            0 => println!("discont.   : none"),
            n if n <= 6 => println!(
                "discont.   : {} at {}",
                n,
                discs.iter().map(|d| format!("{d:.6}")).collect::<Vec<_>>().join(", ")
            ),
            n => println!(
                "discont.   : {} in [{:.6}, {:.6}]",
                n,
                discs.first().unwrap(),
                discs.last().unwrap()
            ),
        }
        println!("snapshots  : {}", out.snapshots.len());
        println!("wall time  : {:.3} s", wall.as_secs_f64());
    }
    ExitCode::SUCCESS
}

fn cmd_atlas(cli: &Cli) -> ExitCode {
    let text = match read_config(cli) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let cfg = match config::parse_atlas_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    match atlas::run_atlas(&cfg) {
        Ok(summary) => {
            if !cli.quiet {
                for line in summary {
                    println!("{line}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("atlas failed: {e}");
            ExitCode::from(3)
        }
    }
}

fn cmd_check(cli: &Cli) -> ExitCode {
    let results = check::run_checks();
    let mut all_ok = true;
    for r in &results {
        all_ok &= r.passed;
        if !cli.quiet {
            println!(
                "{} {} ({})",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail
            );
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
