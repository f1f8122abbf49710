//! With the source switched off, the driver must converge to the exact
//! self-similar Riemann solution: a true-reference convergence check of
//! the whole scheme (initialization, local solves, sampling, rebuild).

use wbeuler::glimm::{self, GridSpec, RunOptions};
use wbeuler::model::{FluidState, ModelParams};
use wbeuler::waves;

#[test]
fn zero_source_driver_converges_to_exact_riemann_solution() {
    let p = ModelParams::without_source(1.0, 1.0).unwrap();
    let (l, r) = (FluidState::new(1.0, 0.6), FluidState::new(0.4, -0.2));
    let data = move |x: f64| if x < 2.5 { l } else { r };
    let fan = waves::solve_riemann(l, r, &p).unwrap();

    // seed-averaged L1 error against the exact solution at t = 0.3
    let seeds: Vec<u64> = (0..8).map(|i| i * 37).collect();
    let err_for = |dr: f64| -> f64 {
        let mut acc = 0.0;
        for &seed in &seeds {
            let grid = GridSpec { r_min: 1.0, r_max: 4.0, dr, cfl: 0.45, t_end: 0.3 };
            let opts = RunOptions {
                snapshot_times: vec![0.3],
                output_points: 3001,
                ..RunOptions::default()
            };
            let out = glimm::run(&data, &grid, &p, seed, &opts).unwrap();
            let snap = &out.snapshots[0];
            let h = snap.rows[1][0] - snap.rows[0][0];
            let mut e = 0.0;
            for row in &snap.rows {
                let exact = waves::sample_fan(&fan, (row[0] - 2.5) / 0.3, &p);
                e += h * ((row[1].ln() - exact.rho.ln()).abs() + (row[2] - exact.v).abs());
            }
            acc += e / seeds.len() as f64;
        }
        acc
    };
    let errs: Vec<f64> = [0.08, 0.04, 0.02, 0.01].iter().map(|&dr| err_for(dr)).collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "errors not decreasing: {errs:?}");
    }
    assert!(
        errs[3] < errs[0] / 8.0,
        "insufficient reduction over three refinements: {errs:?}"
    );
}
