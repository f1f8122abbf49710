//! Frozen-baseline regressions for quantities the theory only bounds
//! qualitatively: the total-variation growth constant of a fixed
//! generalized Riemann problem and the post-collision state of a fixed
//! shock-shock interaction. The baselines were computed once with the
//! released solver configuration; drifting outside the stated bands means
//! the construction changed behavior, not merely noise.

use wbeuler::grp::solve_grp;
use wbeuler::model::{FluidState, ModelParams};
use wbeuler::steady::solve_steady;
use wbeuler::triple::{solve_triple, InteractionResolution};
use wbeuler::waves::{shock1, shock2};

#[test]
fn grp_tv_evolution_stays_linear_with_stable_constant() {
    let p = ModelParams::new(1.0, 1.0).unwrap();
    let left = solve_steady(5.0, FluidState::new(1.0, -3.0), &p).unwrap();
    let right = solve_steady(5.0, FluidState::new(0.5, -2.2), &p).unwrap();
    let horizon = 0.25; // within 0.1 * r0 / k
    let g = solve_grp(&left, &right, 5.0, horizon, &p).unwrap();
    let (lo, hi) = (3.2, 5.8);
    let tv = |t: f64| -> f64 {
        let n = 6000;
        let mut acc = 0.0;
        let mut prev = g.eval(t, lo).unwrap().rho.ln();
        for i in 1..=n {
            let r = lo + (hi - lo) * i as f64 / n as f64;
            let cur = g.eval(t, r).unwrap().rho.ln();
            acc += (cur - prev).abs();
            prev = cur;
        }
        acc
    };
    let tv0 = tv(1e-6);
    assert!((tv0 - 2.057408485903416).abs() < 1e-4, "TV(0+) = {tv0}");
    // TV(t) <= TV(0+) (1 + C t) with a finite fitted C
    let mut c_fit = 0.0_f64;
    for i in 1..=8 {
        let t = horizon * i as f64 / 8.0;
        c_fit = c_fit.max((tv(t) / tv0 - 1.0) / t);
    }
    assert!(c_fit.is_finite() && c_fit > 0.0);
    // stored baseline: C = 1.6351
    assert!(
        (c_fit - 1.635141919620914).abs() < 0.2,
        "fitted C drifted to {c_fit}"
    );
}

#[test]
fn shock_shock_collision_matches_stored_state() {
    let p = ModelParams::new(1.0, 1.0).unwrap();
    let b_state = FluidState::new(1.0, 2.0);
    let (a_state, _) = shock2(1.6, b_state, &p).unwrap();
    let (c_state, _) = shock1(1.6, b_state, &p).unwrap();
    let alpha = solve_steady(4.0, a_state, &p).unwrap();
    let beta = solve_steady(4.0, b_state, &p).unwrap();
    let gamma = solve_steady(4.2, c_state, &p).unwrap();
    let ts = solve_triple(&alpha, &beta, &gamma, 4.0, 4.2, 0.4, &p).unwrap();
    let t_f = ts.t_first().unwrap();
    let res = ts.resolution().unwrap();
    // stored baseline, first computed after validating the jump and
    // entropy conditions on the resolved problem
    assert!((t_f - 0.078651908947609).abs() < 1e-8 * t_f, "t_f = {t_f}");
    assert!(
        (res.r_collision() - 4.258654380532853).abs() < 1e-8 * 4.26,
        "r_c = {}",
        res.r_collision()
    );
    let InteractionResolution::ShockShock { grp, .. } = res else {
        panic!("expected a shock-shock resolution");
    };
    assert!(grp.lax_holds(1e-9).unwrap());
    let mid = grp.middle().anchor_state();
    assert!((mid.rho - 2.349115193473009).abs() < 1e-8 * mid.rho, "rho = {}", mid.rho);
    assert!((mid.v - 1.990213655347468).abs() < 1e-8 * mid.v.abs(), "v = {}", mid.v);
    // the jump condition holds exactly at the collision instant and
    // drifts linearly afterwards; check it at a short horizon
    let short = solve_grp(grp.left(), grp.right(), res.r_collision(), 1e-7, &p).unwrap();
    assert!(short.max_shock_rh_residual().unwrap() < 1e-7);
}
