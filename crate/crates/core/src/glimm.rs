//! The well-balanced random-choice (Glimm) scheme.
//!
//! The approximate solution is a piecewise-steady field: steady-state
//! segments tiling [r_min, r_max] separated by discontinuities that sit
//! near grid nodes of alternating parity. Each step solves the local
//! generalized (or triple, when discontinuities crowd within 2 dr)
//! Riemann problem around every discontinuity, advances by a CFL-limited
//! dt, samples each solution at one van der Corput point per cell, and
//! re-anchors steady segments through the sampled values. Cells without a
//! discontinuity keep their segment object untouched, so exact steady
//! states are preserved to solver tolerance (the well-balanced property).
//!
//! Steady states that die at a sonic point inside their cell are spliced:
//! the uncovered piece is taken from the neighbor anchor when its domain
//! reaches, otherwise from the critical-curve solution with matching
//! velocity signs; the cell's discontinuity then sits at the sonic
//! radius. Outside [r_min, r_max] the boundary segments extend as steady
//! solutions (trace-constant with a logged warning when their domain ends
//! first).
//!
//! The per-cell solves of one step are independent and could run in
//! parallel; this implementation keeps them sequential (one sampling draw
//! per step, a left-to-right rebuild), which makes runs reproducible
//! bit-for-bit for a given configuration and sampler offset.

use crate::error::{Error, Result};
use crate::grp::{solve_grp_with, GrpConfig, GrpSolution};
use crate::model::{to_invariants, FluidState, ModelParams};
use crate::steady::{eval_critical, solve_steady, CriticalBranch, SteadyFamily, SteadySolution};
use crate::tol;
use crate::triple::{solve_triple_with, TripleSolution};

/// Grid geometry and stepping control.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    /// Requested cell width; the effective width divides the span into an
    /// even number of cells.
    pub dr: f64,
    /// CFL fraction in (0, 1); dt = cfl * dr / max(|lambda|, |mu|).
    pub cfl: f64,
    pub t_end: f64,
}

impl GridSpec {
    fn validate(&self) -> Result<(usize, f64)> {
        if !(self.r_min > 0.0) || !(self.r_max > self.r_min) {
            return Err(Error::InvalidParameter { name: "r_min/r_max", value: self.r_min });
        }
        if !(self.dr > 0.0) || self.dr >= (self.r_max - self.r_min) {
            return Err(Error::InvalidParameter { name: "dr", value: self.dr });
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidParameter { name: "cfl", value: self.cfl });
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::InvalidParameter { name: "t_end", value: self.t_end });
        }
        let span = self.r_max - self.r_min;
        let mut cells = (span / self.dr).round() as usize;
        if cells % 2 == 1 {
            cells += 1;
        }
        if cells < 4 {
            cells = 4;
        }
        Ok((cells, span / cells as f64))
    }
}

/// Binary van der Corput radical inverse of n (n >= 1), in (0, 1).
pub fn van_der_corput(mut n: u64) -> f64 {
    let mut x = 0.0;
    let mut base = 0.5;
    while n > 0 {
        if n & 1 == 1 {
            x += base;
        }
        base *= 0.5;
        n >>= 1;
    }
    x
}

/// Equidistributed sampling sequence on (-1, 1): theta_n = 2 vdc(n) - 1.
/// The offset shifts the starting index for reproducible run variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    index: u64,
}

impl Sampler {
    pub fn new(offset: u64) -> Self {
        Sampler { index: offset }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Next theta in (-1, 1); one draw per time step, shared by all cells.
    pub fn next_theta(&mut self) -> f64 {
        self.index += 1;
        2.0 * van_der_corput(self.index) - 1.0
    }
}

/// Sampled radius for the cell around node `i`: r_min + (theta + i) dr,
/// clamped into the grid.
pub fn sample_point(theta: f64, node: usize, r_min: f64, r_max: f64, dr: f64) -> f64 {
    (r_min + (theta + node as f64) * dr).clamp(r_min, r_max)
}

/// One steady piece of the approximate solution.
#[derive(Debug, Clone)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    sol: SteadySolution,
    serial: u64,
}

impl Segment {
    pub fn solution(&self) -> &SteadySolution {
        &self.sol
    }
}

/// Per-step diagnostics record.
#[derive(Debug, Clone, Copy)]
pub struct TvEntry {
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub tv_ln_rho: f64,
    pub tv_v: f64,
    pub v_max: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

/// Total-variation log over a run.
#[derive(Debug, Clone, Default)]
pub struct TvLog {
    pub entries: Vec<TvEntry>,
}

impl TvLog {
    /// Smallest C such that every per-step increment satisfies
    /// TV(t_{n+1}) - TV(t_n) <= C dt (0 when TV never grows).
    pub fn fitted_linear_c(&self) -> f64 {
        let mut c = 0.0_f64;
        for w in self.entries.windows(2) {
            let dt = w[1].t - w[0].t;
            if dt > 0.0 {
                c = c.max((w[1].tv_ln_rho - w[0].tv_ln_rho) / dt);
            }
        }
        c
    }

    /// Smallest C1 such that TV(t) <= TV(0) exp(C1 t) along the whole log.
    pub fn fitted_envelope_c1(&self) -> f64 {
        let tv0 = match self.entries.first() {
            Some(e) if e.tv_ln_rho > 0.0 => e.tv_ln_rho,
            _ => return 0.0,
        };
        let mut c1 = 0.0_f64;
        for e in self.entries.iter().skip(1) {
            if e.t > 0.0 {
                c1 = c1.max((e.tv_ln_rho / tv0).ln() / e.t);
            }
        }
        c1
    }
}

/// Field selector for [`total_variation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvField {
    LnRho,
    Velocity,
}

/// Snapshot of the piecewise-steady representation on an output grid.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    /// (r, rho, v, w, z) rows with strictly increasing r.
    pub rows: Vec<[f64; 5]>,
    pub discontinuities: Vec<f64>,
}

/// Driver tuning knobs.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub snapshot_times: Vec<f64>,
    /// Points per snapshot row set.
    pub output_points: usize,
    /// Sample points per segment when measuring total variation.
    pub tv_samples_per_segment: usize,
    /// Resolution of the per-cell generalized solves.
    pub grp: GrpConfig,
    /// Hard cap on the number of time steps.
    pub max_steps: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            snapshot_times: Vec::new(),
            output_points: 800,
            tv_samples_per_segment: 8,
            grp: GrpConfig {
                n_char: 16,
                n_time: 16,
                t_start_frac: 1e-3,
                curve_substeps: 64,
            },
            max_steps: 2_000_000,
        }
    }
}

/// One time level of the scheme.
#[derive(Debug, Clone)]
pub struct GlimmState {
    t: f64,
    n: usize,
    r_min: f64,
    r_max: f64,
    dr: f64,
    cells: usize,
    segments: Vec<Segment>,
    sampler: Sampler,
    next_serial: u64,
    warnings: Vec<String>,
}

impl GlimmState {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn step_index(&self) -> usize {
        self.n
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    /// Warnings accumulated so far (boundary fallbacks, deferred pairings).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    fn node_radius(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.dr
    }

    pub fn segment_index(&self, r: f64) -> usize {
        let mut lo = 0;
        let mut hi = self.segments.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.segments[mid].hi < r {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Evaluates the piecewise-steady field at radius r. At the outermost
    /// segments, radii beyond a steady solution's domain fall back to the
    /// trace at the domain edge.
    pub fn eval_at(&self, r: f64) -> Result<FluidState> {
        let idx = self.segment_index(r.clamp(self.r_min, self.r_max));
        let seg = &self.segments[idx];
        match seg.sol.eval(r) {
            Ok(s) => Ok(s),
            Err(Error::OutsideDomain { lo, hi, .. })
                if idx == 0 || idx + 1 == self.segments.len() =>
            {
                let edge = if r < lo { lo } else { hi.min(self.r_max) };
                seg.sol.eval(edge)
            }
            Err(e) => Err(e),
        }
    }

    /// Interior discontinuity positions (segment boundaries carrying a
    /// nonzero trace jump).
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for w in self.segments.windows(2) {
            let r = w[0].hi;
            if let (Ok(a), Ok(b)) = (w[0].sol.eval(r), w[1].sol.eval(r)) {
                if jump_is_real(a, b) {
                    out.push(r);
                }
            } else {
                out.push(r);
            }
        }
        out
    }
}

/// The boundary segments extend outward as steady solutions; if a domain
/// ends inside the grid instead, evaluation falls back to the
/// trace-constant extension, which deserves a note in the run log.
fn warn_boundary_coverage(segments: &[Segment], r_min: f64, r_max: f64, warnings: &mut Vec<String>) {
    if let Some(first) = segments.first() {
        if !first.sol.contains(r_min) {
            warnings.push(format!(
                "inner boundary: steady domain ends above r_min = {r_min}; using the \
                 trace-constant extension"
            ));
        }
    }
    if let Some(last) = segments.last() {
        if !last.sol.contains(r_max) {
            warnings.push(format!(
                "outer boundary: steady domain ends below r_max = {r_max}; using the \
                 trace-constant extension"
            ));
        }
    }
}

fn jump_is_real(a: FluidState, b: FluidState) -> bool {
    (a.rho.ln() - b.rho.ln()).abs() > tol::NULL_WAVE
        || (a.v - b.v).abs() > tol::NULL_WAVE * (1.0 + a.v.abs().max(b.v.abs()))
}

/// Builds the critical-curve splice solution for a dying steady state:
/// the branch is selected by the dying state's velocity signs on its
/// anchor side, and the density scale pins the mass flux of the dying
/// solution at the splice radius.
fn critical_splice(dying: &SteadySolution, splice_r: f64, p: &ModelParams) -> Result<SteadySolution> {
    let rc = p.critical_radius();
    let positive = dying.sign_v() > 0.0;
    let anchor_side_inner = dying.anchor_r() < rc;
    let flat = anchor_side_inner != dying.supersonic();
    let branch = match (positive, flat) {
        (true, true) => CriticalBranch::PFlat,
        (true, false) => CriticalBranch::PSharp,
        (false, true) => CriticalBranch::NFlat,
        (false, false) => CriticalBranch::NSharp,
    };
    let v = eval_critical(branch, splice_r, p)?;
    let rho = dying.q0() / (splice_r * splice_r * v);
    if !(rho > 0.0) {
        return Err(Error::NonPositiveDensity { rho });
    }
    solve_steady(splice_r, FluidState::new(rho, v), p)
}

/// Content of one cell pair during (re)construction.
#[derive(Clone)]
enum PairContent {
    /// A single steady solution covers the pair.
    Whole(SteadySolution, u64),
    /// Spliced: `first` up to `split`, then `second`.
    Spliced {
        first: (SteadySolution, u64),
        split: f64,
        second: (SteadySolution, u64),
    },
}

/// Assembles pair contents around anchor solutions, applying the sonic
/// splice rules. `anchors[j]` is the solution anchored in pair j (pairs
/// ordered left to right, pair j spanning [pair_lo[j], pair_hi[j]]).
fn splice_pairs(
    anchors: &[(SteadySolution, u64)],
    pair_lo: &[f64],
    pair_hi: &[f64],
    p: &ModelParams,
    next_serial: &mut u64,
    warnings: &mut Vec<String>,
) -> Result<Vec<PairContent>> {
    let rc = p.critical_radius();
    let n = anchors.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (sol, serial) = &anchors[j];
        let (lo, hi) = (pair_lo[j], pair_hi[j]);
        let margin = 1e-9 * (hi - lo);
        let splice = match (sol.family(), sol.sonic_r()) {
            (SteadyFamily::SonicLimited, Some(rs)) if rs > lo + margin && rs < hi - margin => {
                Some(rs)
            }
            _ => None,
        };
        let Some(rs) = splice else {
            out.push(PairContent::Whole(sol.clone(), *serial));
            continue;
        };
        // the uncovered side of the pair relative to the sonic point
        let anchor_inner = sol.anchor_r() < rc;
        let (gap_lo, gap_hi) = if anchor_inner { (rs, hi) } else { (lo, rs) };
        let neighbor = if anchor_inner {
            anchors.get(j + 1)
        } else {
            j.checked_sub(1).and_then(|i| anchors.get(i))
        };
        let cover = match neighbor {
            Some((nb, ns)) if nb.contains(gap_lo) && nb.contains(gap_hi) => (nb.clone(), *ns),
            _ => {
                let cs = critical_splice(sol, rs, p)?;
                if !matches!(cs.family(), SteadyFamily::Critical(_)) {
                    warnings.push(format!(
                        "splice at r = {rs}: critical anchor classified as {:?}",
                        cs.family()
                    ));
                }
                *next_serial += 1;
                (cs, *next_serial)
            }
        };
        out.push(if anchor_inner {
            PairContent::Spliced {
                first: (sol.clone(), *serial),
                split: rs,
                second: cover,
            }
        } else {
            PairContent::Spliced {
                first: cover,
                split: rs,
                second: (sol.clone(), *serial),
            }
        });
    }
    Ok(out)
}

/// Flattens pair contents into a merged segment list tiling
/// [r_min, r_max].
fn assemble_segments(
    contents: &[PairContent],
    pair_lo: &[f64],
    pair_hi: &[f64],
    r_min: f64,
    r_max: f64,
) -> Vec<Segment> {
    let mut segs: Vec<Segment> = Vec::new();
    let push = |segs: &mut Vec<Segment>, lo: f64, hi: f64, sol: &SteadySolution, serial: u64| {
        if hi <= lo {
            return;
        }
        if let Some(last) = segs.last_mut() {
            if last.serial == serial {
                last.hi = hi;
                return;
            }
            // two anchors of the same mathematical solution: agreeing in
            // (rho, v) at one radius pins the whole steady solution
            if last.sol.contains(hi) {
                if let (Ok(a), Ok(b)) = (last.sol.eval(lo), sol.eval(lo)) {
                    if !jump_is_real(a, b) {
                        last.hi = hi;
                        return;
                    }
                }
            }
        }
        segs.push(Segment { lo, hi, sol: sol.clone(), serial });
    };
    for (j, content) in contents.iter().enumerate() {
        let lo = if j == 0 { r_min } else { pair_lo[j] };
        let hi = if j + 1 == contents.len() { r_max } else { pair_hi[j] };
        match content {
            PairContent::Whole(sol, serial) => push(&mut segs, lo, hi, sol, *serial),
            PairContent::Spliced { first, split, second } => {
                push(&mut segs, lo, *split, &first.0, first.1);
                push(&mut segs, *split, hi, &second.0, second.1);
            }
        }
    }
    segs
}

/// Approximates initial data by a piecewise-steady field: one steady
/// anchor per cell pair (anchored at the odd nodes), with sonic-splice
/// handling. Initial data must have v bounded away from zero.
pub fn init_approximation(
    data: &dyn Fn(f64) -> FluidState,
    grid: &GridSpec,
    p: &ModelParams,
) -> Result<GlimmState> {
    let (cells, dr) = grid.validate()?;
    let mut anchors = Vec::new();
    let mut pair_lo = Vec::new();
    let mut pair_hi = Vec::new();
    let mut serial = 0u64;
    let mut warnings = Vec::new();

    let mut i = 1;
    while i < cells {
        let r_i = grid.r_min + i as f64 * dr;
        let s = data(r_i);
        if !s.is_valid() {
            return Err(Error::NonPositiveDensity { rho: s.rho });
        }
        if p.has_source() && s.v.abs() < tol::V_ZERO * p.k() {
            return Err(Error::Unsupported {
                what: format!(
                    "initial data has v = {} at r = {r_i} (static regions unsupported)",
                    s.v
                ),
            });
        }
        serial += 1;
        anchors.push((solve_steady(r_i, s, p)?, serial));
        pair_lo.push(r_i - dr);
        pair_hi.push(r_i + dr);
        i += 2;
    }

    let contents = splice_pairs(&anchors, &pair_lo, &pair_hi, p, &mut serial, &mut warnings)?;
    let segments = assemble_segments(&contents, &pair_lo, &pair_hi, grid.r_min, grid.r_max);
    warn_boundary_coverage(&segments, grid.r_min, grid.r_max, &mut warnings);

    Ok(GlimmState {
        t: 0.0,
        n: 0,
        r_min: grid.r_min,
        r_max: grid.r_max,
        dr,
        cells,
        segments,
        sampler: Sampler::new(0),
        next_serial: serial,
        warnings,
    })
}

/// Replaces the sampler (seed offset) of a freshly initialized state.
pub fn with_sampler_offset(mut state: GlimmState, offset: u64) -> GlimmState {
    state.sampler = Sampler::new(offset);
    state
}

/// Largest characteristic speed max(|lambda|, |mu|) = |v| + k over the
/// current field, sampled at segment ends and midpoints.
pub fn max_wave_speed(state: &GlimmState, p: &ModelParams) -> f64 {
    let mut speed = 0.0_f64;
    for seg in &state.segments {
        for r in [seg.lo, 0.5 * (seg.lo + seg.hi), seg.hi] {
            let s = match seg.sol.eval(r.clamp(seg.lo, seg.hi)) {
                Ok(s) => s,
                Err(_) => seg.sol.anchor_state(),
            };
            speed = speed.max(s.v.abs() + p.k());
        }
    }
    speed
}

/// Local problem built for one step.
enum LocalSolve {
    Grp { d: f64, left_seg: usize, grp: GrpSolution },
    Triple { nodes: (usize, usize), ts: Box<TripleSolution> },
}

enum BuildFailure {
    /// Retry the whole step with the suggested smaller dt.
    Shrink(f64),
    Fatal(Error),
}

fn build_local_solves(
    state: &GlimmState,
    discs: &[(usize, f64, usize)],
    dt: f64,
    p: &ModelParams,
    cfg: &GrpConfig,
    warnings: &mut Vec<String>,
) -> std::result::Result<Vec<LocalSolve>, BuildFailure> {
    let mut out = Vec::new();
    let mut i = 0;
    let retryable = |e: &Error| {
        matches!(
            e,
            Error::OutsideDomain { .. }
                | Error::SonicHit { .. }
                | Error::BeyondValidity { .. }
                | Error::CharacteristicCrossing { .. }
        )
    };
    while i < discs.len() {
        let (node, d, si) = discs[i];
        let crowded = i + 1 < discs.len() && discs[i + 1].1 - d < 2.0 * state.dr;
        if crowded {
            let (node2, d2, si2) = discs[i + 1];
            if i + 2 < discs.len() && discs[i + 2].1 - d2 < 2.0 * state.dr {
                warnings.push(format!(
                    "three crowded discontinuities near r = {d2}; right pairing deferred"
                ));
            }
            let alpha = &state.segments[si].sol;
            let beta = &state.segments[si2].sol;
            let gamma = &state.segments[si2 + 1].sol;
            match solve_triple_with(alpha, beta, gamma, d, d2, dt, p, cfg) {
                Ok(ts) => {
                    if ts.valid_until() < dt {
                        return Err(BuildFailure::Shrink(0.9 * ts.valid_until()));
                    }
                    out.push(LocalSolve::Triple { nodes: (node, node2), ts: Box::new(ts) });
                }
                Err(e) if retryable(&e) => return Err(BuildFailure::Shrink(0.5 * dt)),
                Err(e) => return Err(BuildFailure::Fatal(e)),
            }
            i += 2;
            continue;
        }
        let left = &state.segments[si].sol;
        let right = &state.segments[si + 1].sol;
        match solve_grp_with(left, right, d, dt, p, cfg) {
            Ok(grp) => {
                // CFL keeps every wave inside its cell pair over this step
                debug_assert!(
                    grp.curves().iter().all(|c| (c.eval(dt) - d).abs() <= state.dr),
                    "wave escaped its cell within dt"
                );
                out.push(LocalSolve::Grp { d, left_seg: si, grp });
            }
            Err(e) if retryable(&e) => return Err(BuildFailure::Shrink(0.5 * dt)),
            Err(e) => return Err(BuildFailure::Fatal(e)),
        }
        i += 1;
    }
    Ok(out)
}

/// Advances the state by one step of at most `dt_cap` (the CFL bound
/// still applies). Returns the new state.
pub fn step_capped(
    state: &GlimmState,
    grid: &GridSpec,
    p: &ModelParams,
    opts: &RunOptions,
    dt_cap: f64,
) -> Result<GlimmState> {
    let dr = state.dr;
    let speed = max_wave_speed(state, p).max(1e-300);
    let mut dt = (grid.cfl * dr / speed).min(dt_cap);
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter { name: "dt", value: dt });
    }

    let mut warnings = state.warnings.clone();

    // discontinuities mapped to nodes of the current parity
    let mut discs: Vec<(usize, f64, usize)> = Vec::new();
    for (si, w) in state.segments.windows(2).enumerate() {
        let d = w[0].hi;
        let real = match (w[0].sol.eval(d), w[1].sol.eval(d)) {
            (Ok(a), Ok(b)) => jump_is_real(a, b),
            _ => true,
        };
        if !real {
            continue;
        }
        let raw = (d - state.r_min) / dr;
        let mut node = raw.round() as isize;
        if (node as usize + state.n) % 2 != 0 {
            node += if raw - node as f64 >= 0.0 { 1 } else { -1 };
        }
        let node = node.clamp(1, state.cells as isize - 1) as usize;
        let cell_lo = state.node_radius(node - 1);
        let cell_hi = state.node_radius(node + 1);
        if d < cell_lo - 1e-9 * dr || d > cell_hi + 1e-9 * dr {
            return Err(Error::Unsupported {
                what: format!("discontinuity at r = {d} drifted outside its parity cell"),
            });
        }
        discs.push((node, d, si));
    }

    // local problems, with dt backoff when validity or sonic limits demand
    let mut attempts = 0;
    let solves: Vec<LocalSolve> = loop {
        attempts += 1;
        match build_local_solves(state, &discs, dt, p, &opts.grp, &mut warnings) {
            Ok(s) => break s,
            Err(BuildFailure::Shrink(new_dt)) if attempts < 40 => {
                dt = new_dt;
                if dt < 1e-12 * grid.t_end.max(1.0) {
                    return Err(Error::Unsupported {
                        what: format!("time step underflow at t = {}", state.t),
                    });
                }
            }
            Err(BuildFailure::Shrink(_)) => {
                return Err(Error::Unsupported {
                    what: format!(
                        "time step collapsed after {attempts} attempts at t = {}",
                        state.t
                    ),
                });
            }
            Err(BuildFailure::Fatal(e)) => {
                return Err(Error::CellFailure {
                    step: state.n,
                    cell: 0,
                    r: state.r_min,
                    source: Box::new(e),
                });
            }
        }
    };

    // one sampling draw per step, shared by all cells
    let mut sampler = state.sampler;
    let theta = sampler.next_theta();

    // serve every node of the next parity: sampled value from the local
    // problem covering its cell, or the untouched segment
    let mut anchors: Vec<(SteadySolution, u64)> = Vec::new();
    let mut pair_lo = Vec::new();
    let mut pair_hi = Vec::new();
    let mut serial = state.next_serial;

    // new anchors are centered on the current disc nodes (i + n even);
    // the next level's discs then sit at the opposite parity
    let mut node = if (1 + state.n) % 2 == 0 { 1usize } else { 2usize };
    while node < state.cells {
        let s_r = sample_point(theta, node, state.r_min, state.r_max, dr);
        let cell_lo = state.node_radius(node - 1);
        let cell_hi = state.node_radius(node + 1);
        let covering = solves.iter().find(|ls| match ls {
            LocalSolve::Grp { d, .. } => *d > cell_lo && *d < cell_hi,
            LocalSolve::Triple { nodes, .. } => node == nodes.0 || node == nodes.1,
        });
        let cell_err = |e: Error| Error::CellFailure {
            step: state.n,
            cell: node,
            r: s_r,
            source: Box::new(e),
        };
        match covering {
            None => {
                // no wave in this cell: the segment persists untouched
                let idx = state.segment_index(s_r);
                let seg = &state.segments[idx];
                anchors.push((seg.sol.clone(), seg.serial));
            }
            Some(LocalSolve::Grp { left_seg, grp, .. }) => {
                // samples falling in an untouched steady region keep the
                // original segment object (exact transport)
                match grp.region(dt, s_r) {
                    crate::grp::GrpRegion::Left => {
                        let seg = &state.segments[*left_seg];
                        anchors.push((seg.sol.clone(), seg.serial));
                    }
                    crate::grp::GrpRegion::Right => {
                        let seg = &state.segments[*left_seg + 1];
                        anchors.push((seg.sol.clone(), seg.serial));
                    }
                    _ => {
                        let v = grp.eval(dt, s_r).map_err(cell_err)?;
                        serial += 1;
                        anchors.push((solve_steady(s_r, v, p).map_err(cell_err)?, serial));
                    }
                }
            }
            Some(LocalSolve::Triple { ts, .. }) => {
                let v = ts.eval(dt.min(ts.valid_until()), s_r).map_err(cell_err)?;
                serial += 1;
                anchors.push((solve_steady(s_r, v, p).map_err(cell_err)?, serial));
            }
        }
        pair_lo.push(cell_lo);
        pair_hi.push(cell_hi);
        node += 2;
    }

    let contents = splice_pairs(&anchors, &pair_lo, &pair_hi, p, &mut serial, &mut warnings)?;
    let segments = assemble_segments(&contents, &pair_lo, &pair_hi, state.r_min, state.r_max);
    warn_boundary_coverage(&segments, state.r_min, state.r_max, &mut warnings);

    Ok(GlimmState {
        t: state.t + dt,
        n: state.n + 1,
        r_min: state.r_min,
        r_max: state.r_max,
        dr,
        cells: state.cells,
        segments,
        sampler,
        next_serial: serial,
        warnings,
    })
}

/// Advances by one CFL-limited step.
pub fn step(
    state: &GlimmState,
    grid: &GridSpec,
    p: &ModelParams,
    opts: &RunOptions,
) -> Result<GlimmState> {
    step_capped(state, grid, p, opts, f64::INFINITY)
}

/// Total variation of the selected field over [r_min, r_max]: trace jumps
/// at the discontinuities plus the sampled variation of each steady
/// piece.
pub fn total_variation(
    state: &GlimmState,
    field: TvField,
    samples_per_segment: usize,
) -> Result<f64> {
    let pick = |s: FluidState| match field {
        TvField::LnRho => s.rho.ln(),
        TvField::Velocity => s.v,
    };
    let mut tv = 0.0;
    for (i, seg) in state.segments.iter().enumerate() {
        let n = samples_per_segment.max(2);
        let mut prev = pick(seg_eval(state, seg, seg.lo, i)?);
        for j in 1..=n {
            let r = seg.lo + (seg.hi - seg.lo) * j as f64 / n as f64;
            let cur = pick(seg_eval(state, seg, r, i)?);
            tv += (cur - prev).abs();
            prev = cur;
        }
        if i + 1 < state.segments.len() {
            let r = seg.hi;
            let a = pick(seg_eval(state, seg, r, i)?);
            let b = pick(seg_eval(state, &state.segments[i + 1], r, i + 1)?);
            tv += (a - b).abs();
        }
    }
    Ok(tv)
}

fn seg_eval(state: &GlimmState, seg: &Segment, r: f64, idx: usize) -> Result<FluidState> {
    match seg.sol.eval(r) {
        Ok(s) => Ok(s),
        Err(Error::OutsideDomain { lo, hi, .. }) if idx == 0 || idx + 1 == state.segments.len() => {
            let edge = if r < lo { lo } else { hi.min(state.r_max) };
            seg.sol.eval(edge)
        }
        Err(e) => Err(e),
    }
}

/// Evaluates the current field on a uniform output grid.
pub fn snapshot(state: &GlimmState, p: &ModelParams, points: usize) -> Result<Snapshot> {
    let n = points.max(2);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let r = state.r_min + (state.r_max - state.r_min) * i as f64 / (n - 1) as f64;
        let s = state.eval_at(r)?;
        let q = to_invariants(s, p)?;
        rows.push([r, s.rho, s.v, q.w, q.z]);
    }
    Ok(Snapshot {
        t: state.t,
        rows,
        discontinuities: state.discontinuities(),
    })
}

/// Full run output.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: GlimmState,
    pub log: TvLog,
    pub snapshots: Vec<Snapshot>,
    pub warnings: Vec<String>,
}

/// Runs the scheme from initial data to t_end, recording diagnostics at
/// every step and snapshots at the requested times (steps are clamped to
/// land on them exactly).
pub fn run(
    data: &dyn Fn(f64) -> FluidState,
    grid: &GridSpec,
    p: &ModelParams,
    sampler_offset: u64,
    opts: &RunOptions,
) -> Result<RunOutput> {
    let mut snap_times: Vec<f64> = opts
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| (0.0..=grid.t_end).contains(&t))
        .collect();
    snap_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    snap_times.dedup();

    let mut state = with_sampler_offset(init_approximation(data, grid, p)?, sampler_offset);
    let mut log = TvLog::default();
    let mut snapshots = Vec::new();

    let record = |state: &GlimmState, dt: f64, log: &mut TvLog| -> Result<()> {
        let tv_ln = total_variation(state, TvField::LnRho, opts.tv_samples_per_segment)?;
        let tv_v = total_variation(state, TvField::Velocity, opts.tv_samples_per_segment)?;
        let mut v_max = 0.0_f64;
        let mut rho_min = f64::INFINITY;
        let mut rho_max = 0.0_f64;
        for seg in &state.segments {
            for r in [seg.lo, 0.5 * (seg.lo + seg.hi), seg.hi] {
                if let Ok(s) = seg.sol.eval(r.clamp(seg.lo, seg.hi)) {
                    v_max = v_max.max(s.v.abs());
                    rho_min = rho_min.min(s.rho);
                    rho_max = rho_max.max(s.rho);
                }
            }
        }
        log.entries.push(TvEntry {
            n: state.n,
            t: state.t,
            dt,
            tv_ln_rho: tv_ln,
            tv_v,
            v_max,
            rho_min,
            rho_max,
        });
        Ok(())
    };

    record(&state, 0.0, &mut log)?;
    let mut next_snap = 0usize;
    while next_snap < snap_times.len() && snap_times[next_snap] <= 0.0 {
        snapshots.push(snapshot(&state, p, opts.output_points)?);
        next_snap += 1;
    }

    let eps = 1e-12 * grid.t_end.max(1.0);
    while state.t < grid.t_end - eps {
        if state.n >= opts.max_steps {
            return Err(Error::Unsupported {
                what: format!("step limit {} reached at t = {}", opts.max_steps, state.t),
            });
        }
        let mut cap = grid.t_end - state.t;
        if next_snap < snap_times.len() {
            cap = cap.min(snap_times[next_snap] - state.t);
        }
        let prev_t = state.t;
        state = step_capped(&state, grid, p, opts, cap)?;
        record(&state, state.t - prev_t, &mut log)?;
        while next_snap < snap_times.len() && state.t >= snap_times[next_snap] - eps {
            snapshots.push(snapshot(&state, p, opts.output_points)?);
            next_snap += 1;
        }
    }

    let warnings = state.warnings.clone();
    Ok(RunOutput { state, log, snapshots, warnings })
}
