//! Deterministic two-player game: value iteration of the min-max dynamic
//! programming principle on the axisymmetric grid, and single-trajectory play in
//! full 3D coordinates.
//!
//! The minimum over directions is taken over a fixed uniform set of
//! `n_dirs · 2^refine` angles. Plain sampling of the angle is only first-order
//! accurate because `max_b` puts a kink at the minimizer, so the fine set is
//! searched by branch and bound from the `n_dirs` coarse angles. A segment of
//! angles is pruned by a Lipschitz estimate or by the smallest cell corner its
//! moves can reach. Both are rigorous, so the returned value equals the
//! brute-force minimum over the fine set bit for bit and the scheme stays
//! exactly monotone.

use std::f64::consts::{SQRT_2, TAU};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::axisym::{axi_move_sq, GridFn, GridSpec, Sign, RING_TOL};
use crate::error::{Error, Result};
use crate::hgroup::{HPoint, HorDir};

/// Default number of bisection levels between coarse and fine direction sets.
pub const DEFAULT_REFINE: u32 = 7;
/// Default coarse direction count `M`.
pub const DEFAULT_DIRS: usize = 64;
/// Guard used when converting a horizon into a whole number of steps.
const STEP_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Space step; each round consumes time `eps²`.
    pub eps: f64,
    /// Coarse direction count, even and at least 8.
    pub n_dirs: usize,
    /// The fine direction set has `n_dirs · 2^refine` angles.
    pub refine: u32,
    pub horizon_t: f64,
}

impl GameParams {
    pub fn new(eps: f64, n_dirs: usize, refine: u32, horizon_t: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        if n_dirs < 8 || !n_dirs.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("direction count must be even and at least 8, got {n_dirs}")));
        }
        if refine > 16 {
            return Err(Error::InvalidArgument(format!("refine level {refine} is too large")));
        }
        if !(horizon_t >= 0.0) || !horizon_t.is_finite() {
            return Err(Error::InvalidArgument(format!("horizon must be nonnegative, got {horizon_t}")));
        }
        Ok(Self { eps, n_dirs, refine, horizon_t })
    }

    pub fn with_horizon(&self, horizon_t: f64) -> Self {
        Self { horizon_t, ..*self }
    }

    /// `N = floor(t / eps²)`.
    pub fn steps(&self) -> usize {
        self.steps_for(self.horizon_t)
    }

    pub fn steps_for(&self, t: f64) -> usize {
        (t / (self.eps * self.eps) + STEP_GUARD).floor() as usize
    }

    pub fn fine_dirs(&self) -> usize {
        self.n_dirs << self.refine
    }
}

/// Interpolation target of one move from one grid column, valid for every row.
#[derive(Clone, Copy, Debug)]
struct Target {
    /// Cell column, or `u32::MAX` beyond `r_max`.
    ir: u32,
    sr: f64,
    /// Row offset of the cell relative to the node row.
    jo: i32,
    sz: f64,
    /// Target in cell units: absolute column coordinate and row offset.
    x: f64,
    y: f64,
}

/// Per-step data for the local pruning bound.
struct StepCtx {
    /// Per cell: largest edge difference along `r` and along `z`, smallest corner.
    cells: Vec<Cell>,
    /// Whether the ring equals the far field exactly, so the extension is continuous.
    ring_exact: bool,
    margin: f64,
}

#[derive(Clone, Copy)]
struct Cell {
    dr: f64,
    dz: f64,
    min: f64,
}

/// Rectangles covering more cells than this fall back to the box-wide bound.
const LOCAL_CELLS: usize = 16;

const OUTSIDE: u32 = u32::MAX;

/// Per-column move geometry plus the cell box every move from that column can reach.
struct Column {
    targets: Vec<Target>,
    i_lo: usize,
    i_hi: usize,
    jo_lo: i32,
    jo_hi: i32,
    exits_r: bool,
}

/// Precomputed stencils of the reduced game on one grid.
pub struct GameSolver {
    spec: GridSpec,
    params: GameParams,
    columns: Vec<Column>,
    /// Per column, bounds on `|dr'/dθ|` and `|dz'/dθ|` in cell units:
    /// `min(√2 ε, r)` and `(√2/2) ε r`.
    lip_r: Vec<f64>,
    lip_z: Vec<f64>,
}

impl GameSolver {
    pub fn new(spec: GridSpec, params: GameParams) -> Result<Self> {
        spec.validate()?;
        let k = params.fine_dirs();
        let (dr, dz) = (spec.dr(), spec.dz());
        // entry k + K/2 is the exact negation of entry k, so `b = -1` is a half-turn
        let half = k / 2;
        let mut trig = vec![(0.0, 0.0); k];
        for (m, t) in trig.iter_mut().take(half).enumerate() {
            let (s, c) = (TAU * m as f64 / k as f64).sin_cos();
            *t = (c, s);
        }
        for m in 0..half {
            trig[m + half] = (-trig[m].0, -trig[m].1);
        }
        let mut columns = Vec::with_capacity(spec.nr);
        let nx = (spec.nr - 1) as f64;
        for i in 0..spec.nr {
            let r = spec.r(i);
            let mut targets = Vec::with_capacity(k);
            let (mut i_lo, mut i_hi, mut jo_lo, mut jo_hi, mut exits_r) = (usize::MAX, 0, i32::MAX, i32::MIN, false);
            for &(c, s) in &trig {
                let (rr, dzm) = axi_move_sq(r, 0.0, c, s, 1.0, params.eps);
                let x = rr.sqrt() / dr;
                let y = dzm / dz;
                let jo = y.floor();
                let t = if x > nx {
                    exits_r = true;
                    Target { ir: OUTSIDE, sr: 0.0, jo: jo as i32, sz: y - jo, x, y }
                } else {
                    let ir = (x.floor() as usize).min(spec.nr - 2);
                    i_lo = i_lo.min(ir);
                    i_hi = i_hi.max(ir);
                    Target { ir: ir as u32, sr: x - ir as f64, jo: jo as i32, sz: y - jo, x, y }
                };
                jo_lo = jo_lo.min(t.jo);
                jo_hi = jo_hi.max(t.jo);
                targets.push(t);
            }
            if i_lo == usize::MAX {
                i_lo = spec.nr - 2;
                i_hi = spec.nr - 2;
            }
            columns.push(Column { targets, i_lo, i_hi, jo_lo, jo_hi, exits_r });
        }
        let lip_r = (0..spec.nr).map(|i| (SQRT_2 * params.eps).min(spec.r(i)) / dr).collect();
        let lip_z = (0..spec.nr).map(|i| 0.5 * SQRT_2 * params.eps * spec.r(i) / dz).collect();
        Ok(Self { spec, params, columns, lip_r, lip_z })
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn check_spec(&self, u: &GridFn) -> Result<()> {
        let (a, b) = (&u.spec, &self.spec);
        if a.nr != b.nr || a.nz != b.nz || a.r_max != b.r_max || a.z_min != b.z_min || a.z_max != b.z_max {
            return Err(Error::Grid("field does not live on the solver grid".into()));
        }
        Ok(())
    }

    #[inline]
    fn eval(&self, u: &GridFn, t: &Target, j: usize) -> f64 {
        let row = j as i64 + t.jo as i64;
        if t.ir == OUTSIDE || row < 0 || row > self.spec.nz as i64 - 2 {
            return u.spec.far_field;
        }
        u.interp_cell(t.ir as usize, t.sr, row as usize, t.sz)
    }

    #[inline]
    fn objective(&self, u: &GridFn, col: &Column, j: usize, m: usize, half: usize) -> f64 {
        let a = self.eval(u, &col.targets[m], j);
        let b = self.eval(u, &col.targets[m + half], j);
        a.max(b)
    }

    fn step_ctx(u: &GridFn) -> StepCtx {
        let s = &u.spec;
        let mut cells = Vec::with_capacity((s.nr - 1) * (s.nz - 1));
        for j in 0..s.nz - 1 {
            for i in 0..s.nr - 1 {
                let (a, b, c, d) = (u.get(i, j), u.get(i + 1, j), u.get(i, j + 1), u.get(i + 1, j + 1));
                cells.push(Cell {
                    dr: (b - a).abs().max((d - c).abs()),
                    dz: (c - a).abs().max((d - b).abs()),
                    min: a.min(b).min(c).min(d),
                });
            }
        }
        let far = s.far_field;
        let ring_exact = (0..s.nz).all(|j| (0..s.nr).all(|i| !s.on_ring(i, j) || u.get(i, j) == far));
        StepCtx { cells, ring_exact, margin: Self::rounding_margin(u) }
    }

    /// Lower bound of one branch over angles within `w` of target `t`, taken
    /// from the cells its path can reach: the Lipschitz estimate with their edge
    /// differences, or their smallest corner, which bounds the clamped bilinear
    /// interpolant exactly. `None` when the rectangle is too large to scan.
    fn branch_bound(&self, ctx: &StepCtx, t: &Target, (i, j): (usize, usize), v: f64, w: f64) -> Option<f64> {
        let s = &self.spec;
        let (lip_r, lip_z) = (self.lip_r[i], self.lip_z[i]);
        let (dx, dy) = (lip_r * w, lip_z * w);
        let y = j as f64 + t.y;
        let (nx, ny) = ((s.nr - 1) as f64, (s.nz - 1) as f64);
        let (x0, x1, y0, y1) = (t.x - dx, t.x + dx, y - dy, y + dy);
        let leaves = x1 > nx || y0 < 0.0 || y1 > ny;
        if x0 > nx || y1 < 0.0 || y0 > ny {
            return Some(v);
        }
        let cell = |a: f64, n: usize| (a.max(0.0).floor() as usize).min(n - 2);
        let (c0, c1) = (cell(x0, s.nr), cell(x1.min(nx), s.nr));
        let (r0, r1) = (cell(y0, s.nz), cell(y1.min(ny), s.nz));
        if (c1 - c0 + 1) * (r1 - r0 + 1) > LOCAL_CELLS {
            return None;
        }
        let ncx = s.nr - 1;
        let (mut gr, mut gz) = (0.0f64, 0.0f64);
        let mut lo = if leaves { s.far_field } else { f64::INFINITY };
        for row in r0..=r1 {
            for c in &ctx.cells[row * ncx + c0..=row * ncx + c1] {
                gr = gr.max(c.dr);
                gz = gz.max(c.dz);
                lo = lo.min(c.min);
            }
        }
        // crossing out of the grid is continuous only if the ring is exactly far
        let lip = if leaves && !ctx.ring_exact { f64::NEG_INFINITY } else { v - (gr * lip_r + gz * lip_z) * w - ctx.margin };
        Some(lip.max(lo))
    }

    /// Brute-force minimum over the whole fine direction set.
    fn node_brute(&self, u: &GridFn, i: usize, j: usize) -> f64 {
        let col = &self.columns[i];
        let half = col.targets.len() / 2;
        (0..half).map(|m| self.objective(u, col, j, m, half)).fold(f64::INFINITY, f64::min)
    }

    /// Branch-and-bound minimum over the fine direction set, with its argmin.
    /// `hint` is evaluated first to seed the incumbent.
    fn node_value(
        &self,
        u: &GridFn,
        (i, j): (usize, usize),
        hint: Option<usize>,
        ctx: &StepCtx,
        stack: &mut Vec<(usize, usize, (f64, f64))>,
    ) -> Result<(f64, Option<usize>)> {
        let s = &self.spec;
        let col = &self.columns[i];
        let vals = u.values();
        let row_lo = j as i64 + col.jo_lo as i64;
        let row_hi = j as i64 + col.jo_hi as i64 + 1;
        let exits = col.exits_r || row_lo < 0 || row_hi > s.nz as i64 - 1;
        let (r_lo, r_hi) = (row_lo.max(0) as usize, row_hi.min(s.nz as i64 - 1) as usize);
        let (c_lo, c_hi) = (col.i_lo, col.i_hi + 1);
        let (mut lr, mut lz) = (0.0f64, 0.0f64);
        for row in r_lo..=r_hi {
            let base = s.index(0, row);
            for c in c_lo..c_hi {
                lr = lr.max((vals[base + c + 1] - vals[base + c]).abs());
            }
            if row < r_hi {
                for c in c_lo..=c_hi {
                    lz = lz.max((vals[base + c + s.nr] - vals[base + c]).abs());
                }
            }
        }
        let anchor = vals[s.index(c_lo, r_lo)];
        if lr == 0.0 && lz == 0.0 && (!exits || anchor == u.spec.far_field) {
            return Ok((anchor, None));
        }
        if exits && !self.exit_band_is_far(u, col, (r_lo, r_hi), (c_lo, c_hi)) {
            return Err(Error::DomainTooSmall(format!(
                "moves from (r={}, z={}) leave the grid where the field is not constant",
                s.r(i),
                s.z(j)
            )));
        }
        let half = col.targets.len() / 2;
        let coarse = 1usize << self.params.refine;
        let (mut best, mut arg) = (f64::INFINITY, 0);
        let mut offer = |m: usize, v: f64, best: &mut f64| {
            if v < *best {
                *best = v;
                arg = m;
            }
        };
        if let Some(m) = hint {
            offer(m, self.objective(u, col, j, m, half), &mut best);
        }
        let dtheta = TAU / col.targets.len() as f64;
        // leaving the grid across a ring that is only close to `far` is a jump
        let box_lip = if exits && !ctx.ring_exact { f64::INFINITY } else { self.lip_r[i] * lr + self.lip_z[i] * lz };
        let branches = |m: usize| (self.eval(u, &col.targets[m], j), self.eval(u, &col.targets[m + half], j));
        // segment `(m, hw)` stands for the fine angles `m - hw .. m + hw`: pruned
        // by the box-wide bound first, then by the local one
        let pruned = |m: usize, hw: usize, (a, b): (f64, f64), best: f64| {
            let w = hw as f64 * dtheta;
            if a.max(b) - box_lip * w - ctx.margin >= best {
                return true;
            }
            let bound = |t: &Target, v: f64| self.branch_bound(ctx, t, (i, j), v, w);
            match (bound(&col.targets[m], a), bound(&col.targets[m + half], b)) {
                (Some(x), Some(y)) => x.max(y) >= best,
                _ => false,
            }
        };
        stack.clear();
        for c in 0..self.params.n_dirs / 2 {
            let m = c * coarse;
            let ab = branches(m);
            offer(m, ab.0.max(ab.1), &mut best);
            stack.push((m, coarse / 2, ab));
        }
        if coarse == 1 {
            return Ok((best, Some(arg)));
        }
        // visit the most promising segments first
        stack.sort_by(|x, y| y.2 .0.max(y.2 .1).total_cmp(&x.2 .0.max(x.2 .1)));
        while let Some((m, hw, ab)) = stack.pop() {
            if pruned(m, hw, ab, best) {
                continue;
            }
            if hw == 1 {
                let left = (m + half - 1) % half;
                offer(left, self.objective(u, col, j, left, half), &mut best);
                continue;
            }
            let q = hw / 2;
            for child in [(m + half - q) % half, (m + q) % half] {
                let ab = branches(child);
                offer(child, ab.0.max(ab.1), &mut best);
                stack.push((child, q, ab));
            }
        }
        Ok((best, Some(arg)))
    }

    /// Whether the last cells before the boundary, inside the reachable box,
    /// already carry the far-field value.
    fn exit_band_is_far(&self, u: &GridFn, col: &Column, rows: (usize, usize), cols: (usize, usize)) -> bool {
        let s = &self.spec;
        let far = u.spec.far_field;
        let is_far = |i: usize, j: usize| (u.get(i, j) - far).abs() <= RING_TOL;
        if col.exits_r && !(rows.0..=rows.1).all(|j| is_far(s.nr - 2, j)) {
            return false;
        }
        let band = |j: usize| (cols.0..=cols.1).all(|i| is_far(i, j));
        (rows.0 > 0 || band(1)) && (rows.1 < s.nz - 1 || band(s.nz - 2))
    }

    fn rounding_margin(u: &GridFn) -> f64 {
        let m = u.values().iter().fold(u.spec.far_field.abs(), |a, v| a.max(v.abs()));
        1e-12 * (1.0 + m)
    }

    /// One round of the dynamic programming principle.
    pub fn step(&self, u: &GridFn) -> Result<GridFn> {
        self.check_spec(u)?;
        let s = self.spec;
        let ctx = Self::step_ctx(u);
        let ctx = &ctx;
        let mut out = vec![0.0; s.len()];
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(s.nz);
        let rows_per = s.nz.div_ceil(threads);
        let results: Vec<Result<()>> = std::thread::scope(|scope| {
            let handles: Vec<_> = out
                .chunks_mut(rows_per * s.nr)
                .enumerate()
                .map(|(chunk, buf)| {
                    scope.spawn(move || {
                        let mut stack = Vec::new();
                        for (local, row) in buf.chunks_mut(s.nr).enumerate() {
                            let j = chunk * rows_per + local;
                            let mut hint = None;
                            for (i, slot) in row.iter_mut().enumerate() {
                                let (v, arg) = self.node_value(u, (i, j), hint, ctx, &mut stack)?;
                                *slot = v;
                                hint = arg.or(hint);
                            }
                        }
                        Ok(())
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        results.into_iter().collect::<Result<()>>()?;
        Ok(GridFn::new_unchecked(u.spec, out))
    }

    /// Reference step that evaluates every fine direction.
    pub fn step_brute(&self, u: &GridFn) -> Result<GridFn> {
        self.check_spec(u)?;
        let s = self.spec;
        let mut out = Vec::with_capacity(s.len());
        for j in 0..s.nz {
            for i in 0..s.nr {
                out.push(self.node_brute(u, i, j));
            }
        }
        Ok(GridFn::new_unchecked(u.spec, out))
    }

    /// Applies [`GameSolver::step`] `n` times.
    pub fn run(&self, u0: &GridFn, n: usize) -> Result<GridFn> {
        let mut u = u0.clone();
        for _ in 0..n {
            u = self.step(&u)?;
        }
        Ok(u)
    }
}

/// One dynamic programming round. Builds the stencils on every call; use
/// [`GameSolver`] when stepping repeatedly.
pub fn dpp_step(u: &GridFn, params: &GameParams) -> Result<GridFn> {
    GameSolver::new(u.spec, *params)?.step(u)
}

/// Discrete value function at `params.horizon_t`.
pub fn solve_game(u0: &GridFn, params: &GameParams) -> Result<GridFn> {
    u0.check_ring()?;
    let solver = GameSolver::new(u0.spec, *params)?;
    solver.run(u0, params.steps())
}

/// A played game: states `ζ⁰…ζᴺ` and the choice `(v, b)` made at each round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<HPoint>,
    pub choices: Vec<(HorDir, Sign)>,
}

impl Trajectory {
    pub fn last(&self) -> HPoint {
        *self.states.last().expect("trajectory has at least one state")
    }

    /// Rows `[p1, p2, p3, v1, v2, b]`; the final state carries `v = 0`, `b = 0`.
    pub fn rows(&self) -> Vec<[f64; 6]> {
        self.states
            .iter()
            .enumerate()
            .map(|(k, p)| match self.choices.get(k) {
                Some((v, b)) => [p.p1, p.p2, p.p3, v.v1, v.v2, b.value()],
                None => [p.p1, p.p2, p.p3, 0.0, 0.0, 0.0],
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.rows())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<[f64; 6]> = serde_json::from_str(text)?;
        if rows.is_empty() {
            return Err(Error::Parse("trajectory has no states".into()));
        }
        let states = rows.iter().map(|r| HPoint::new(r[0], r[1], r[2])).collect();
        let mut choices = Vec::with_capacity(rows.len() - 1);
        for r in &rows[..rows.len() - 1] {
            let b = if r[5] == 1.0 {
                Sign::Plus
            } else if r[5] == -1.0 {
                Sign::Minus
            } else {
                return Err(Error::Parse(format!("invalid sign {}", r[5])));
            };
            choices.push((HorDir::new(r[3], r[4])?, b));
        }
        Ok(Self { states, choices })
    }
}

/// The increment `(√2 ε b v1, √2 ε b v2, 0)`.
pub fn game_increment(v: HorDir, b: Sign, eps: f64) -> HPoint {
    HPoint::horizontal(v, SQRT_2 * eps * b.value())
}

/// Plays `N = params.steps()` rounds. Player II sees the direction before choosing.
pub fn play_trajectory<F, G>(p0: HPoint, params: &GameParams, mut strat_i: F, mut strat_ii: G) -> Trajectory
where
    F: FnMut(usize, HPoint) -> HorDir,
    G: FnMut(usize, HPoint, HorDir) -> Sign,
{
    let n = params.steps();
    let mut states = Vec::with_capacity(n + 1);
    let mut choices = Vec::with_capacity(n);
    states.push(p0);
    let mut p = p0;
    for k in 0..n {
        let v = strat_i(k, p);
        let b = strat_ii(k, p, v);
        p = p * game_increment(v, b, params.eps);
        choices.push((v, b));
        states.push(p);
    }
    Trajectory { states, choices }
}

/// `(r²+2ε²)(p1v1+p2v2) + 4p3(p1v2-p2v1)`, the part of the gauge after one move that flips with `b`.
pub fn cross_term(p: HPoint, v: HorDir, eps: f64) -> f64 {
    (p.radius_sq() + 2.0 * eps * eps) * (p.p1 * v.v1 + p.p2 * v.v2) + 4.0 * (p.p1 * p.p3 * v.v2 - p.p2 * p.p3 * v.v1)
}

/// The unit direction annihilating [`cross_term`]; undefined on the axis.
pub fn gauge_preserving_direction(p: HPoint, eps: f64) -> Result<HorDir> {
    let a = p.radius_sq() + 2.0 * eps * eps;
    let v1 = a * p.p2 + 4.0 * p.p1 * p.p3;
    let v2 = -(a * p.p1 - 4.0 * p.p2 * p.p3);
    let rho = v1.hypot(v2);
    if p.radius_sq() == 0.0 || rho == 0.0 {
        return Err(Error::Degenerate("no gauge-preserving direction on the axis".into()));
    }
    Ok(HorDir { v1: v1 / rho, v2: v2 / rho })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Sign that makes the gauge after the move as large (or small) as possible; ties go to `+1`.
pub fn adversarial_sign(p: HPoint, v: HorDir, eps: f64, sense: Sense) -> Sign {
    let c = cross_term(p, v, eps);
    if c == 0.0 {
        return Sign::Plus;
    }
    match (sense, c > 0.0) {
        (Sense::Maximize, true) | (Sense::Minimize, false) => Sign::Plus,
        _ => Sign::Minus,
    }
}

/// Named strategies for Player I.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StrategyI {
    /// Gauge-preserving direction, `(1, 0)` on the axis.
    Gauge,
    /// Constant direction at a fixed angle.
    Angle(f64),
    Random,
}

/// Named strategies for Player II.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrategyII {
    Max,
    Min,
    Plus,
    Minus,
    Random,
}

/// Plays named strategies; randomness comes only from `rng`.
pub fn play_named<R: Rng>(p0: HPoint, params: &GameParams, si: StrategyI, sii: StrategyII, rng: &mut R) -> Trajectory {
    let eps = params.eps;
    let n = params.steps();
    let dir_draws: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    let sign_draws: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    play_trajectory(
        p0,
        params,
        |k, p| match si {
            StrategyI::Gauge => gauge_preserving_direction(p, eps).unwrap_or(HorDir { v1: 1.0, v2: 0.0 }),
            StrategyI::Angle(a) => HorDir::from_angle(a),
            StrategyI::Random => HorDir::from_angle(dir_draws[k]),
        },
        |k, p, v| match sii {
            StrategyII::Max => adversarial_sign(p, v, eps, Sense::Maximize),
            StrategyII::Min => adversarial_sign(p, v, eps, Sense::Minimize),
            StrategyII::Plus => Sign::Plus,
            StrategyII::Minus => Sign::Minus,
            StrategyII::Random => {
                if sign_draws[k] {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }
        },
    )
}

/// Depth-`depth` exhaustive min-max of `u0` over `dirs` in full 3D coordinates.
pub fn exhaustive_value_3d<F: Fn(HPoint) -> f64>(u0: &F, p: HPoint, eps: f64, dirs: &[HorDir], depth: usize) -> f64 {
    if depth == 0 {
        return u0(p);
    }
    dirs.iter()
        .map(|&v| {
            let up = exhaustive_value_3d(u0, p * game_increment(v, Sign::Plus, eps), eps, dirs, depth - 1);
            let down = exhaustive_value_3d(u0, p * game_increment(v, Sign::Minus, eps), eps, dirs, depth - 1);
            up.max(down)
        })
        .fold(f64::INFINITY, f64::min)
}
