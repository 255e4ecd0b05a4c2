//! Level-set post-processing in the `(r, z)` half-plane: zero-curve extraction,
//! Hausdorff distances, extinction detection, the normalized asymptotic profile
//! and the relabeling harness.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::axisym::GridFn;
use crate::error::{Error, Result};
use crate::exact::{extinction_time, EllipsoidProfile};
use crate::game::GameSolver;
use crate::pde::{pde_step, PdeParams};

/// Number of samples of the reference ellipse trace.
pub const ELLIPSE_SAMPLES: usize = 1000;
const STEP_GUARD: f64 = 1e-9;

pub type Vertex = (f64, f64);

/// Polylines approximating `{u = 0}`; closed components repeat their first vertex.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub components: Vec<Vec<Vertex>>,
}

impl LevelCurve {
    pub fn is_empty(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.components.iter().flatten().copied()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.components.iter().flat_map(|c| c.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn scaled(&self, sr: f64, sz: f64) -> Self {
        Self { components: self.components.iter().map(|c| c.iter().map(|&(r, z)| (r * sr, z * sz)).collect()).collect() }
    }

    /// `r,z` lines with a blank line between components.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,z\n");
        for (n, comp) in self.components.iter().enumerate() {
            if n > 0 {
                out.push('\n');
            }
            for (r, z) in comp {
                let _ = writeln!(out, "{r},{z}");
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "r,z" => {}
            other => return Err(Error::Parse(format!("expected header `r,z`, got {other:?}"))),
        }
        let mut components = vec![Vec::new()];
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                components.push(Vec::new());
                continue;
            }
            let (r, z) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `r,z`", n + 2)))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)));
            components.last_mut().expect("nonempty").push((parse(r)?, parse(z)?));
        }
        components.retain(|c| !c.is_empty());
        Ok(Self { components })
    }

    /// Area enclosed in the half-plane, open components being closed along the axis.
    pub fn enclosed_area(&self) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let n = c.len();
                if n < 2 {
                    return 0.0;
                }
                let mut twice = 0.0;
                for k in 0..n {
                    let (a, b) = (c[k], c[(k + 1) % n]);
                    twice += a.0 * b.1 - b.0 * a.1;
                }
                0.5 * twice.abs()
            })
            .sum()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Marching squares on the sign of `u` (`u ≥ 0` counts as positive) with linear
/// edge interpolation. Saddle cells are resolved by the sign of the corner mean.
pub fn extract_zero_level(u: &GridFn) -> LevelCurve {
    let s = &u.spec;
    let nr = s.nr;
    // edge ids: 2·node for the edge towards +r, 2·node+1 towards +z
    let vertex = |id: usize| -> Vertex {
        let node = id / 2;
        let (i, j) = (node % nr, node / nr);
        let (i2, j2) = if id.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (u.get(i, j), u.get(i2, j2));
        let t = a / (a - b);
        let (r0, z0, r1, z1) = (s.r(i), s.z(j), s.r(i2), s.z(j2));
        (r0 + t * (r1 - r0), z0 + t * (z1 - z0))
    };
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for j in 0..s.nz - 1 {
        for i in 0..nr - 1 {
            let c = [u.get(i, j), u.get(i + 1, j), u.get(i + 1, j + 1), u.get(i, j + 1)];
            let pos = c.map(|v| v >= 0.0);
            let k = s.index(i, j);
            // edges in counter-clockwise order: bottom, right, top, left
            let edges = [2 * k, 2 * (k + 1) + 1, 2 * (k + nr), 2 * k + 1];
            let cut: Vec<usize> = (0..4).filter(|&e| pos[e] != pos[(e + 1) % 4]).collect();
            match cut.len() {
                2 => segs.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let centre = 0.25 * (c[0] + c[1] + c[2] + c[3]) >= 0.0;
                    // join the edges around each corner whose sign differs from the centre
                    if pos[0] != centre {
                        segs.push((edges[3], edges[0]));
                        segs.push((edges[1], edges[2]));
                    } else {
                        segs.push((edges[0], edges[1]));
                        segs.push((edges[2], edges[3]));
                    }
                }
                _ => {}
            }
        }
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (n, &(a, b)) in segs.iter().enumerate() {
        adj.entry(a).or_default().push(n);
        adj.entry(b).or_default().push(n);
    }
    let mut used = vec![false; segs.len()];
    let mut components = Vec::new();
    let trace = |start_seg: usize, start_edge: usize, used: &mut Vec<bool>| -> Vec<Vertex> {
        let mut ids = vec![start_edge];
        let (mut seg, mut edge) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let (a, b) = segs[seg];
            edge = if a == edge { b } else { a };
            ids.push(edge);
            match adj[&edge].iter().find(|&&n| !used[n]) {
                Some(&next) => seg = next,
                None => break,
            }
        }
        ids.into_iter().map(vertex).collect()
    };
    // open chains first, from their lower-id end, then closed loops
    let mut ends: Vec<usize> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(&e, _)| e).collect();
    ends.sort_unstable();
    for e in ends {
        let seg = adj[&e][0];
        if !used[seg] {
            components.push(trace(seg, e, &mut used));
        }
    }
    for n in 0..segs.len() {
        if !used[n] {
            components.push(trace(n, segs[n].0, &mut used));
        }
    }
    LevelCurve { components }
}

fn point_segment_distance(p: Vertex, a: Vertex, b: Vertex) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

fn samples(c: &LevelCurve) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = c.vertices().collect();
    out.extend(c.segments().map(|(a, b)| (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))));
    out
}

fn directed(from: &LevelCurve, to: &LevelCurve) -> f64 {
    let segs: Vec<(Vertex, Vertex)> = to.segments().collect();
    let singles: Vec<Vertex> = to.components.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
    samples(from)
        .into_iter()
        .map(|p| {
            let d = segs.iter().map(|&(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min);
            singles.iter().map(|&q| (p.0 - q.0).hypot(p.1 - q.1)).fold(d, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two curves, measured from vertices and
/// segment midpoints to segments. Zero for two empty curves, infinite if only one is empty.
pub fn hausdorff(a: &LevelCurve, b: &LevelCurve) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b).max(directed(b, a)),
    }
}

/// Dense polyline of the trace `12T r² + 16 z² = 1`, `r ≥ 0`.
pub fn ellipse_trace(profile: &EllipsoidProfile, n: usize) -> LevelCurve {
    let (ar, az) = profile.semi_axes();
    let pts = (0..n)
        .map(|k| {
            let phi = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * k as f64 / (n - 1) as f64;
            (ar * phi.cos().max(0.0), az * phi.sin())
        })
        .collect();
    LevelCurve { components: vec![pts] }
}

/// Trace `r⁴ + 16 z² = radius⁴` of a Korányi sphere.
pub fn sphere_trace(radius: f64, n: usize) -> LevelCurve {
    let r4 = radius.powi(4);
    let pts = (0..n)
        .map(|k| {
            let phi = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * k as f64 / (n - 1) as f64;
            ((r4 * phi.cos().max(0.0)).sqrt().sqrt(), 0.25 * radius * radius * phi.sin())
        })
        .collect();
    LevelCurve { components: vec![pts] }
}

/// Hausdorff distance between the curve scaled by `1/√(r0⁴ - 12t²)` and the
/// limiting ellipse of the sphere of radius `r0`.
pub fn profile_error(curve: &LevelCurve, t: f64, r0: f64) -> Result<f64> {
    let t_ext = extinction_time(r0)?;
    if !(t < t_ext) || t < 0.0 {
        return Err(Error::InvalidArgument(format!("time {t} is not before the extinction time {t_ext}")));
    }
    if curve.is_empty() {
        return Err(Error::InvalidArgument("profile of an empty curve".into()));
    }
    let lambda = (r0.powi(4) - 12.0 * t * t).sqrt();
    let normalized = curve.scaled(1.0 / lambda, 1.0 / lambda);
    let reference = ellipse_trace(&EllipsoidProfile::new(t_ext)?, ELLIPSE_SAMPLES);
    Ok(hausdorff(&normalized, &reference))
}

/// A time-stepping backend.
pub trait Evolver {
    fn time_step(&self) -> f64;
    fn step(&self, u: &GridFn) -> Result<GridFn>;

    fn steps_for(&self, t: f64) -> usize {
        (t / self.time_step() + STEP_GUARD).floor() as usize
    }
}

impl Evolver for GameSolver {
    fn time_step(&self) -> f64 {
        let e = self.params().eps;
        e * e
    }

    fn step(&self, u: &GridFn) -> Result<GridFn> {
        GameSolver::step(self, u)
    }
}

/// Fixed-step forward Euler for the regularized equation.
#[derive(Clone, Copy, Debug)]
pub struct PdeEvolver {
    pub params: PdeParams,
}

impl Evolver for PdeEvolver {
    fn time_step(&self) -> f64 {
        self.params.dt
    }

    fn step(&self, u: &GridFn) -> Result<GridFn> {
        pde_step(u, &self.params)
    }
}

/// Snapshots at the whole-step times nearest below each requested time, which must increase.
pub fn evolve_snapshots(ev: &dyn Evolver, u0: &GridFn, times: &[f64]) -> Result<Vec<(f64, GridFn)>> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("snapshot times must be strictly increasing".into()));
    }
    let dt = ev.time_step();
    let mut out = Vec::with_capacity(times.len());
    let mut u = u0.clone();
    let mut done = 0;
    for &t in times {
        let n = ev.steps_for(t);
        for _ in done..n {
            u = ev.step(&u)?;
        }
        done = done.max(n);
        out.push((done as f64 * dt, u.clone()));
    }
    Ok(out)
}

/// First time with an empty zero curve. With an evolver, the bracket between
/// the last nonempty and first empty snapshot is bisected down to one time step
/// by re-solving from the left snapshot.
pub fn estimate_extinction(snapshots: &[(f64, GridFn)], ev: Option<&dyn Evolver>) -> Result<Option<f64>> {
    let Some(k) = snapshots.iter().position(|(_, u)| extract_zero_level(u).is_empty()) else {
        return Ok(None);
    };
    if k == 0 {
        return Ok(Some(snapshots[0].0));
    }
    let (t_a, ref base) = snapshots[k - 1];
    let t_b = snapshots[k].0;
    let Some(ev) = ev else { return Ok(Some(t_b)) };
    let dt = ev.time_step();
    let (mut lo, mut hi) = (0usize, ((t_b - t_a) / dt).round() as usize);
    let mut state = base.clone();
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let mut probe = state.clone();
        for _ in lo..mid {
            probe = ev.step(&probe)?;
        }
        if extract_zero_level(&probe).is_empty() {
            hi = mid;
        } else {
            lo = mid;
            state = probe;
        }
    }
    Ok(Some(t_a + hi as f64 * dt))
}

/// Zero-curve distances between runs from `u0` and from `theta∘u0` at each snapshot.
pub fn relabel_independence<T: Fn(f64) -> f64>(u0: &GridFn, theta: T, ev: &dyn Evolver, times: &[f64]) -> Result<Vec<f64>> {
    let mut d = relabel_sweep(u0, &[&theta], ev, times)?;
    Ok(d.pop().expect("one relabeling"))
}

/// [`relabel_independence`] for several relabelings, evolving `u0` only once.
pub fn relabel_sweep(u0: &GridFn, thetas: &[&dyn Fn(f64) -> f64], ev: &dyn Evolver, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let base: Vec<LevelCurve> = evolve_snapshots(ev, u0, times)?.iter().map(|(_, u)| extract_zero_level(u)).collect();
    thetas
        .iter()
        .map(|theta| {
            let relabeled = evolve_snapshots(ev, &u0.map(theta)?, times)?;
            Ok(base.iter().zip(&relabeled).map(|(a, (_, v))| hausdorff(a, &extract_zero_level(v))).collect())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub times: Vec<f64>,
    pub curves: Vec<LevelCurve>,
    pub extinction_estimate: Option<f64>,
    pub profile_error: Option<f64>,
}

impl FlowReport {
    pub fn new(times: Vec<f64>, curves: Vec<LevelCurve>) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("report times must be strictly increasing".into()));
        }
        if times.len() != curves.len() {
            return Err(Error::InvalidArgument("one curve per time is required".into()));
        }
        Ok(Self { times, curves, extinction_estimate: None, profile_error: None })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// SVG overlay of curves (solid) and reference traces (dashed) in the half-plane.
pub fn svg_overlay(curves: &[LevelCurve], references: &[LevelCurve], r_max: f64, z_min: f64, z_max: f64) -> String {
    let (w, h) = (400.0, 400.0 * (z_max - z_min) / r_max);
    let map = |(r, z): Vertex| (40.0 + w * r / r_max, 20.0 + h * (z_max - z) / (z_max - z_min));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w + 60.0,
        h + 40.0,
        w + 60.0,
        h + 40.0
    );
    let _ = writeln!(out, r#"<rect x="40" y="20" width="{w}" height="{h}" fill="none" stroke="gray"/>"#);
    let poly = |c: &[Vertex], style: &str, out: &mut String| {
        let pts: Vec<String> = c.iter().map(|&v| map(v)).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, pts.join(" "));
    };
    for c in references.iter().flat_map(|c| &c.components) {
        poly(c, r#"stroke="firebrick" stroke-dasharray="4 3""#, &mut out);
    }
    for c in curves.iter().flat_map(|c| &c.components) {
        poly(c, r#"stroke="navy" stroke-width="1.2""#, &mut out);
    }
    out.push_str("</svg>\n");
    out
}
