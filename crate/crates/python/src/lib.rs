//! Python bindings: group algebra, closed-form references, the axisymmetric
//! solvers and zero-curve analysis.

use heisenflow::axisym::{GridFn, GridSpec};
use heisenflow::cli::{parse_config, run};
use heisenflow::exact;
use heisenflow::flow::{extract_zero_level, profile_error as flow_profile_error, LevelCurve};
use heisenflow::game::{play_named, solve_game, GameParams, StrategyI, StrategyII};
use heisenflow::hgroup::HPoint;
use heisenflow::pde::{solve_pde, PdeParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;

type Point = (f64, f64, f64);

fn to_py(e: heisenflow::Error) -> PyErr {
    match e {
        heisenflow::Error::InvalidArgument(_) | heisenflow::Error::Config(_) | heisenflow::Error::Parse(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn pt(p: Point) -> HPoint {
    HPoint::new(p.0, p.1, p.2)
}

#[pyfunction]
fn mul(p: Point, q: Point) -> Point {
    let r = pt(p) * pt(q);
    (r.p1, r.p2, r.p3)
}

#[pyfunction]
fn koranyi(p: Point) -> f64 {
    pt(p).koranyi()
}

#[pyfunction]
fn dist(p: Point, q: Point) -> f64 {
    pt(p).dist(pt(q))
}

#[pyfunction]
fn exact_solution(p: Point, t: f64) -> f64 {
    exact::exact_solution(pt(p), t)
}

#[pyfunction]
fn exact_residual(p: Point, t: f64) -> f64 {
    exact::exact_residual(pt(p), t)
}

#[pyfunction]
fn extinction_time(r: f64) -> PyResult<f64> {
    exact::extinction_time(r).map_err(to_py)
}

fn sphere_field(radius: f64, nr: usize, nz: usize) -> PyResult<GridFn> {
    let m = 10.0 * radius.powi(4);
    let spec = GridSpec::new(2.0, -2.0, 2.0, nr, nz, m).map_err(to_py)?;
    GridFn::from_fn(spec, |r, z| (r.powi(4) + 16.0 * z * z - radius.powi(4)).min(m)).map_err(to_py)
}

fn curve_list(c: &LevelCurve) -> Vec<Vec<(f64, f64)>> {
    c.components.clone()
}

/// Evolves the truncated sphere on `[0,2]×[-2,2]`; returns `(values, nr, nz)`, `z` outer.
#[pyfunction]
#[pyo3(signature = (radius, eps, horizon, nr=81, nz=161, dirs=64, refine=5))]
fn evolve_sphere_game(radius: f64, eps: f64, horizon: f64, nr: usize, nz: usize, dirs: usize, refine: u32) -> PyResult<(Vec<f64>, usize, usize)> {
    let u0 = sphere_field(radius, nr, nz)?;
    let params = GameParams::new(eps, dirs, refine, horizon).map_err(to_py)?;
    let u = solve_game(&u0, &params).map_err(to_py)?;
    Ok((u.into_values(), nr, nz))
}

#[pyfunction]
#[pyo3(signature = (radius, horizon, nr=81, nz=161))]
fn evolve_sphere_pde(radius: f64, horizon: f64, nr: usize, nz: usize) -> PyResult<(Vec<f64>, usize, usize)> {
    let u0 = sphere_field(radius, nr, nz)?;
    let params = PdeParams::with_safe_dt(&u0.spec, PdeParams::default_reg(&u0.spec), horizon).map_err(to_py)?;
    let u = solve_pde(&u0, &params).map_err(to_py)?;
    Ok((u.into_values(), nr, nz))
}

/// Zero curve of samples on `[0,r_max]×[z_min,z_max]`.
#[pyfunction]
fn zero_level(values: Vec<f64>, r_max: f64, z_min: f64, z_max: f64, nr: usize, nz: usize) -> PyResult<Vec<Vec<(f64, f64)>>> {
    let far = *values.last().ok_or_else(|| PyValueError::new_err("no samples"))?;
    let spec = GridSpec::new(r_max, z_min, z_max, nr, nz, far).map_err(to_py)?;
    let u = GridFn::new(spec, values).map_err(to_py)?;
    Ok(curve_list(&extract_zero_level(&u)))
}

#[pyfunction]
fn profile_error(components: Vec<Vec<(f64, f64)>>, t: f64, r0: f64) -> PyResult<f64> {
    flow_profile_error(&LevelCurve { components }, t, r0).map_err(to_py)
}

/// Gauge-preserving Player I against the maximizing Player II; rows `[p1,p2,p3,v1,v2,b]`.
#[pyfunction]
#[pyo3(signature = (start, eps, steps, seed=0))]
fn play(start: Point, eps: f64, steps: usize, seed: u64) -> PyResult<Vec<[f64; 6]>> {
    let params = GameParams::new(eps, 64, 0, steps as f64 * eps * eps * (1.0 + 1e-12)).map_err(to_py)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok(play_named(pt(start), &params, StrategyI::Gauge, StrategyII::Max, &mut rng).rows())
}

/// Runs a TOML configuration and returns the report as JSON.
#[pyfunction]
fn run_config(text: &str) -> PyResult<String> {
    let config = parse_config(text).map_err(to_py)?;
    run(&config).and_then(|o| o.report.to_json()).map_err(to_py)
}

#[pymodule]
fn heisenflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(mul, m)?)?;
    m.add_function(wrap_pyfunction!(koranyi, m)?)?;
    m.add_function(wrap_pyfunction!(dist, m)?)?;
    m.add_function(wrap_pyfunction!(exact_solution, m)?)?;
    m.add_function(wrap_pyfunction!(exact_residual, m)?)?;
    m.add_function(wrap_pyfunction!(extinction_time, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_sphere_game, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_sphere_pde, m)?)?;
    m.add_function(wrap_pyfunction!(zero_level, m)?)?;
    m.add_function(wrap_pyfunction!(profile_error, m)?)?;
    m.add_function(wrap_pyfunction!(play, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
