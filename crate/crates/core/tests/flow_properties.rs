//! Geometric properties of evolved sphere data.

use heisenflow::axisym::{embed, AxiPoint, GridFn, GridSpec};
use heisenflow::exact::exact_solution;
use heisenflow::flow::{estimate_extinction, evolve_snapshots, extract_zero_level, Evolver, PdeEvolver};
use heisenflow::game::{GameParams, GameSolver};
use heisenflow::hgroup::HPoint;
use heisenflow::pde::PdeParams;

const M: f64 = 10.0;

fn sphere(nr: usize, nz: usize) -> GridFn {
    let spec = GridSpec::new(2.0, -2.0, 2.0, nr, nz, M).unwrap();
    GridFn::from_fn(spec, |r, z| (r.powi(4) + 16.0 * z * z - 1.0).min(M)).unwrap()
}

fn lipschitz(u: &GridFn) -> f64 {
    let s = u.spec;
    let mut lip: f64 = 0.0;
    for j in 0..s.nz {
        for i in 0..s.nr {
            if i + 1 < s.nr {
                lip = lip.max((u.get(i + 1, j) - u.get(i, j)).abs() / s.dr());
            }
            if j + 1 < s.nz {
                lip = lip.max((u.get(i, j + 1) - u.get(i, j)).abs() / s.dz());
            }
        }
    }
    lip
}

/// Largest Korányi radius of a node sharing a cell with a non-far node; the
/// bilinear interpolant equals `far` outside this ball.
fn interpolant_support(u: &GridFn) -> f64 {
    let s = u.spec;
    let mut rho: f64 = 0.0;
    for j in 0..s.nz {
        for i in 0..s.nr {
            let near = (j.saturating_sub(1)..=(j + 1).min(s.nz - 1))
                .any(|b| (i.saturating_sub(1)..=(i + 1).min(s.nr - 1)).any(|a| u.get(a, b) != s.far_field));
            if near {
                rho = rho.max(embed(AxiPoint::new(s.r(i), s.z(j)).unwrap()).koranyi());
            }
        }
    }
    rho
}

#[test]
fn game_keeps_far_field_outside_the_support_ball() {
    let u0 = sphere(81, 161);
    let rho = interpolant_support(&u0);
    assert!(rho > (M + 1.0).powf(0.25));
    let solver = GameSolver::new(u0.spec, GameParams::new(0.16, 64, 5, 1.0).unwrap()).unwrap();
    let mut u = u0;
    for step in 1..=20 {
        u = solver.step(&u).unwrap();
        let s = u.spec;
        for j in 0..s.nz {
            for i in 0..s.nr {
                if embed(AxiPoint::new(s.r(i), s.z(j)).unwrap()).koranyi() > rho {
                    assert!((u.get(i, j) - M).abs() <= 1e-10, "step {step}: node ({i}, {j}) = {}", u.get(i, j));
                }
            }
        }
    }
}

#[test]
fn game_curves_stay_inside_the_exact_sublevel_set() {
    let u0 = sphere(81, 161);
    let tol = 3.0 * u0.spec.diagonal() * lipschitz(&u0);
    let solver = GameSolver::new(u0.spec, GameParams::new(0.08, 64, 5, 1.0).unwrap()).unwrap();
    let times = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25];
    let snaps = evolve_snapshots(&solver, &u0, &times).unwrap();
    for (t, u) in &snaps {
        for (r, z) in extract_zero_level(u).vertices() {
            let w = exact_solution(HPoint::new(r, 0.0, z), *t);
            assert!(w <= 1.0 + tol, "t = {t}: vertex ({r}, {z}) has w = {w}, allowed {}", 1.0 + tol);
        }
    }
}

#[test]
fn enclosed_area_shrinks_for_both_backends() {
    let u0 = sphere(81, 161);
    let cell = u0.spec.dr() * u0.spec.dz();
    let game = GameSolver::new(u0.spec, GameParams::new(0.08, 64, 5, 1.0).unwrap()).unwrap();
    let pde = PdeEvolver { params: PdeParams::with_safe_dt(&u0.spec, PdeParams::default_reg(&u0.spec), 1.0).unwrap() };
    let times: Vec<f64> = (0..=10).map(|k| 0.025 * k as f64).collect();
    for ev in [&game as &dyn Evolver, &pde] {
        let areas: Vec<f64> =
            evolve_snapshots(ev, &u0, &times).unwrap().iter().map(|(_, u)| extract_zero_level(u).enclosed_area()).collect();
        assert!(areas[0] > 0.4, "initial area {}", areas[0]);
        for w in areas.windows(2) {
            assert!(w[1] <= w[0] + cell, "area regrew: {areas:?}");
        }
        assert!(areas.last().unwrap() < &(0.5 * areas[0]));
    }
}

#[test]
fn positive_field_is_extinct_at_time_zero() {
    let spec = GridSpec::new(1.0, -1.0, 1.0, 11, 21, 1.0).unwrap();
    let u0 = GridFn::constant(spec);
    let solver = GameSolver::new(spec, GameParams::new(0.1, 16, 0, 1.0).unwrap()).unwrap();
    let snaps = evolve_snapshots(&solver, &u0, &[0.0, 0.1]).unwrap();
    assert_eq!(estimate_extinction(&snaps, Some(&solver)).unwrap(), Some(0.0));
}

#[test]
fn surviving_curve_has_no_extinction_estimate() {
    let u0 = sphere(41, 81);
    let solver = GameSolver::new(u0.spec, GameParams::new(0.1, 64, 3, 1.0).unwrap()).unwrap();
    let snaps = evolve_snapshots(&solver, &u0, &[0.0, 0.05]).unwrap();
    assert_eq!(estimate_extinction(&snaps, Some(&solver)).unwrap(), None);
}
