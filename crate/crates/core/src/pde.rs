//! Explicit finite differences for the regularized level-set equation
//! `u_t = tr[(I - ∇u⊗∇u / (|∇_H u|² + reg²)) (∇²_H u)*]` on the axisymmetric grid.
//!
//! At `(r, 0, z)` the horizontal gradient is `(u_r, (r/2) u_z)` and the reduced
//! operator is
//!
//! ```text
//! [ (r²/4)u_z² u_rr - (r²/2) u_r u_z u_rz + (r²/4) u_r² u_zz + u_r³/r + reg² ΔH u ]
//!     / (u_r² + (r²/4) u_z² + reg²)
//! ```
//!
//! with `ΔH u = u_rr + u_r/r + (r²/4) u_zz`. On the axis the operator is replaced
//! by its `reg → 0` limit `u_rr(0, z)`, computed from the even extension in `r`.

use serde::{Deserialize, Serialize};

use crate::axisym::{GridFn, GridSpec};
use crate::error::{Error, Result};

/// Safety factor of the stability limit.
pub const CFL_SAFETY: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeParams {
    pub reg: f64,
    pub dt: f64,
    pub t_end: f64,
}

impl PdeParams {
    pub fn new(reg: f64, dt: f64, t_end: f64) -> Result<Self> {
        if !(reg >= 0.0) || !reg.is_finite() {
            return Err(Error::InvalidArgument(format!("regularization must be nonnegative, got {reg}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidArgument(format!("end time must be nonnegative, got {t_end}")));
        }
        Ok(Self { reg, dt, t_end })
    }

    /// Default regularization `max(Δr, Δz)`.
    pub fn default_reg(spec: &GridSpec) -> f64 {
        spec.dr().max(spec.dz())
    }

    /// Largest step admitted for any field on `spec` by the a-priori coefficient bound.
    pub fn safe_dt(spec: &GridSpec) -> f64 {
        let h = spec.dr().min(spec.dz());
        let r = spec.r_max;
        let bound = 1f64.max(r * r / 4.0).max(r / 2.0);
        CFL_SAFETY * h * h / (1.0 + bound)
    }

    pub fn with_safe_dt(spec: &GridSpec, reg: f64, t_end: f64) -> Result<Self> {
        Self::new(reg, Self::safe_dt(spec), t_end)
    }
}

/// Central-difference derivatives at an interior node.
#[derive(Clone, Copy, Debug)]
struct Derivs {
    ur: f64,
    uz: f64,
    urr: f64,
    uzz: f64,
    urz: f64,
}

fn derivs(u: &GridFn, i: usize, j: usize) -> Derivs {
    let s = &u.spec;
    let (dr, dz) = (s.dr(), s.dz());
    let c = u.get(i, j);
    let (e, w, n, so) = (u.get(i + 1, j), u.get(i - 1, j), u.get(i, j + 1), u.get(i, j - 1));
    Derivs {
        ur: (e - w) / (2.0 * dr),
        uz: (n - so) / (2.0 * dz),
        urr: (e - 2.0 * c + w) / (dr * dr),
        uzz: (n - 2.0 * c + so) / (dz * dz),
        urz: (u.get(i + 1, j + 1) - u.get(i + 1, j - 1) - u.get(i - 1, j + 1) + u.get(i - 1, j - 1)) / (4.0 * dr * dz),
    }
}

/// Value and frozen coefficients `(a_rr, a_zz, |a_rz|, a_r·h)` of the reduced operator.
fn reduced(d: &Derivs, r: f64, reg: f64, h: f64) -> (f64, f64) {
    let q = 0.25 * r * r;
    let reg2 = reg * reg;
    let den = d.ur * d.ur + q * d.uz * d.uz + reg2;
    if den == 0.0 {
        return (0.0, 0.0);
    }
    let a = (q * d.uz * d.uz + reg2) / den;
    let c = (q * d.ur * d.ur + reg2 * q) / den;
    let b = -2.0 * q * d.ur * d.uz / den;
    let adv = (d.ur * d.ur + reg2) / (r * den);
    let value = a * d.urr + b * d.urz + c * d.uzz + adv * d.ur;
    let coef = a.max(c).max(b.abs()).max(adv * h);
    (value, coef)
}

/// Reduced operator at an interior node `(i, j)` with `i ≥ 1`.
///
/// Fails on the axis, where [`axis_operator`] applies, and on the outer ring.
pub fn axisym_operator(u: &GridFn, node: (usize, usize), reg: f64) -> Result<f64> {
    let (i, j) = node;
    let s = &u.spec;
    if i == 0 {
        return Err(Error::InvalidArgument("the reduced operator is singular at r = 0; use the axis rule".into()));
    }
    if i >= s.nr - 1 || j == 0 || j >= s.nz - 1 {
        return Err(Error::InvalidArgument(format!("node ({i}, {j}) is not interior")));
    }
    let h = s.dr().min(s.dz());
    Ok(reduced(&derivs(u, i, j), s.r(i), reg, h).0)
}

/// Axis rule `u_rr(0, z)` with the even extension `u(-Δr, z) = u(Δr, z)`.
pub fn axis_operator(u: &GridFn, j: usize) -> f64 {
    let dr = u.spec.dr();
    2.0 * (u.get(1, j) - u.get(0, j)) / (dr * dr)
}

/// Stability limit `0.2·min(Δr,Δz)² / (1 + κ)` for the coefficients `κ` frozen at `u`.
pub fn cfl_limit(u: &GridFn, reg: f64) -> f64 {
    let (_, kappa) = operator_field(u, reg);
    let s = &u.spec;
    let h = s.dr().min(s.dz());
    CFL_SAFETY * h * h / (1.0 + kappa)
}

/// Operator values at every node (zero on the ring) and the largest frozen coefficient.
fn operator_field(u: &GridFn, reg: f64) -> (Vec<f64>, f64) {
    let s = &u.spec;
    let h = s.dr().min(s.dz());
    let mut out = vec![0.0; s.len()];
    let mut kappa: f64 = 1.0;
    for j in 1..s.nz - 1 {
        out[s.index(0, j)] = axis_operator(u, j);
        for i in 1..s.nr - 1 {
            let (v, c) = reduced(&derivs(u, i, j), s.r(i), reg, h);
            out[s.index(i, j)] = v;
            kappa = kappa.max(c);
        }
    }
    (out, kappa)
}

fn advance(u: &GridFn, reg: f64, dt: f64, check: bool) -> Result<GridFn> {
    let (f, kappa) = operator_field(u, reg);
    let s = &u.spec;
    let h = s.dr().min(s.dz());
    let limit = CFL_SAFETY * h * h / (1.0 + kappa);
    if check && dt > limit {
        return Err(Error::Cfl { dt, limit });
    }
    let mut out = u.values().to_vec();
    for j in 1..s.nz - 1 {
        for i in 0..s.nr - 1 {
            let k = s.index(i, j);
            out[k] += dt * f[k];
        }
    }
    Ok(GridFn::new_unchecked(u.spec, out))
}

/// One forward-Euler step; the ring stays at the far field.
pub fn pde_step(u: &GridFn, params: &PdeParams) -> Result<GridFn> {
    advance(u, params.reg, params.dt, true)
}

/// Steps of size `dt` to `t_end`; a final shorter step lands exactly on `t_end`.
pub fn solve_pde(u0: &GridFn, params: &PdeParams) -> Result<GridFn> {
    u0.check_ring()?;
    let mut u = u0.clone();
    let mut t = 0.0;
    while t < params.t_end {
        let dt = params.dt.min(params.t_end - t);
        u = advance(&u, params.reg, dt, true)?;
        t = if dt < params.dt { params.t_end } else { t + dt };
    }
    Ok(u)
}
