//! Closed-form references: the explicit gauge solution and its translates,
//! semi-convolutions of initial data, extinction time and the limiting ellipsoid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hgroup::{level_set_operator, HPoint};

/// Gradients smaller than this are treated as characteristic in residual checks.
const CHAR_TOL: f64 = 1e-12;

/// `w(p,t) = (p1²+p2²)² + 12t(p1²+p2²) + 16p3² + 12t²`, the solution issued from the gauge.
pub fn exact_solution(p: HPoint, t: f64) -> f64 {
    let rr = p.radius_sq();
    rr * rr + 12.0 * t * rr + 16.0 * p.p3 * p.p3 + 12.0 * t * t
}

/// Left translate, scale and offset of [`exact_solution`]: `L·w(p̂⁻¹·p, t) + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslatedSolutionSpec {
    pub center: HPoint,
    pub scale: f64,
    pub offset: f64,
}

impl TranslatedSolutionSpec {
    pub fn new(center: HPoint, scale: f64, offset: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { center, scale, offset })
    }

    pub fn identity() -> Self {
        Self { center: HPoint::ORIGIN, scale: 1.0, offset: 0.0 }
    }
}

pub fn exact_solution_translated(p: HPoint, t: f64, spec: &TranslatedSolutionSpec) -> f64 {
    spec.offset + spec.scale * exact_solution(spec.center.inv() * p, t)
}

/// Time derivative, horizontal gradient and symmetrized horizontal Hessian of `w`.
struct Table {
    wt: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
}

fn table(p: HPoint, t: f64) -> Table {
    let rr = p.radius_sq();
    let k = 4.0 * rr + 24.0 * t;
    let diag = 12.0 * rr + 24.0 * t;
    let x1x2 = 16.0 * p.p3;
    let x2x1 = -16.0 * p.p3;
    let off = 0.5 * (x1x2 + x2x1);
    Table {
        wt: 12.0 * rr + 24.0 * t,
        grad: [k * p.p1 - 16.0 * p.p2 * p.p3, k * p.p2 + 16.0 * p.p1 * p.p3],
        hess: [[diag, off], [off, diag]],
    }
}

fn residual_of(tab: &Table) -> f64 {
    let (lo, hi) = level_set_operator(tab.grad, tab.hess, CHAR_TOL);
    if tab.wt < lo {
        tab.wt - lo
    } else if tab.wt > hi {
        tab.wt - hi
    } else {
        0.0
    }
}

/// `w_t - tr[(I - n⊗n)(∇²_H w)*]` from the closed-form derivative table.
///
/// At characteristic points the operator is replaced by its envelope over unit
/// `n` and the residual is the distance of `w_t` from that interval.
pub fn exact_residual(p: HPoint, t: f64) -> f64 {
    residual_of(&table(p, t))
}

/// Residual of the translated solution. Derivatives of `L·w(p̂⁻¹·p)` along the
/// left-invariant frame are `L` times those of `w` at `p̂⁻¹·p`.
pub fn exact_residual_translated(p: HPoint, t: f64, spec: &TranslatedSolutionSpec) -> f64 {
    let mut tab = table(spec.center.inv() * p, t);
    let l = spec.scale;
    tab.wt *= l;
    tab.grad = [l * tab.grad[0], l * tab.grad[1]];
    for row in &mut tab.hess {
        for v in row.iter_mut() {
            *v *= l;
        }
    }
    residual_of(&tab)
}

/// Extinction time `r²/√12` of the Korányi sphere of radius `r`.
pub fn extinction_time(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    Ok(r * r / 12f64.sqrt())
}

/// The limiting ellipsoid `12T(P1²+P2²) + 16P3² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidProfile {
    pub t_ext: f64,
}

impl EllipsoidProfile {
    pub fn new(t_ext: f64) -> Result<Self> {
        if !(t_ext > 0.0) || !t_ext.is_finite() {
            return Err(Error::InvalidArgument(format!("extinction time must be positive, got {t_ext}")));
        }
        Ok(Self { t_ext })
    }

    /// Profile of the sphere of radius `r`.
    pub fn for_sphere(r: f64) -> Result<Self> {
        Self::new(extinction_time(r)?)
    }

    /// Semi-axes `(a_r, a_z)` of the trace in the `(r, z)` half-plane.
    pub fn semi_axes(&self) -> (f64, f64) {
        ((12.0 * self.t_ext).sqrt().recip(), 0.25)
    }
}

/// `12T(P1²+P2²) + 16P3² - 1`, zero on the ellipsoid.
pub fn ellipsoid_value(profile: &EllipsoidProfile, p: HPoint) -> f64 {
    12.0 * profile.t_ext * p.radius_sq() + 16.0 * p.p3 * p.p3 - 1.0
}

/// Axis-aligned box in exponential coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lo: HPoint,
    pub hi: HPoint,
}

impl SupportBox {
    pub fn new(lo: HPoint, hi: HPoint) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, p: HPoint) -> bool {
        (self.lo.p1..=self.hi.p1).contains(&p.p1)
            && (self.lo.p2..=self.hi.p2).contains(&p.p2)
            && (self.lo.p3..=self.hi.p3).contains(&p.p3)
    }

    fn inflate(&self, d: f64) -> Self {
        Self {
            lo: HPoint::new(self.lo.p1 - d, self.lo.p2 - d, self.lo.p3 - d),
            hi: HPoint::new(self.hi.p1 + d, self.hi.p2 + d, self.hi.p3 + d),
        }
    }

    fn intersect(&self, o: &Self) -> Option<Self> {
        let lo = HPoint::new(self.lo.p1.max(o.lo.p1), self.lo.p2.max(o.lo.p2), self.lo.p3.max(o.lo.p3));
        let hi = HPoint::new(self.hi.p1.min(o.hi.p1), self.hi.p2.min(o.hi.p2), self.hi.p3.min(o.hi.p3));
        (lo.p1 <= hi.p1 && lo.p2 <= hi.p2 && lo.p3 <= hi.p3).then_some(Self { lo, hi })
    }
}

/// What a semi-convolution needs to know about bounded initial data: where it is
/// not constant, the constant outside, and `sup |u0|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub support: SupportBox,
    pub far_field: Option<f64>,
    pub sup_abs: f64,
}

/// Sup-convolution `ψ^L(p) = sup_q {u0(q) - L·G(p⁻¹·q)}` by lattice search.
///
/// Maximizers satisfy `|p⁻¹·q| ≤ (2 sup|u0| / L)^{1/4}`, so only lattice points of
/// the support box (inflated by one spacing) inside the Euclidean hull of that
/// Korányi ball are visited. `q = p` is always a candidate, hence `ψ^L ≥ u0`.
pub fn sup_convolution<F: Fn(HPoint) -> f64>(u0: F, decl: &FieldDecl, l: f64, p: HPoint, spacing: f64) -> Result<f64> {
    if decl.far_field.is_none() {
        return Err(Error::InvalidArgument("initial field has no declared far-field constant".into()));
    }
    if !(l > 0.0) || !(spacing > 0.0) {
        return Err(Error::InvalidArgument(format!("need L > 0 and spacing > 0, got L={l}, spacing={spacing}")));
    }
    let rho = (2.0 * decl.sup_abs / l).sqrt().sqrt();
    let zr = 0.25 * rho * rho + 0.5 * (p.p1.abs() + p.p2.abs()) * rho;
    let ball = SupportBox::new(
        HPoint::new(p.p1 - rho, p.p2 - rho, p.p3 - zr),
        HPoint::new(p.p1 + rho, p.p2 + rho, p.p3 + zr),
    );
    let mut best = u0(p);
    let Some(region) = decl.support.inflate(spacing).intersect(&ball) else {
        return Ok(best);
    };
    let range = |lo: f64, hi: f64| (lo / spacing).ceil() as i64..=(hi / spacing).floor() as i64;
    let pinv = p.inv();
    for i in range(region.lo.p1, region.hi.p1) {
        for j in range(region.lo.p2, region.hi.p2) {
            for k in range(region.lo.p3, region.hi.p3) {
                let q = HPoint::new(i as f64 * spacing, j as f64 * spacing, k as f64 * spacing);
                let v = u0(q) - l * (pinv * q).gauge4();
                if v > best {
                    best = v;
                }
            }
        }
    }
    Ok(best)
}

/// Inf-convolution `ψ_L(p) = inf_q {u0(q) + L·G(p⁻¹·q)} = -sup_conv(-u0)`.
pub fn inf_convolution<F: Fn(HPoint) -> f64>(u0: F, decl: &FieldDecl, l: f64, p: HPoint, spacing: f64) -> Result<f64> {
    let neg = FieldDecl { far_field: decl.far_field.map(|c| -c), ..*decl };
    sup_convolution(|q| -u0(q), &neg, l, p, spacing).map(|v| -v)
}
