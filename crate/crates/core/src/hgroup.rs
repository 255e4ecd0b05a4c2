//! Heisenberg group algebra in exponential coordinates.
//!
//! The group law is `(p·q)_3 = p3 + q3 + (p1 q2 - q1 p2)/2`, the Korányi gauge is
//! `|p| = ((p1²+p2²)² + 16 p3²)^{1/4}` and the left-invariant frame is
//! `X1 = ∂1 - (p2/2)∂3`, `X2 = ∂2 + (p1/2)∂3`, `X3 = ∂3`.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `v1² + v2² = 1` for horizontal directions.
pub const UNIT_TOL: f64 = 1e-12;

/// A point of the Heisenberg group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint { p1: 0.0, p2: 0.0, p3: 0.0 };

    pub const fn new(p1: f64, p2: f64, p3: f64) -> Self {
        Self { p1, p2, p3 }
    }

    /// Horizontal increment `(s·v1, s·v2, 0)`.
    pub fn horizontal(v: HorDir, s: f64) -> Self {
        Self::new(s * v.v1, s * v.v2, 0.0)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, q: HPoint) -> HPoint {
        HPoint {
            p1: self.p1 + q.p1,
            p2: self.p2 + q.p2,
            p3: self.p3 + q.p3 + 0.5 * (self.p1 * q.p2 - q.p1 * self.p2),
        }
    }

    pub fn inv(self) -> HPoint {
        HPoint::new(-self.p1, -self.p2, -self.p3)
    }

    /// Squared horizontal radius `p1² + p2²`.
    pub fn radius_sq(self) -> f64 {
        self.p1 * self.p1 + self.p2 * self.p2
    }

    /// Fourth power of the Korányi gauge, `(p1²+p2²)² + 16 p3²`.
    pub fn gauge4(self) -> f64 {
        let rr = self.radius_sq();
        rr * rr + 16.0 * self.p3 * self.p3
    }

    pub fn koranyi(self) -> f64 {
        self.gauge4().sqrt().sqrt()
    }

    /// Left-invariant Korányi distance `|q⁻¹·p|`.
    pub fn dist(self, q: HPoint) -> f64 {
        q.inv().mul(self).koranyi()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }
}

impl Mul for HPoint {
    type Output = HPoint;

    fn mul(self, rhs: HPoint) -> HPoint {
        HPoint::mul(self, rhs)
    }
}

impl From<[f64; 3]> for HPoint {
    fn from(a: [f64; 3]) -> Self {
        HPoint::new(a[0], a[1], a[2])
    }
}

/// A unit horizontal direction, an element of S¹_h.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorDir {
    pub v1: f64,
    pub v2: f64,
}

impl HorDir {
    /// Validates unit length to within [`UNIT_TOL`].
    pub fn new(v1: f64, v2: f64) -> Result<Self> {
        let n = v1 * v1 + v2 * v2;
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "horizontal direction ({v1}, {v2}) is not unit length"
            )));
        }
        Ok(Self { v1, v2 })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(v1: f64, v2: f64) -> Option<Self> {
        let n = v1.hypot(v2);
        (n > 0.0 && n.is_finite()).then(|| Self { v1: v1 / n, v2: v2 / n })
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { v1: c, v2: s }
    }

    pub fn angle(self) -> f64 {
        self.v2.atan2(self.v1)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Self { v1: -self.v1, v2: -self.v2 }
    }

    /// `M` uniformly spaced directions `θ_j = 2πj/M`.
    pub fn uniform(m: usize) -> Vec<HorDir> {
        (0..m)
            .map(|j| HorDir::from_angle(std::f64::consts::TAU * j as f64 / m as f64))
            .collect()
    }
}

/// Second horizontal derivatives with respect to one argument.
///
/// `x1x2` is `X1(X2 f)` and `x2x1` is `X2(X1 f)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HorHessian {
    pub x1x1: f64,
    pub x2x2: f64,
    pub x1x2: f64,
    pub x2x1: f64,
}

impl HorHessian {
    /// Symmetrized horizontal Hessian `(∇²_H f)*`.
    pub fn symmetrized(&self) -> [[f64; 2]; 2] {
        let off = 0.5 * (self.x1x2 + self.x2x1);
        [[self.x1x1, off], [off, self.x2x2]]
    }
}

/// First and second horizontal derivatives of a two-point function `F(p, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HorDerivs {
    pub x1p: f64,
    pub x2p: f64,
    pub x1q: f64,
    pub x2q: f64,
    pub hess_p: HorHessian,
    pub hess_q: HorHessian,
}

/// Closed-form derivatives of `f(p, q) = d(p, q)⁴ = |q⁻¹·p|⁴`.
pub fn f_derivs(p: HPoint, q: HPoint) -> HorDerivs {
    let d1 = p.p1 - q.p1;
    let d2 = p.p2 - q.p2;
    let a = 4.0 * (d1 * d1 + d2 * d2);
    let b = 16.0 * (p.p3 - q.p3 + 0.5 * (q.p2 * p.p1 - q.p1 * p.p2));
    let diag = 12.0 * (d1 * d1 + d2 * d2);
    HorDerivs {
        x1p: a * d1 - b * d2,
        x2p: a * d2 + b * d1,
        x1q: -a * d1 - b * d2,
        x2q: -a * d2 + b * d1,
        hess_p: HorHessian { x1x1: diag, x2x2: diag, x1x2: b, x2x1: -b },
        hess_q: HorHessian { x1x1: diag, x2x2: diag, x1x2: -b, x2x1: b },
    }
}

/// Closed-form derivatives of `g(p, q) = |p·q⁻¹|⁴`.
pub fn g_derivs(p: HPoint, q: HPoint) -> HorDerivs {
    let d1 = p.p1 - q.p1;
    let d2 = p.p2 - q.p2;
    let s1 = p.p1 + q.p1;
    let s2 = p.p2 + q.p2;
    let a = 4.0 * (d1 * d1 + d2 * d2);
    let c = p.p3 - q.p3 - 0.5 * p.p1 * q.p2 + 0.5 * p.p2 * q.p1;
    let x1x1 = 12.0 * d1 * d1 + 4.0 * d2 * d2 + 8.0 * s2 * s2;
    let x2x2 = 4.0 * d1 * d1 + 12.0 * d2 * d2 + 8.0 * s1 * s1;
    let mixed = 8.0 * d1 * d2 - 8.0 * s1 * s2;
    HorDerivs {
        x1p: a * d1 - 16.0 * s2 * c,
        x2p: a * d2 + 16.0 * s1 * c,
        x1q: -a * d1 + 16.0 * s2 * c,
        x2q: -a * d2 - 16.0 * s1 * c,
        hess_p: HorHessian { x1x1, x2x2, x1x2: mixed + 16.0 * c, x2x1: mixed - 16.0 * c },
        hess_q: HorHessian { x1x1, x2x2, x1x2: mixed - 16.0 * c, x2x1: mixed + 16.0 * c },
    }
}

/// Value of `tr[(I - n⊗n) Y]` for a horizontal gradient and a symmetric 2×2 matrix.
///
/// Returns `(lower, upper)`. Away from characteristic points both equal the
/// operator value. Where the gradient vanishes the pair is the envelope over all
/// unit `n`, i.e. `(tr Y - λmax, tr Y - λmin)`.
pub fn level_set_operator(grad: [f64; 2], hess: [[f64; 2]; 2], char_tol: f64) -> (f64, f64) {
    let tr = hess[0][0] + hess[1][1];
    let g2 = grad[0] * grad[0] + grad[1] * grad[1];
    if g2 > char_tol * char_tol {
        let quad = grad[0] * grad[0] * hess[0][0]
            + 2.0 * grad[0] * grad[1] * hess[0][1]
            + grad[1] * grad[1] * hess[1][1];
        let v = tr - quad / g2;
        (v, v)
    } else {
        let half = 0.5 * (hess[0][0] - hess[1][1]);
        let rad = (half * half + hess[0][1] * hess[0][1]).sqrt();
        let mid = 0.5 * tr;
        let (lmin, lmax) = (mid - rad, mid + rad);
        (tr - lmax, tr - lmin)
    }
}
