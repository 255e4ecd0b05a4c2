//! Finite-difference derivatives along the flows of the left-invariant fields.
//!
//! Moving along `X_i` from `p` for time `s` is right multiplication by `s·e_i`,
//! so every difference quotient here is built from group products only and is
//! independent of the closed-form derivative tables it is used to check.
//! Second differences are Richardson-extrapolated, which makes them exact for
//! polynomials of degree four or less up to round-off.

use crate::hgroup::{HPoint, HorDerivs, HorHessian};

/// Step for first-derivative central differences.
pub const FIRST_STEP: f64 = 1e-4;
/// Base step for the extrapolated second differences.
pub const SECOND_STEP: f64 = 1e-3;

fn unit(axis: usize, s: f64) -> HPoint {
    match axis {
        0 => HPoint::new(s, 0.0, 0.0),
        1 => HPoint::new(0.0, s, 0.0),
        _ => HPoint::new(0.0, 0.0, s),
    }
}

/// Central difference of `φ` along `X_{axis+1}` (axis 2 is `X3 = ∂3`).
pub fn first<F: Fn(HPoint) -> f64>(phi: &F, p: HPoint, axis: usize, h: f64) -> f64 {
    (phi(p * unit(axis, h)) - phi(p * unit(axis, -h))) / (2.0 * h)
}

fn mixed_raw<F: Fn(HPoint) -> f64>(phi: &F, p: HPoint, outer: usize, inner: usize, h: f64) -> f64 {
    if outer == inner {
        let a = phi(p * unit(outer, h));
        let b = phi(p);
        let c = phi(p * unit(outer, -h));
        return (a - 2.0 * b + c) / (h * h);
    }
    let at = |s: f64, t: f64| phi(p * unit(outer, s) * unit(inner, t));
    (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h)
}

/// `X_outer(X_inner φ)(p)` by extrapolated central differences.
pub fn mixed<F: Fn(HPoint) -> f64>(phi: &F, p: HPoint, outer: usize, inner: usize, h: f64) -> f64 {
    let fine = mixed_raw(phi, p, outer, inner, h);
    let coarse = mixed_raw(phi, p, outer, inner, 2.0 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Horizontal Hessian of a one-point function.
pub fn hessian<F: Fn(HPoint) -> f64>(phi: &F, p: HPoint, h: f64) -> HorHessian {
    HorHessian {
        x1x1: mixed(phi, p, 0, 0, h),
        x2x2: mixed(phi, p, 1, 1, h),
        x1x2: mixed(phi, p, 0, 1, h),
        x2x1: mixed(phi, p, 1, 0, h),
    }
}

/// All horizontal derivatives of `F(p, q)` in each argument separately.
pub fn two_point_derivs<F: Fn(HPoint, HPoint) -> f64>(f: &F, p: HPoint, q: HPoint, h1: f64, h2: f64) -> HorDerivs {
    let in_p = |x: HPoint| f(x, q);
    let in_q = |y: HPoint| f(p, y);
    HorDerivs {
        x1p: first(&in_p, p, 0, h1),
        x2p: first(&in_p, p, 1, h1),
        x1q: first(&in_q, q, 0, h1),
        x2q: first(&in_q, q, 1, h1),
        hess_p: hessian(&in_p, p, h2),
        hess_q: hessian(&in_q, q, h2),
    }
}

/// `|a - b| / max(1, |b|)`, the comparison used against finite-difference references.
pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn components(d: &HorDerivs) -> [f64; 12] {
    [
        d.x1p, d.x2p, d.x1q, d.x2q, d.hess_p.x1x1, d.hess_p.x2x2, d.hess_p.x1x2, d.hess_p.x2x1, d.hess_q.x1x1,
        d.hess_q.x2x2, d.hess_q.x1x2, d.hess_q.x2x1,
    ]
}

/// Worst [`rel_error`] over all twelve components.
pub fn max_rel_error(closed: &HorDerivs, reference: &HorDerivs) -> f64 {
    components(closed)
        .iter()
        .zip(components(reference))
        .map(|(a, b)| rel_error(*a, b))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartic_polynomials() {
        let phi = |p: HPoint| p.gauge4();
        let p = HPoint::new(0.7, -0.2, 0.4);
        // X1 X1 G = 12 p1² + 4 p2² + 8 p2² (g with q = 0)
        let expected = 12.0 * 0.49 + 12.0 * 0.04;
        assert!((mixed(&phi, p, 0, 0, SECOND_STEP) - expected).abs() < 1e-8);
        assert!((first(&phi, p, 2, FIRST_STEP) - 32.0 * 0.4).abs() < 1e-8);
    }
}
