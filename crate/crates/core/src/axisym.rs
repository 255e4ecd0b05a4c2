//! Axisymmetric reduction: `(r, z)` coordinates, the reduced game move, the
//! direction lift between points of one symmetry class, and sampled grid fields.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hgroup::{HPoint, HorDir};

/// Ring samples must match the far-field constant to this tolerance.
pub const RING_TOL: f64 = 1e-9;

/// Cylindrical coordinates `(r, z)` with `r = √(p1²+p2²)` and `z = p3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiPoint {
    pub r: f64,
    pub z: f64,
}

impl AxiPoint {
    pub fn new(r: f64, z: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be nonnegative, got {r}")));
        }
        Ok(Self { r, z })
    }
}

/// Canonical representative `(r, 0, z)` of a symmetry class.
pub fn embed(a: AxiPoint) -> HPoint {
    HPoint::new(a.r, 0.0, a.z)
}

pub fn reduce(p: HPoint) -> AxiPoint {
    AxiPoint { r: p.p1.hypot(p.p2), z: p.p3 }
}

/// Player sign `b = ±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `(r'², z')` after the move `(r,0,z)·(√2 ε b cosθ, √2 ε b sinθ, 0)`.
#[inline]
pub fn axi_move_sq(r: f64, z: f64, cos: f64, sin: f64, b: f64, eps: f64) -> (f64, f64) {
    let s2 = std::f64::consts::SQRT_2;
    let rr = r * r + 2.0 * s2 * eps * b * r * cos + 2.0 * eps * eps;
    (rr.max(0.0), z + 0.5 * s2 * eps * b * r * sin)
}

/// Reduced game move along direction angle `theta` with sign `b`.
pub fn axi_move(a: AxiPoint, theta: f64, b: Sign, eps: f64) -> AxiPoint {
    let (s, c) = theta.sin_cos();
    let (rr, z) = axi_move_sq(a.r, a.z, c, s, b.value(), eps);
    AxiPoint { r: rr.sqrt(), z }
}

/// Direction `v'` at `p_prime` that reproduces, up to rotation, the move of `v` at `p`.
///
/// Both points must share `(r, z)`; the lift is the rotation taking `(p1,p2)` to `(p'1,p'2)`.
pub fn lift_direction(p: HPoint, p_prime: HPoint, v: HorDir) -> Result<HorDir> {
    let rr = p.radius_sq();
    let a = reduce(p);
    let b = reduce(p_prime);
    let tol = 1e-9 * (1.0 + a.r.max(a.z.abs()));
    if (a.r - b.r).abs() > tol || (a.z - b.z).abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "points ({}, {}, {}) and ({}, {}, {}) are not in the same symmetry class",
            p.p1, p.p2, p.p3, p_prime.p1, p_prime.p2, p_prime.p3
        )));
    }
    if rr == 0.0 {
        return Err(Error::Degenerate("direction lift on the axis is not unique".into()));
    }
    let dot = p.p1 * p_prime.p1 + p.p2 * p_prime.p2;
    let cross = p.p1 * p_prime.p2 - p_prime.p1 * p.p2;
    let v1 = (dot * v.v1 - cross * v.v2) / rr;
    let v2 = (cross * v.v1 + dot * v.v2) / rr;
    HorDir::new(v1, v2)
}

/// Uniform node layout on `[0, r_max] × [z_min, z_max]` plus the far-field constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub nr: usize,
    pub nz: usize,
    pub far_field: f64,
}

impl GridSpec {
    pub fn new(r_max: f64, z_min: f64, z_max: f64, nr: usize, nz: usize, far_field: f64) -> Result<Self> {
        let s = Self { r_max, z_min, z_max, nr, nz, far_field };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0) || !self.r_max.is_finite() {
            return Err(Error::Grid(format!("r_max must be positive, got {}", self.r_max)));
        }
        if !(self.z_max > self.z_min) || !self.z_min.is_finite() || !self.z_max.is_finite() {
            return Err(Error::Grid(format!("need z_min < z_max, got [{}, {}]", self.z_min, self.z_max)));
        }
        if self.nr < 3 || self.nz < 3 {
            return Err(Error::Grid(format!("need at least 3 nodes per axis, got {}×{}", self.nr, self.nz)));
        }
        if !self.far_field.is_finite() {
            return Err(Error::Grid("far-field constant must be finite".into()));
        }
        Ok(())
    }

    pub fn dr(&self) -> f64 {
        self.r_max / (self.nr - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.nz - 1) as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_max * (i as f64 / (self.nr - 1) as f64)
    }

    /// Exact at both ends, so files listing node coordinates recover the bounds.
    pub fn z(&self, j: usize) -> f64 {
        let s = j as f64 / (self.nz - 1) as f64;
        self.z_min * (1.0 - s) + self.z_max * s
    }

    pub fn len(&self) -> usize {
        self.nr * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index, `z` outer and `r` inner.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nr + i
    }

    /// Nodes on the outer ring `r = r_max`, `z = z_min`, `z = z_max`. The axis is not part of it.
    pub fn on_ring(&self, i: usize, j: usize) -> bool {
        i == self.nr - 1 || j == 0 || j == self.nz - 1
    }

    pub fn diagonal(&self) -> f64 {
        self.dr().hypot(self.dz())
    }

    pub fn with_far_field(&self, far_field: f64) -> Self {
        Self { far_field, ..*self }
    }
}

#[inline]
fn lerp(a: f64, b: f64, s: f64) -> f64 {
    // weighted form is monotone in both corners under rounding, the clamp makes it exact on constants
    let v = (1.0 - s) * a + s * b;
    v.clamp(a.min(b), a.max(b))
}

/// A scalar field sampled on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFn {
    pub spec: GridSpec,
    values: Vec<f64>,
}

impl GridFn {
    /// Checks the sample count and that the ring carries the far-field constant.
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::Grid(format!("expected {} samples, got {}", spec.len(), values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite sample {v}")));
        }
        let g = Self { spec, values };
        g.check_ring()?;
        Ok(g)
    }

    pub(crate) fn new_unchecked(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(spec: GridSpec, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..spec.nz {
            let z = spec.z(j);
            for i in 0..spec.nr {
                values.push(f(spec.r(i), z));
            }
        }
        Self::new(spec, values)
    }

    pub fn constant(spec: GridSpec) -> Self {
        Self { spec, values: vec![spec.far_field; spec.len()] }
    }

    pub fn check_ring(&self) -> Result<()> {
        let s = &self.spec;
        for j in 0..s.nz {
            for i in 0..s.nr {
                if s.on_ring(i, j) {
                    let v = self.get(i, j);
                    if (v - s.far_field).abs() > RING_TOL {
                        return Err(Error::Grid(format!(
                            "ring node (r={}, z={}) has value {v}, far field is {}",
                            s.r(i),
                            s.z(j),
                            s.far_field
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Applies `f` samplewise, far field included.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        let spec = self.spec.with_far_field(f(self.spec.far_field));
        Self::new(spec, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Bilinear interpolation; the far-field constant outside the grid box.
    pub fn interp(&self, r: f64, z: f64) -> f64 {
        let s = &self.spec;
        let x = r / s.dr();
        let y = (z - s.z_min) / s.dz();
        let (nx, ny) = ((s.nr - 1) as f64, (s.nz - 1) as f64);
        if !(x >= 0.0 && x <= nx && y >= 0.0 && y <= ny) {
            return s.far_field;
        }
        let i = (x.floor() as usize).min(s.nr - 2);
        let j = (y.floor() as usize).min(s.nz - 2);
        self.interp_cell(i, x - i as f64, j, y - j as f64)
    }

    /// Interpolation inside cell `(i, j)` at local fractions `(sr, sz)` in `[0, 1]`.
    #[inline]
    pub fn interp_cell(&self, i: usize, sr: f64, j: usize, sz: f64) -> f64 {
        let k = self.spec.index(i, j);
        let nr = self.spec.nr;
        let lo = lerp(self.values[k], self.values[k + 1], sr);
        let hi = lerp(self.values[k + nr], self.values[k + nr + 1], sr);
        lerp(lo, hi, sz)
    }

    pub fn max_abs_diff(&self, other: &GridFn) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,z,value\n");
        let s = &self.spec;
        for j in 0..s.nz {
            for i in 0..s.nr {
                let _ = writeln!(out, "{},{},{}", s.r(i), s.z(j), self.get(i, j));
            }
        }
        out
    }

    /// Parses the CSV layout of [`GridFn::to_csv`]. The spec is recovered from the
    /// node coordinates and the far field from the ring.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "r,z,value" => {}
            other => return Err(Error::Parse(format!("expected header `r,z,value`, got {other:?}"))),
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 fields", n + 2)));
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f.parse().map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))?;
            }
            rows.push(vals);
        }
        let nr = rows.iter().position(|row| row[1] != rows[0][1]).unwrap_or(rows.len());
        if nr == 0 || rows.len() % nr != 0 {
            return Err(Error::Parse("samples do not form a rectangular grid".into()));
        }
        let nz = rows.len() / nr;
        let r_max = rows[nr - 1][0];
        let (z_min, z_max) = (rows[0][1], rows[rows.len() - 1][1]);
        let far = rows[rows.len() - 1][2];
        let spec = GridSpec::new(r_max, z_min, z_max, nr, nz, far)?;
        for (k, row) in rows.iter().enumerate() {
            let (i, j) = (k % nr, k / nr);
            if (row[0] - spec.r(i)).abs() > 1e-12 * (1.0 + r_max) || (row[1] - spec.z(j)).abs() > 1e-12 * (1.0 + z_max.abs().max(z_min.abs())) {
                return Err(Error::Parse(format!("line {}: node ({}, {}) is off the uniform grid", k + 2, row[0], row[1])));
            }
        }
        Self::new(spec, rows.into_iter().map(|r| r[2]).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            spec: GridSpec,
            values: Vec<f64>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Self::new(raw.spec, raw.values)
    }

    /// Reads CSV or JSON, chosen by file extension.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            Some("csv") => Self::from_csv(&text),
            other => Err(Error::Config(format!("unsupported grid file extension {other:?} for {}", path.display()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn small_spec() -> GridSpec {
        GridSpec::new(1.0, -1.0, 1.0, 5, 9, 2.0).unwrap()
    }

    #[test]
    fn embed_and_reduce() {
        assert_eq!(embed(AxiPoint::new(0.0, 0.0).unwrap()), HPoint::ORIGIN);
        assert_eq!(embed(AxiPoint::new(1.0, 2.0).unwrap()), HPoint::new(1.0, 0.0, 2.0));
        assert_eq!(reduce(HPoint::new(3.0, 4.0, 5.0)), AxiPoint { r: 5.0, z: 5.0 });
        assert_eq!(reduce(HPoint::new(0.0, 0.0, -0.3)), AxiPoint { r: 0.0, z: -0.3 });
        let a = AxiPoint::new(0.7, -0.2).unwrap();
        assert_eq!(reduce(embed(a)), a);
        assert!(AxiPoint::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn move_examples() {
        let eps = 0.05;
        for theta in [0.0, 1.0, 2.5, 4.0] {
            for b in [Sign::Plus, Sign::Minus] {
                let m = axi_move(AxiPoint { r: 0.0, z: 0.3 }, theta, b, eps);
                assert!((m.r - SQRT_2 * eps).abs() < 1e-15);
                assert_eq!(m.z, 0.3);
            }
        }
        let m = axi_move(AxiPoint { r: 1.0, z: 0.0 }, FRAC_PI_2, Sign::Plus, eps);
        assert!((m.r - (1.0 + 2.0 * eps * eps).sqrt()).abs() < 1e-15);
        assert!((m.z - eps / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn move_matches_group_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let a = AxiPoint { r: rng.random_range(0.0..2.0), z: rng.random_range(-2.0..2.0) };
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let b = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
            let eps = rng.random_range(0.01..0.2);
            let s = SQRT_2 * eps * b.value();
            let q = embed(a) * HPoint::new(s * theta.cos(), s * theta.sin(), 0.0);
            let via_group = reduce(q);
            let m = axi_move(a, theta, b, eps);
            assert!((via_group.r - m.r).abs() <= 1e-12 && (via_group.z - m.z).abs() <= 1e-12);
            let (rr, _) = axi_move_sq(a.r, a.z, theta.cos(), theta.sin(), b.value(), eps);
            assert!(rr >= 2.0 * eps * eps * theta.sin().powi(2) - 1e-15);
            let p = embed(a);
            let direct = q.gauge4();
            let expected = expanded_gauge(p, HorDir::new(theta.cos(), theta.sin()).unwrap(), b.value(), eps);
            assert!((direct - expected).abs() <= 1e-10 * (1.0 + direct), "{direct} vs {expected}");
        }
    }

    /// `G(p·(√2 ε b v))` expanded by hand from the group law.
    fn expanded_gauge(p: HPoint, v: HorDir, b: f64, eps: f64) -> f64 {
        let e2 = eps * eps;
        let r2 = p.radius_sq();
        let dot = p.p1 * v.v1 + p.p2 * v.v2;
        let wedge = p.p1 * v.v2 - p.p2 * v.v1;
        let cross = (r2 + 2.0 * e2) * dot + 4.0 * p.p3 * wedge;
        // |h|² = r2 + 2√2εb·dot + 2ε², z' = p3 + (√2/2)εb·wedge
        // G = (r2 + 2ε²)² + 8ε²dot² + 16p3² + 8ε²wedge² + 4√2εb·cross
        (r2 + 2.0 * e2).powi(2) + 8.0 * e2 * (dot * dot + wedge * wedge) + 16.0 * p.p3 * p.p3
            + 4.0 * SQRT_2 * eps * b * cross
    }

    #[test]
    fn lift_examples() {
        let v = HorDir::from_angle(0.3);
        let p = HPoint::new(0.6, -0.8, 0.1);
        assert_eq!(lift_direction(p, p, v).unwrap(), v);
        let l = lift_direction(HPoint::new(1.0, 0.0, 0.0), HPoint::new(0.0, 1.0, 0.0), v).unwrap();
        assert!((l.v1 + v.v2).abs() < 1e-15 && (l.v2 - v.v1).abs() < 1e-15);
        assert!(matches!(
            lift_direction(HPoint::new(0.0, 0.0, 1.0), HPoint::new(0.0, 0.0, 1.0), v),
            Err(Error::Degenerate(_))
        ));
        assert!(lift_direction(HPoint::new(1.0, 0.0, 0.0), HPoint::new(2.0, 0.0, 0.0), v).is_err());
    }

    #[test]
    fn lift_reproduces_moves() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let r = rng.random_range(0.05..2.0);
            let (a, b) = (rng.random_range(0.0..6.3f64), rng.random_range(0.0..6.3f64));
            let z = rng.random_range(-1.0..1.0);
            let p = HPoint::new(r * a.cos(), r * a.sin(), z);
            let pp = HPoint::new(r * b.cos(), r * b.sin(), z);
            let v = HorDir::from_angle(rng.random_range(0.0..6.3));
            let vp = lift_direction(p, pp, v).unwrap();
            assert!((vp.v1.hypot(vp.v2) - 1.0).abs() <= 1e-12);
            let s = SQRT_2 * 0.07 * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let m = reduce(p * HPoint::horizontal(v, s));
            let mp = reduce(pp * HPoint::horizontal(vp, s));
            assert!((m.r - mp.r).abs() <= 1e-10 && (m.z - mp.z).abs() <= 1e-10);
        }
    }

    #[test]
    fn grid_validation() {
        let spec = small_spec();
        assert!(GridFn::new(spec, vec![2.0; 10]).is_err());
        assert!(GridFn::from_fn(spec, |r, _| r).is_err());
        assert!(GridFn::from_fn(spec, |_, _| 2.0).is_ok());
        assert!(GridSpec::new(1.0, 1.0, 0.0, 5, 5, 0.0).is_err());
        assert_eq!(spec.dr(), 0.25);
        assert_eq!(spec.z(8), 1.0);
    }

    #[test]
    fn interpolation_properties() {
        let spec = GridSpec::new(1.0, -1.0, 1.0, 5, 9, 0.0).unwrap();
        // bilinear functions vanishing on the ring are reproduced exactly up to rounding
        let f = |r: f64, z: f64| (1.0 - r) * (1.0 - z.abs());
        let g = GridFn::from_fn(spec, f).unwrap();
        for &(r, z) in &[(0.1, 0.2), (0.33, -0.61), (0.9, 0.95)] {
            let exact = (1.0 - r) * (1.0 - f64::abs(z));
            assert!((g.interp(r, z) - exact).abs() < 1e-14);
        }
        assert_eq!(g.interp(1.5, 0.0), 0.0);
        assert_eq!(g.interp(0.5, 1.2), 0.0);
        assert_eq!(g.interp(0.25, 0.25), g.get(1, 5));
        let c = GridFn::constant(spec.with_far_field(0.3));
        assert_eq!(c.interp(0.123, -0.77), 0.3);
    }

    #[test]
    fn lerp_monotone_and_exact_on_constants() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200_000 {
            let a: f64 = rng.random_range(-20.0..20.0);
            let b: f64 = rng.random_range(-20.0..20.0);
            let s: f64 = if rng.random::<bool>() { rng.random() } else { 1.0 - rng.random::<f64>() * 1e-10 };
            let a2 = a.next_up();
            assert!(lerp(a2, b, s) >= lerp(a, b, s));
            assert_eq!(lerp(a, a, s), a);
        }
    }

    #[test]
    fn csv_and_json_round_trip() {
        let spec = small_spec();
        let g = GridFn::from_fn(spec, |r, z| if r == 1.0 || z.abs() == 1.0 { 2.0 } else { (r * 3.1).sin() + z / 3.0 }).unwrap();
        assert_eq!(GridFn::from_csv(&g.to_csv()).unwrap(), g);
        assert_eq!(GridFn::from_json(&g.to_json().unwrap()).unwrap(), g);
        assert!(GridFn::from_csv("a,b\n1,2").is_err());
    }
}
