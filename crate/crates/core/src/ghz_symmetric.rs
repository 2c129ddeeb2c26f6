//! GHZ-symmetric states: the (x, y) triangle, the GHZ/W border curve, the
//! exact three-tangle surface over the triangle, and the witness planes that
//! approximate it from below.
//!
//! A GHZ-symmetric state has the entries `a` at (000,000) and (111,111), `b`
//! on the six remaining diagonal positions and `x` at (000,111) and
//! (111,000). The coordinates are
//!
//! ```text
//! x = (<GHZ+|rho|GHZ+> - <GHZ-|rho|GHZ->) / 2
//! y = (<GHZ+|rho|GHZ+> + <GHZ-|rho|GHZ-> - 1/4) / sqrt(3)
//! ```
//!
//! so that `a = 1/8 + sqrt(3) y / 2` and `b = 1/8 - y / (2 sqrt(3))`. In these
//! coordinates the Hilbert-Schmidt distance is Euclidean and the state space
//! is the triangle with corners GHZ+ = (1/2, sqrt(3)/4), GHZ- = (-1/2,
//! sqrt(3)/4) and the separable mixture (0, -sqrt(3)/12).

use serde::{Deserialize, Serialize};

use crate::config::{COORDS_TOL, SYMMETRIC_SHAPE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DensityMatrix};
use crate::states::{ghz_minus, ghz_plus};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// The GHZ+ corner of the triangle.
pub const GHZ_CORNER: (f64, f64) = (0.5, SQRT3 / 4.0);
/// The lower corner (separable mixture).
pub const LOWER_CORNER: (f64, f64) = (0.0, -SQRT3 / 12.0);

const BISECTION_MAX_ITER: usize = 200;

/// Location of a GHZ-symmetric state in the (x, y) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymCoords {
    pub x: f64,
    pub y: f64,
}

/// `a(y) = 1/8 + sqrt(3) y / 2`, the corner diagonal entry.
pub fn corner_entry(y: f64) -> f64 {
    0.125 + SQRT3 * y / 2.0
}

/// `b(y) = 1/8 - y / (2 sqrt(3))`, the inner diagonal entry.
pub fn inner_entry(y: f64) -> f64 {
    0.125 - y / (2.0 * SQRT3)
}

impl SymCoords {
    /// Checked constructor: the point must lie in the physical triangle.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let c = Self { x, y };
        if !c.is_physical() {
            return Err(Error::UnphysicalCoords { x, y });
        }
        Ok(c)
    }

    pub(crate) fn new_unchecked(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_physical(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.x.abs() <= corner_entry(self.y) + COORDS_TOL
            && inner_entry(self.y) >= -COORDS_TOL
            && self.y >= LOWER_CORNER.1 - COORDS_TOL
    }

    /// Mirror image with non-negative x.
    pub fn mirrored(&self) -> Self {
        Self {
            x: self.x.abs(),
            y: self.y,
        }
    }

    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        Self {
            x: self.x + t * (other.x - self.x),
            y: self.y + t * (other.y - self.y),
        }
    }
}

/// Quantitative witnesses for the three-tangle of symmetric states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    /// `3/4 - |GHZ+><GHZ+|`.
    ProjectorGHZ,
    /// `3/4 - |GHZ+><GHZ+| - 3/7 |GHZ-><GHZ-|`, tangent at (3/8, sqrt(3)/6).
    TangentPlus,
    /// `3/4 - |GHZ-><GHZ-| - 3/7 |GHZ+><GHZ+|`, tangent at (-3/8, sqrt(3)/6).
    TangentMinus,
}

impl WitnessKind {
    pub const ALL: [WitnessKind; 3] = [
        WitnessKind::ProjectorGHZ,
        WitnessKind::TangentPlus,
        WitnessKind::TangentMinus,
    ];
}

/// The symmetric state at the given coordinates.
pub fn state_of_coords(c: SymCoords) -> Result<DensityMatrix> {
    if !c.is_physical() {
        return Err(Error::UnphysicalCoords { x: c.x, y: c.y });
    }
    let a = corner_entry(c.y);
    let b = inner_entry(c.y).max(0.0);
    let mut m = ComplexMatrix::diag_real(&[a, b, b, b, b, b, b, a]);
    m[(0, 7)] = self::c(c.x, 0.0);
    m[(7, 0)] = self::c(c.x, 0.0);
    DensityMatrix::new(m)
}

/// Coordinates of a state that already has the GHZ-symmetric shape.
///
/// Sub-normalized inputs are rescaled to unit trace first.
pub fn coords_of_symmetric(rho: &DensityMatrix) -> Result<SymCoords> {
    let m = rho.matrix();
    let tr = rho.trace();
    let a = m[(0, 0)].re;
    let b = m[(1, 1)].re;
    let mut worst: f64 = (m[(7, 7)].re - a).abs().max(m[(0, 7)].im.abs());
    for i in 0..8 {
        for j in 0..8 {
            let allowed = i == j || (i, j) == (0, 7) || (i, j) == (7, 0);
            if !allowed {
                worst = worst.max(m[(i, j)].norm());
            }
        }
        if (1..7).contains(&i) {
            worst = worst.max((m[(i, i)].re - b).abs());
        }
    }
    if worst > SYMMETRIC_SHAPE_TOL {
        return Err(Error::NotGhzSymmetric(worst));
    }
    let fp = rho.expectation(&ghz_plus()) / tr;
    let fm = rho.expectation(&ghz_minus()) / tr;
    Ok(SymCoords::new_unchecked(
        0.5 * (fp - fm),
        (fp + fm - 0.25) / SQRT3,
    ))
}

/// Point of the GHZ/W border curve for parameter `v` in [-1, 1].
pub fn ghz_w_line(v: f64) -> Result<SymCoords> {
    if !(-1.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange { name: "v", value: v });
    }
    Ok(ghz_w_point(v))
}

fn ghz_w_point(v: f64) -> SymCoords {
    let v2 = v * v;
    let den = 4.0 - v2;
    SymCoords {
        x: (v2 * v2 * v + 8.0 * v2 * v) / (8.0 * den),
        y: SQRT3 / 4.0 * (4.0 - v2 - v2 * v2) / den,
    }
}

fn cross_from_corner(p: SymCoords, q: SymCoords) -> f64 {
    let (gx, gy) = GHZ_CORNER;
    (p.x - gx) * (q.y - gy) - (p.y - gy) * (q.x - gx)
}

/// Intersection of the GHZ/W line with the ray from GHZ+ through the
/// mirrored point `(|x|, y)`.
///
/// Returns the curve parameter `v*` in [0, 1] and the intersection point.
pub fn wline_intersection(c: SymCoords) -> Result<(f64, SymCoords)> {
    let p = c.mirrored();
    let (gx, gy) = GHZ_CORNER;
    if (p.x - gx).hypot(p.y - gy) < 1e-15 {
        return Err(Error::NoIntersection("point coincides with GHZ+".into()));
    }
    // The bearing of curve points seen from GHZ+ is monotone on [0, 1]:
    // the cross product is <= 0 at v = 0 and >= 0 at v = 1 for any ray
    // that enters the right half of the triangle.
    let f = |v: f64| cross_from_corner(p, ghz_w_point(v));
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok((0.0, ghz_w_point(0.0)));
    }
    if fhi == 0.0 {
        return Ok((1.0, ghz_w_point(1.0)));
    }
    if flo.signum() == fhi.signum() {
        // rays through points within rounding of the lower edge
        let v = if flo.abs() < fhi.abs() { 0.0 } else { 1.0 };
        if flo.abs().min(fhi.abs()) <= 1e-12 {
            return Ok((v, ghz_w_point(v)));
        }
        return Err(Error::NoIntersection(format!(
            "no sign change for ({}, {})",
            c.x, c.y
        )));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    Ok((v, ghz_w_point(v)))
}

/// Exact (convex-roof) three-tangle of the symmetric state at `c`.
pub fn tau3_symmetric_exact(c: SymCoords) -> Result<f64> {
    if !c.is_physical() {
        return Err(Error::UnphysicalCoords { x: c.x, y: c.y });
    }
    Ok(tau3_symmetric_exact_unchecked(c))
}

pub(crate) fn tau3_symmetric_exact_unchecked(c: SymCoords) -> f64 {
    let p = c.mirrored();
    let (gx, gy) = GHZ_CORNER;
    let dist_c = (p.x - gx).hypot(p.y - gy);
    if dist_c < 1e-15 {
        return 1.0;
    }
    let (_, w) = match wline_intersection(p) {
        Ok(r) => r,
        Err(_) => return 0.0,
    };
    let dist_w = (w.x - gx).hypot(w.y - gy);
    if dist_c > dist_w + 1e-12 {
        return 0.0;
    }
    ((p.x - w.x) / (gx - w.x)).clamp(0.0, 1.0)
}

/// Witness-plane approximation `max(0, 4/7 (-4 + 4|x| + 5 sqrt(3) y))`.
pub fn tau3_symmetric_approx(c: SymCoords) -> Result<f64> {
    if !c.is_physical() {
        return Err(Error::UnphysicalCoords { x: c.x, y: c.y });
    }
    Ok(plane_value(c).max(0.0))
}

/// Unclamped plane `4/7 (-4 + 4|x| + 5 sqrt(3) y)`.
pub(crate) fn plane_value(c: SymCoords) -> f64 {
    4.0 / 7.0 * (-4.0 + 4.0 * c.x.abs() + 5.0 * SQRT3 * c.y)
}

/// The witness operator as an 8x8 matrix.
pub fn witness_operator(kind: WitnessKind) -> ComplexMatrix {
    let id = ComplexMatrix::identity(8).scale_re(0.75);
    let pp = ghz_plus().projector().into_matrix();
    let pm = ghz_minus().projector().into_matrix();
    match kind {
        WitnessKind::ProjectorGHZ => &id - &pp,
        WitnessKind::TangentPlus => &(&id - &pp) - &pm.scale_re(3.0 / 7.0),
        WitnessKind::TangentMinus => &(&id - &pm) - &pp.scale_re(3.0 / 7.0),
    }
}

/// Witness expectation together with its quantitative three-tangle value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessValue {
    pub kind: WitnessKind,
    /// `tr(W rho)`.
    pub expectation: f64,
    /// `-4 tr(W rho)`; for the tangent witnesses this is the signed plane
    /// through GHZ+ (or GHZ-) evaluated at the twirled coordinates.
    pub quantitative_tau3: f64,
}

/// `tr(W rho)` for the selected witness.
pub fn witness_expectation(rho: &DensityMatrix, kind: WitnessKind) -> WitnessValue {
    let m = rho.matrix();
    let tr = rho.trace();
    let fp = 0.5 * (m[(0, 0)].re + m[(7, 7)].re) + m[(0, 7)].re;
    let fm = 0.5 * (m[(0, 0)].re + m[(7, 7)].re) - m[(0, 7)].re;
    let expectation = match kind {
        WitnessKind::ProjectorGHZ => 0.75 * tr - fp,
        WitnessKind::TangentPlus => 0.75 * tr - fp - 3.0 / 7.0 * fm,
        WitnessKind::TangentMinus => 0.75 * tr - fm - 3.0 / 7.0 * fp,
    };
    WitnessValue {
        kind,
        expectation,
        quantitative_tau3: -4.0 * expectation,
    }
}
