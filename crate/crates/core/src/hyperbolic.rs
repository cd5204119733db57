//! Upper half-plane kernel: isometries, points, ideal points and geodesics.
//!
//! Points live in the upper half-plane `{ x + iy : y > 0 }`. Ideal points are
//! stored in their disk form, an angle on the unit circle, so that the point
//! at infinity needs no special casing once constructed. The Cayley map
//! `z -> (z - i) / (z + i)` relates the two models.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for ideal-point equality, in radians.
pub const EPS_THETA: f64 = 1e-9;
/// Default tolerance for the trace classification `|tr| = 2`.
pub const EPS_TRACE: f64 = 1e-9;
/// Determinant drift allowed after normalization.
pub const DET_TOL: f64 = 1e-12;
/// Points with imaginary part at or below this are treated as boundary.
pub const MIN_HEIGHT: f64 = 1e-12;
/// Products whose `|ad| + |bc|` exceeds this skip determinant renormalization.
const RENORM_SCALE: f64 = 1e6;
const DENOM_TOL: f64 = 1e-14;

/// Tolerances that callers may override.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps_theta: f64,
    pub eps_trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_theta: EPS_THETA,
            eps_trace: EPS_TRACE,
        }
    }
}

/// An orientation-preserving isometry of the hyperbolic plane, stored as a
/// unit-determinant real matrix `[[a, b], [c, d]]` in canonical sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Isometry {
    m: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for IsometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IsometryClass::Identity => "identity",
            IsometryClass::Elliptic => "elliptic",
            IsometryClass::Parabolic => "parabolic",
            IsometryClass::Hyperbolic => "hyperbolic",
        };
        f.write_str(s)
    }
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    /// Normalizes `m` to determinant one. Fails on non-finite entries or a
    /// non-positive determinant (those matrices do not preserve the half-plane).
    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::validation("matrix has non-finite entries"));
        }
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det <= DET_TOL {
            return Err(Error::validation(format!(
                "matrix determinant {det} is not positive"
            )));
        }
        Ok(Self::normalized(m, det))
    }

    fn normalized(m: [[f64; 2]; 2], det: f64) -> Self {
        let s = det.sqrt();
        let mut out = [[m[0][0] / s, m[0][1] / s], [m[1][0] / s, m[1][1] / s]];
        let first = out
            .iter()
            .flatten()
            .copied()
            .find(|v| *v != 0.0)
            .unwrap_or(1.0);
        if first < 0.0 {
            for v in out.iter_mut().flatten() {
                *v = -*v;
            }
        }
        Isometry { m: out }
    }

    /// Diagonal isometry `z -> lambda^2 z`.
    pub fn dilation(lambda: f64) -> Result<Self> {
        Self::new([[lambda, 0.0], [0.0, 1.0 / lambda]])
    }

    /// Elliptic isometry fixing `i` that rotates the disk model by `angle`.
    pub fn disk_rotation(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Self::normalized([[c, s], [-s, c]], 1.0)
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self::normalized([[d, -b], [-c, a]], 1.0)
    }

    /// Product `self * other` (apply `other` first), renormalized.
    pub fn compose(&self, other: &Isometry) -> Self {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = other.m;
        let m = [
            [a * e + b * g, a * f + b * h],
            [c * e + d * g, c * f + d * h],
        ];
        // Both factors have determinant one. Recomputing it from large entries
        // cancels catastrophically, so only small products are renormalized.
        let scale = (m[0][0] * m[1][1]).abs() + (m[0][1] * m[1][0]).abs();
        let det = if scale < RENORM_SCALE {
            m[0][0] * m[1][1] - m[0][1] * m[1][0]
        } else {
            1.0
        };
        Self::normalized(m, det)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Isometry::IDENTITY, |acc, _| acc.compose(self))
    }

    /// `self * other * self^-1`.
    pub fn conjugate(&self, other: &Isometry) -> Self {
        self.compose(other).compose(&self.inverse())
    }

    /// Largest entrywise difference between the two matrices up to sign.
    pub fn distance_to(&self, other: &Isometry) -> f64 {
        let plus = self
            .m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let minus = self
            .m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(x, y)| (x + y).abs())
            .fold(0.0, f64::max);
        plus.min(minus)
    }

    pub fn classify(&self) -> IsometryClass {
        classify_isometry(self, EPS_TRACE)
    }

    /// The same Möbius map conjugated into the disk model.
    fn disk_coefficients(&self) -> [Complex64; 4] {
        // C M C^-1 with C = [[1, -i], [1, i]] and C^-1 = [[i, i], [-1, 1]] / (2i).
        let [[a, b], [c, d]] = self.m;
        let i = Complex64::i();
        let (a, b, c, d) = (
            Complex64::from(a),
            Complex64::from(b),
            Complex64::from(c),
            Complex64::from(d),
        );
        // C M
        let p = a - i * c;
        let q = b - i * d;
        let r = a + i * c;
        let s = b + i * d;
        // (C M) C^-1, dropping the common 1/(2i)
        [p * i - q, p * i + q, r * i - s, r * i + s]
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// Classifies by trace. The identity is its own class.
pub fn classify_isometry(m: &Isometry, eps_trace: f64) -> IsometryClass {
    if m.distance_to(&Isometry::IDENTITY) <= DET_TOL {
        return IsometryClass::Identity;
    }
    let t = m.trace().abs();
    if t < 2.0 - eps_trace {
        IsometryClass::Elliptic
    } else if t > 2.0 + eps_trace {
        IsometryClass::Hyperbolic
    } else {
        IsometryClass::Parabolic
    }
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HPoint {
    x: f64,
    y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::validation("point has non-finite coordinates"));
        }
        if y <= MIN_HEIGHT {
            return Err(Error::validation(format!(
                "point ({x}, {y}) lies on or below the boundary"
            )));
        }
        Ok(HPoint { x, y })
    }

    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn to_disk(&self) -> DiskPoint {
        let z = self.as_complex();
        let w = (z - Complex64::i()) / (z + Complex64::i());
        DiskPoint { x: w.re, y: w.im }
    }

    /// Inverse Cayley map; fails for points outside the open disk.
    pub fn from_disk(p: DiskPoint) -> Result<Self> {
        let w = Complex64::new(p.x, p.y);
        if w.norm() >= 1.0 {
            return Err(Error::validation("disk point is not inside the unit disk"));
        }
        let z = Complex64::i() * (Complex64::from(1.0) + w) / (Complex64::from(1.0) - w);
        HPoint::new(z.re, z.im)
    }
}

/// Möbius action on an interior point.
pub fn apply_isometry(m: &Isometry, p: &HPoint) -> Result<HPoint> {
    let [[a, b], [c, d]] = m.m;
    let z = p.as_complex();
    let den = z * c + d;
    if den.norm() < DENOM_TOL {
        return Err(Error::NumericDegeneracy(format!(
            "denominator |cz + d| = {:e} at ({}, {})",
            den.norm(),
            p.x,
            p.y
        )));
    }
    let w = (z * a + b) / den;
    HPoint::new(w.re, w.im)
        .map_err(|_| Error::NumericDegeneracy("image point collapsed onto the boundary".into()))
}

pub fn hyperbolic_distance(p: &HPoint, q: &HPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    arg.max(1.0).acosh()
}

/// A point of the open unit disk (or of its boundary circle, for ideal points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// A point on the circle at infinity, held as a disk angle in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct IdealPoint {
    theta: f64,
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Distance between two angles along the circle, in `[0, pi]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl IdealPoint {
    pub fn from_angle(theta: f64) -> Self {
        IdealPoint {
            theta: wrap_angle(theta),
        }
    }

    /// The boundary point `t` of the real line.
    pub fn from_real(t: f64) -> Self {
        if t.is_infinite() {
            return Self::infinity();
        }
        // arg((t - i)/(t + i)) = -2 arg(t + i)
        Self::from_angle(-2.0 * 1f64.atan2(t))
    }

    pub fn infinity() -> Self {
        IdealPoint { theta: 0.0 }
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    pub fn is_infinity(&self, eps: f64) -> bool {
        angular_distance(self.theta, 0.0) < eps
    }

    /// Real-line coordinate, or `None` for the point at infinity.
    pub fn to_real(&self) -> Option<f64> {
        if self.theta == 0.0 {
            return None;
        }
        let half = self.theta / 2.0;
        Some(-half.cos() / half.sin())
    }

    pub fn to_disk(&self) -> DiskPoint {
        let (s, c) = self.theta.sin_cos();
        DiskPoint { x: c, y: s }
    }

    pub fn approx_eq(&self, other: &IdealPoint, eps: f64) -> bool {
        angular_distance(self.theta, other.theta) < eps
    }
}

impl fmt::Display for IdealPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9}°", self.theta.to_degrees())
    }
}

/// Boundary extension of an isometry, computed in the disk model.
pub fn boundary_action(m: &Isometry, p: &IdealPoint) -> IdealPoint {
    let [a, b, c, d] = m.disk_coefficients();
    let w = Complex64::from_polar(1.0, p.theta);
    let image = (a * w + b) / (c * w + d);
    IdealPoint::from_angle(image.arg())
}

/// Oriented complete geodesic between two distinct ideal points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geodesic {
    a: IdealPoint,
    b: IdealPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicRelation {
    Equal,
    Cross,
    Disjoint,
    ShareEndpoint,
}

impl Geodesic {
    pub fn new(a: IdealPoint, b: IdealPoint, eps_theta: f64) -> Result<Self> {
        if a.approx_eq(&b, eps_theta) {
            return Err(Error::validation(format!(
                "geodesic endpoints {a} and {b} coincide"
            )));
        }
        Ok(Geodesic { a, b })
    }

    pub fn from_angles(a: f64, b: f64) -> Result<Self> {
        Self::new(
            IdealPoint::from_angle(a),
            IdealPoint::from_angle(b),
            EPS_THETA,
        )
    }

    /// Start point (the repelling end for an axis).
    pub fn start(&self) -> IdealPoint {
        self.a
    }

    /// End point (the attracting end for an axis).
    pub fn end(&self) -> IdealPoint {
        self.b
    }

    pub fn reversed(&self) -> Self {
        Geodesic {
            a: self.b,
            b: self.a,
        }
    }

    /// Image under an isometry; orientation is carried along.
    pub fn transform(&self, m: &Isometry) -> Self {
        Geodesic {
            a: boundary_action(m, &self.a),
            b: boundary_action(m, &self.b),
        }
    }

    pub fn to_disk(&self) -> (f64, f64) {
        (self.a.theta, self.b.theta)
    }

    /// Largest endpoint displacement to `other`, matching orientations.
    pub fn endpoint_gap(&self, other: &Geodesic) -> f64 {
        angular_distance(self.a.theta, other.a.theta)
            .max(angular_distance(self.b.theta, other.b.theta))
    }

    /// Endpoint displacement ignoring orientation.
    pub fn unoriented_gap(&self, other: &Geodesic) -> f64 {
        self.endpoint_gap(other)
            .min(self.endpoint_gap(&other.reversed()))
    }
}

impl fmt::Display for Geodesic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} -> {})", self.a, self.b)
    }
}

/// Invariant geodesic of a hyperbolic isometry, oriented repelling to attracting.
pub fn axis(m: &Isometry) -> Result<Geodesic> {
    axis_with(m, EPS_TRACE)
}

pub fn axis_with(m: &Isometry, eps_trace: f64) -> Result<Geodesic> {
    if classify_isometry(m, eps_trace) != IsometryClass::Hyperbolic {
        return Err(Error::NotHyperbolic { trace: m.trace() });
    }
    let [[a, b], [c, d]] = m.m;
    // Fixed points solve c t^2 + (d - a) t - b = 0; discriminant is tr^2 - 4.
    let qb = d - a;
    let disc = (m.trace() * m.trace() - 4.0).max(0.0);
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let q = if qb == 0.0 { -0.5 * disc.sqrt() } else { q };
    // Roots q / c and -b / q; |c t + d| > 1 marks the attracting one.
    let second = -b / q;
    let second_mult = (c * second + d).abs();
    let (first, first_mult) = if c == 0.0 {
        (None, 1.0 / d.abs())
    } else {
        (Some(q / c), (q + d).abs())
    };
    let p1 = first.map_or_else(IdealPoint::infinity, IdealPoint::from_real);
    let p2 = IdealPoint::from_real(second);
    let (repelling, attracting) = if first_mult > second_mult {
        (p2, p1)
    } else {
        (p1, p2)
    };
    Geodesic::new(repelling, attracting, 0.0)
        .map_err(|_| Error::NumericDegeneracy("axis endpoints collapsed to one ideal point".into()))
}

pub fn translation_length(m: &Isometry) -> Result<f64> {
    translation_length_with(m, EPS_TRACE)
}

pub fn translation_length_with(m: &Isometry, eps_trace: f64) -> Result<f64> {
    if classify_isometry(m, eps_trace) != IsometryClass::Hyperbolic {
        return Err(Error::NotHyperbolic { trace: m.trace() });
    }
    Ok(2.0 * (m.trace().abs() / 2.0).acosh())
}

/// True when `x` lies strictly inside the counterclockwise arc from `from`
/// to `to`.
fn strictly_between(from: f64, to: f64, x: f64) -> bool {
    let span = (to - from).rem_euclid(TAU);
    let off = (x - from).rem_euclid(TAU);
    off > 0.0 && off < span
}

pub fn geodesic_relation(g1: &Geodesic, g2: &Geodesic, eps_theta: f64) -> GeodesicRelation {
    let aa = g1.a.approx_eq(&g2.a, eps_theta);
    let ab = g1.a.approx_eq(&g2.b, eps_theta);
    let ba = g1.b.approx_eq(&g2.a, eps_theta);
    let bb = g1.b.approx_eq(&g2.b, eps_theta);
    if (aa && bb) || (ab && ba) {
        return GeodesicRelation::Equal;
    }
    if aa || ab || ba || bb {
        return GeodesicRelation::ShareEndpoint;
    }
    let p = strictly_between(g1.a.theta, g1.b.theta, g2.a.theta);
    let q = strictly_between(g1.a.theta, g1.b.theta, g2.b.theta);
    if p != q {
        GeodesicRelation::Cross
    } else {
        GeodesicRelation::Disjoint
    }
}

/// The unique point where two crossing geodesics meet.
pub fn geodesic_intersection(g1: &Geodesic, g2: &Geodesic, eps_theta: f64) -> Result<HPoint> {
    if geodesic_relation(g1, g2, eps_theta) != GeodesicRelation::Cross {
        return Err(Error::NoIntersection);
    }
    // Rotate the disk so the widest gap between endpoints is centered on the
    // point at infinity; then both carriers are bounded semicircles.
    let mut angles = [g1.a.theta, g1.b.theta, g2.a.theta, g2.b.theta];
    angles.sort_by(f64::total_cmp);
    let mut best = (0.0, 0.0);
    for i in 0..4 {
        let from = angles[i];
        let to = if i == 3 {
            angles[0] + TAU
        } else {
            angles[i + 1]
        };
        if to - from > best.0 {
            best = (to - from, from + (to - from) / 2.0);
        }
    }
    let rot = Isometry::disk_rotation(-best.1);
    let semicircle = |g: &Geodesic| -> Result<(f64, f64)> {
        let g = g.transform(&rot);
        let u = g.a.to_real().ok_or(Error::NoIntersection)?;
        let v = g.b.to_real().ok_or(Error::NoIntersection)?;
        Ok(((u + v) / 2.0, (u - v).abs() / 2.0))
    };
    let (c1, r1) = semicircle(g1)?;
    let (c2, r2) = semicircle(g2)?;
    if (c2 - c1).abs() < DENOM_TOL {
        return Err(Error::NumericDegeneracy("concentric carriers".into()));
    }
    let x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1));
    let y2 = r1 * r1 - (x - c1) * (x - c1);
    if y2 <= 0.0 {
        return Err(Error::NumericDegeneracy(
            "carriers meet on the boundary".into(),
        ));
    }
    let local = HPoint::new(x, y2.sqrt())?;
    apply_isometry(&rot.inverse(), &local)
}

/// Half-plane carrier of a geodesic, as used by the intersection routine and
/// tests: either a vertical line `x = c` or a semicircle with center and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Carrier {
    Vertical(f64),
    Semicircle { center: f64, radius: f64 },
}

impl Geodesic {
    pub fn carrier(&self) -> Carrier {
        match (self.a.to_real(), self.b.to_real()) {
            (None, Some(x)) | (Some(x), None) => Carrier::Vertical(x),
            (Some(u), Some(v)) => Carrier::Semicircle {
                center: (u + v) / 2.0,
                radius: (u - v).abs() / 2.0,
            },
            (None, None) => unreachable!("geodesic endpoints are distinct"),
        }
    }

    /// Signed residual of `p` against the carrier equation.
    pub fn carrier_residual(&self, p: &HPoint) -> f64 {
        match self.carrier() {
            Carrier::Vertical(x) => p.x - x,
            Carrier::Semicircle { center, radius } => {
                ((p.x - center).powi(2) + p.y * p.y).sqrt() - radius
            }
        }
    }
}

/// Convenience: degrees to an ideal point.
pub fn ideal_deg(deg: f64) -> IdealPoint {
    IdealPoint::from_angle(deg.to_radians())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn iso(m: [[f64; 2]; 2]) -> Isometry {
        Isometry::new(m).unwrap()
    }

    fn pt(x: f64, y: f64) -> HPoint {
        HPoint::new(x, y).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            iso([[1.0, 0.0], [0.0, 1.0]]).classify(),
            IsometryClass::Identity
        );
        assert_eq!(
            iso([[-1.0, 0.0], [0.0, -1.0]]).classify(),
            IsometryClass::Identity
        );
        assert_eq!(
            iso([[2.0, 0.0], [0.0, 0.5]]).classify(),
            IsometryClass::Hyperbolic
        );
        assert_eq!(
            iso([[1.0, 1.0], [0.0, 1.0]]).classify(),
            IsometryClass::Parabolic
        );
        assert_eq!(
            iso([[0.0, 1.0], [-1.0, 0.0]]).classify(),
            IsometryClass::Elliptic
        );
    }

    #[test]
    fn normalization_and_sign() {
        let m = iso([[-4.0, 0.0], [0.0, -1.0]]);
        assert_abs_diff_eq!(m.det(), 1.0, epsilon = DET_TOL);
        assert_eq!(m.matrix(), [[2.0, 0.0], [0.0, 0.5]]);
        assert!(Isometry::new([[0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(Isometry::new([[f64::NAN, 1.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn apply_examples() {
        let p = apply_isometry(&iso([[1.0, 1.0], [0.0, 1.0]]), &HPoint::I).unwrap();
        assert_eq!((p.x(), p.y()), (1.0, 1.0));
        let p = apply_isometry(&iso([[2.0, 0.0], [0.0, 0.5]]), &HPoint::I).unwrap();
        assert_abs_diff_eq!(p.x(), 0.0);
        assert_abs_diff_eq!(p.y(), 4.0, epsilon = 1e-12);
        let p = apply_isometry(&iso([[0.0, 1.0], [-1.0, 0.0]]), &HPoint::I).unwrap();
        assert_abs_diff_eq!(p.x(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn boundary_points_are_rejected() {
        assert!(HPoint::new(0.0, 1e-13).is_err());
        assert!(HPoint::new(0.0, -1.0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyperbolic_distance(&HPoint::I, &HPoint::I), 0.0);
        // Arclength oracle along the imaginary axis: integral of dy / y.
        let top = std::f64::consts::E.powi(2);
        let steps = 200_000;
        let h = (top - 1.0) / steps as f64;
        let integral: f64 = (0..steps)
            .map(|k| {
                let y0 = 1.0 + k as f64 * h;
                let ym = y0 + h / 2.0;
                let y1 = y0 + h;
                h / 6.0 * (1.0 / y0 + 4.0 / ym + 1.0 / y1)
            })
            .sum();
        assert_abs_diff_eq!(integral, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            hyperbolic_distance(&HPoint::I, &pt(0.0, top)),
            integral,
            epsilon = 1e-9
        );
    }

    #[test]
    fn axis_of_diagonal() {
        let g = axis(&iso([[2.0, 0.0], [0.0, 0.5]])).unwrap();
        assert!(g.start().approx_eq(&IdealPoint::from_real(0.0), EPS_THETA));
        assert!(g.end().approx_eq(&IdealPoint::infinity(), EPS_THETA));
        // Inverse swaps the orientation.
        let g = axis(&iso([[0.5, 0.0], [0.0, 2.0]])).unwrap();
        assert!(g.start().is_infinity(EPS_THETA));
    }

    #[test]
    fn axis_by_quadratic_formula() {
        // t^2 - t - 1 = 0, derivative 1/(t + 1)^2.
        let plus = (1.0 + 5f64.sqrt()) / 2.0;
        let minus = (1.0 - 5f64.sqrt()) / 2.0;
        assert!((plus + 1.0).abs() > 1.0 && (minus + 1.0).abs() < 1.0);
        let g = axis(&iso([[2.0, 1.0], [1.0, 1.0]])).unwrap();
        assert!(g.end().approx_eq(&IdealPoint::from_real(plus), 1e-12));
        assert!(g.start().approx_eq(&IdealPoint::from_real(minus), 1e-12));
        assert!(axis(&iso([[1.0, 1.0], [0.0, 1.0]])).is_err());
    }

    #[test]
    fn translation_length_examples() {
        let l = translation_length(&iso([[2.0, 0.0], [0.0, 0.5]])).unwrap();
        assert_abs_diff_eq!(l, 4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(l, 1.386294, epsilon = 1e-6);
        for lambda in [1.5, 3.0, 10.0] {
            let l = translation_length(&Isometry::dilation(lambda).unwrap()).unwrap();
            assert_abs_diff_eq!(l, 2.0 * lambda.ln(), epsilon = 1e-12);
        }
        assert!(translation_length(&Isometry::IDENTITY).is_err());
    }

    #[test]
    fn relation_examples() {
        let g = |a: f64, b: f64| Geodesic::new(ideal_deg(a), ideal_deg(b), EPS_THETA).unwrap();
        assert_eq!(
            geodesic_relation(&g(0.0, 180.0), &g(90.0, 270.0), EPS_THETA),
            GeodesicRelation::Cross
        );
        assert_eq!(
            geodesic_relation(&g(0.0, 90.0), &g(180.0, 270.0), EPS_THETA),
            GeodesicRelation::Disjoint
        );
        assert_eq!(
            geodesic_relation(&g(0.0, 180.0), &g(180.0, 300.0), EPS_THETA),
            GeodesicRelation::ShareEndpoint
        );
        assert_eq!(
            geodesic_relation(&g(0.0, 180.0), &g(180.0, 0.0), EPS_THETA),
            GeodesicRelation::Equal
        );
        assert_eq!(
            geodesic_relation(&g(10.0, 20.0), &g(350.0, 30.0), EPS_THETA),
            GeodesicRelation::Disjoint
        );
    }

    #[test]
    fn intersection_vertical_and_unit_semicircle() {
        let v = Geodesic::new(
            IdealPoint::from_real(0.0),
            IdealPoint::infinity(),
            EPS_THETA,
        )
        .unwrap();
        let c = Geodesic::new(
            IdealPoint::from_real(-1.0),
            IdealPoint::from_real(1.0),
            EPS_THETA,
        )
        .unwrap();
        let p = geodesic_intersection(&v, &c, EPS_THETA).unwrap();
        assert_abs_diff_eq!(p.x(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn intersection_two_semicircles() {
        // Elimination oracle: x^2 + y^2 = 4 and (x - 1)^2 + y^2 = 4 give x = 1/2.
        let g1 = Geodesic::new(
            IdealPoint::from_real(-2.0),
            IdealPoint::from_real(2.0),
            EPS_THETA,
        )
        .unwrap();
        let g2 = Geodesic::new(
            IdealPoint::from_real(-1.0),
            IdealPoint::from_real(3.0),
            EPS_THETA,
        )
        .unwrap();
        let p = geodesic_intersection(&g1, &g2, EPS_THETA).unwrap();
        assert_abs_diff_eq!(p.x(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y(), 3.75f64.sqrt(), epsilon = 1e-12);
        assert!(g1.carrier_residual(&p).abs() < 1e-9);
        assert!(g2.carrier_residual(&p).abs() < 1e-9);
    }

    #[test]
    fn intersection_requires_crossing() {
        let g1 = Geodesic::from_angles(0.0, 1.0).unwrap();
        let g2 = Geodesic::from_angles(2.0, 3.0).unwrap();
        assert_eq!(
            geodesic_intersection(&g1, &g2, EPS_THETA),
            Err(Error::NoIntersection)
        );
    }

    #[test]
    fn boundary_action_examples() {
        let p = iso([[1.0, 1.0], [0.0, 1.0]]);
        assert!(boundary_action(&p, &IdealPoint::infinity()).is_infinity(EPS_THETA));
        let a = iso([[2.0, 0.0], [0.0, 0.5]]);
        let img = boundary_action(&a, &IdealPoint::from_real(1.0));
        assert!(img.approx_eq(&IdealPoint::from_real(4.0), 1e-12));
        assert_abs_diff_eq!(img.to_real().unwrap(), 4.0, epsilon = 1e-9);
        let ax = axis(&a).unwrap();
        assert!(boundary_action(&a, &ax.start()).approx_eq(&ax.start(), EPS_THETA));
    }

    #[test]
    fn disk_rotation_rotates_the_boundary() {
        let r = Isometry::disk_rotation(0.7);
        let p = IdealPoint::from_angle(1.1);
        assert_abs_diff_eq!(boundary_action(&r, &p).angle(), 1.8, epsilon = 1e-12);
    }

    #[test]
    fn cayley_examples() {
        let d = HPoint::I.to_disk();
        assert_abs_diff_eq!(d.norm(), 0.0);
        // (0 - i) / (0 + i) = -1, the disk point at angle pi.
        let z = IdealPoint::from_real(0.0);
        assert_abs_diff_eq!(z.angle(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(z.to_disk().x, -1.0, epsilon = 1e-15);
        // (1 - i)/(1 + i) = -i.
        assert_abs_diff_eq!(
            IdealPoint::from_real(1.0).angle(),
            1.5 * PI,
            epsilon = 1e-15
        );
        assert_eq!(IdealPoint::infinity().angle(), 0.0);
        let back = IdealPoint::from_real(-3.25).to_real().unwrap();
        assert_abs_diff_eq!(back, -3.25, epsilon = 1e-12);
        let q = pt(0.3, 2.0);
        let r = HPoint::from_disk(q.to_disk()).unwrap();
        assert_abs_diff_eq!(r.x(), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(r.y(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn ideal_equality_wraps() {
        let a = IdealPoint::from_angle(TAU - 1e-10);
        let b = IdealPoint::from_angle(1e-11);
        assert!(a.approx_eq(&b, EPS_THETA));
        assert!(IdealPoint::from_angle(-1e-300).angle() < TAU);
    }
}
