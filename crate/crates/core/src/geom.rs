//! Planar geometry primitives and tolerance-aware predicates.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate segment: both endpoints at ({x}, {y})")]
    DegenerateSegment { x: f64, y: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(String),
}

/// A position in the plane, measured in edge lengths once normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeomError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeomError::NonFinite)
        }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Counterclockwise rotation by `angle` radians about the origin.
    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed straight segment with distinct endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeomError> {
        if a == b {
            return Err(GeomError::DegenerateSegment { x: a.x, y: a.y });
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        distance(self.a, self.b)
    }

    pub fn midpoint(&self) -> Point {
        (self.a + self.b) * 0.5
    }

    /// Point at parameter `t`, where 0 is `a` and 1 is `b`.
    pub fn at(&self, t: f64) -> Point {
        self.a + (self.b - self.a) * t
    }
}

/// Numeric thresholds shared by ingestion, verification and analysis.
///
/// Lengths are in edge units except `unit_tol_raw`, which is relative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TolerancePolicy {
    /// Radius for merging endpoints into one vertex; also the symmetry and motif matching radius.
    pub snap_tol: f64,
    /// Relative length tolerance for unrefined (transcribed) data.
    pub unit_tol_raw: f64,
    /// Absolute length tolerance after refinement.
    pub unit_tol_refined: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub rank_tol: f64,
    /// Separations at or below this are reported as near contacts.
    pub sep_warn: f64,
    /// Separations at or below this count as intersections.
    pub sep_fail: f64,
    /// Minimum angle in degrees between two edges sharing a vertex.
    pub angle_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            snap_tol: 1e-3,
            unit_tol_raw: 5e-2,
            unit_tol_refined: 1e-9,
            rank_tol: 1e-8,
            sep_warn: 1e-2,
            sep_fail: 1e-9,
            angle_tol: 1e-6,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<(), GeomError> {
        let all = [
            ("snap_tol", self.snap_tol),
            ("unit_tol_raw", self.unit_tol_raw),
            ("unit_tol_refined", self.unit_tol_refined),
            ("rank_tol", self.rank_tol),
            ("sep_warn", self.sep_warn),
            ("sep_fail", self.sep_fail),
            ("angle_tol", self.angle_tol),
        ];
        for (name, value) in all {
            if !(value.is_finite() && value > 0.0) {
                return Err(GeomError::InvalidTolerance(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.sep_fail >= self.sep_warn {
            return Err(GeomError::InvalidTolerance(
                "sep_fail must be smaller than sep_warn".into(),
            ));
        }
        if self.unit_tol_refined >= self.unit_tol_raw {
            return Err(GeomError::InvalidTolerance(
                "unit_tol_refined must be smaller than unit_tol_raw".into(),
            ));
        }
        Ok(())
    }

    /// Angular matching tolerance in degrees, derived from `snap_tol` as a
    /// displacement at unit distance.
    pub fn match_angle_deg(&self) -> f64 {
        self.snap_tol.to_degrees()
    }
}

pub fn distance(p: Point, q: Point) -> f64 {
    (p - q).norm()
}

/// Distance from `p` to the closed segment `s`, with the clamped projection parameter.
pub fn point_segment_distance(p: Point, s: &Segment) -> (f64, f64) {
    let d = s.b - s.a;
    let t = ((p - s.a).dot(d) / d.norm_squared()).clamp(0.0, 1.0);
    (distance(p, s.at(t)), t)
}

fn orientation(p: Point, q: Point, r: Point) -> f64 {
    (q - p).cross(r - p)
}

/// Minimum distance between two closed segments; zero when they share a point.
pub fn segment_separation(s: &Segment, t: &Segment) -> f64 {
    let o1 = orientation(s.a, s.b, t.a);
    let o2 = orientation(s.a, s.b, t.b);
    let o3 = orientation(t.a, t.b, s.a);
    let o4 = orientation(t.a, t.b, s.b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    [
        point_segment_distance(s.a, t).0,
        point_segment_distance(s.b, t).0,
        point_segment_distance(t.a, s).0,
        point_segment_distance(t.b, s).0,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// Direction of `to - from` in degrees, counterclockwise from +x, in `[0, 360)`.
pub fn direction_angle(from: Point, to: Point) -> Result<f64, GeomError> {
    if from == to {
        return Err(GeomError::DegenerateSegment {
            x: from.x,
            y: from.y,
        });
    }
    let d = to - from;
    Ok(normalize_degrees(d.y.atan2(d.x).to_degrees()))
}

/// Maps an angle in degrees into `[0, 360)`.
pub fn normalize_degrees(angle: f64) -> f64 {
    let a = angle.rem_euclid(360.0);
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}
