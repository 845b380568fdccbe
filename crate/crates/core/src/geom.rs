//! Planar primitives shared by the rest of the crate.
//!
//! Everything here is plain `f64` arithmetic. Angles are measured with
//! `atan2(cross, dot)` so that values near `0` and `π` keep full precision.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Cross products of unit directions below this magnitude are treated as parallel.
pub const PARALLEL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("points are collinear")]
    CollinearPoints,
    #[error("angle arm has zero length")]
    DegenerateAngle,
}

/// A location in the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Returns `None` unless both coordinates are finite.
    pub fn try_new(x: f64, y: f64) -> Option<Self> {
        (x.is_finite() && y.is_finite()).then_some(Self { x, y })
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| Point2::new(self.x / n, self.y / n))
    }

    /// Counterclockwise rotation by `angle` radians.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

pub fn distance(p: Point2, q: Point2) -> f64 {
    (q - p).norm()
}

/// A non-degenerate line segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    a: Point2,
    b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Result<Self, GeomError> {
        if a == b {
            return Err(GeomError::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> Point2 {
        self.a
    }

    pub fn b(&self) -> Point2 {
        self.b
    }

    pub fn length(&self) -> f64 {
        distance(self.a, self.b)
    }
}

/// A half line with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    origin: Point2,
    direction: Point2,
}

impl Ray {
    /// Builds a ray, normalizing `direction`. Returns `None` for a zero direction.
    pub fn new(origin: Point2, direction: Point2) -> Option<Self> {
        Some(Self {
            origin,
            direction: direction.normalized()?,
        })
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn direction(&self) -> Point2 {
        self.direction
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.origin + self.direction * t
    }

    /// The same ray with its direction turned counterclockwise about the origin.
    pub fn rotated(&self, angle: f64) -> Ray {
        Ray {
            origin: self.origin,
            direction: self.direction.rotated(angle),
        }
    }

    /// Perpendicular distance from `p` to the supporting line.
    pub fn line_distance(&self, p: Point2) -> f64 {
        self.direction.cross(p - self.origin).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    /// Signed distance of `p` from the circle; negative means strictly inside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        distance(self.center, p) - self.radius
    }
}

/// Midpoint and unit direction of the line bisecting `s` perpendicularly.
pub fn perpendicular_bisector(s: &Segment) -> Result<(Point2, Point2), GeomError> {
    let d = (s.b - s.a)
        .normalized()
        .ok_or(GeomError::DegenerateSegment)?;
    Ok((s.a.midpoint(s.b), d.perp()))
}

/// Circle through three non-collinear points.
pub fn circumcircle(a: Point2, b: Point2, c: Point2) -> Result<Circle, GeomError> {
    // Work relative to `a` to limit cancellation.
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    let scale = ab.norm_squared().max(ac.norm_squared());
    if d.abs() <= 1e-14 * scale || !d.is_finite() {
        return Err(GeomError::CollinearPoints);
    }
    let ab2 = ab.norm_squared();
    let ac2 = ac.norm_squared();
    let ux = (ac.y * ab2 - ab.y * ac2) / d;
    let uy = (ab.x * ac2 - ac.x * ab2) / d;
    let offset = Point2::new(ux, uy);
    Ok(Circle {
        center: a + offset,
        radius: offset.norm(),
    })
}

/// Intersection of two rays, if both parameters are nonnegative.
pub fn ray_intersection(r1: &Ray, r2: &Ray) -> Option<Point2> {
    let (d1, d2) = (r1.direction, r2.direction);
    let denom = d1.cross(d2);
    if denom.abs() < PARALLEL_TOLERANCE {
        return None;
    }
    let w = r2.origin - r1.origin;
    let t1 = w.cross(d2) / denom;
    let t2 = w.cross(d1) / denom;
    if t1 < 0.0 || t2 < 0.0 {
        return None;
    }
    // Average the two evaluations so the result does not depend on argument order.
    let p = r1.at(t1).midpoint(r2.at(t2));
    p.is_finite().then_some(p)
}

/// Unsigned angle at `vertex` between the arms towards `a` and `b`, in `[0, π]`.
pub fn angle_at(vertex: Point2, a: Point2, b: Point2) -> Result<f64, GeomError> {
    let u = a - vertex;
    let v = b - vertex;
    if u.norm_squared() == 0.0 || v.norm_squared() == 0.0 {
        return Err(GeomError::DegenerateAngle);
    }
    Ok(u.cross(v).atan2(u.dot(v)).abs())
}

/// Counterclockwise angle needed to turn `from` onto `to`, in `[0, 2π)`.
pub fn ccw_angle(from: Point2, to: Point2) -> f64 {
    let a = from.cross(to).atan2(from.dot(to));
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Twice the signed area of a closed ring; positive when counterclockwise.
pub fn signed_area(ring: &[Point2]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let origin = ring[0];
    let mut acc = 0.0;
    for w in ring.windows(2).skip(1) {
        acc += (w[0] - origin).cross(w[1] - origin);
    }
    0.5 * acc
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            min: Point2::new(xmin, ymin),
            max: Point2::new(xmax, ymax),
        }
    }

    /// Smallest rectangle containing every point, or `None` for an empty input.
    pub fn bounding(points: impl IntoIterator<Item = Point2>) -> Option<Rect> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect {
            min: first,
            max: first,
        };
        for p in it {
            r.min.x = r.min.x.min(p.x);
            r.min.y = r.min.y.min(p.y);
            r.max.x = r.max.x.max(p.x);
            r.max.y = r.max.y.max(p.y);
        }
        Some(r)
    }

    pub fn is_valid(&self) -> bool {
        self.min.is_finite()
            && self.max.is_finite()
            && self.min.x < self.max.x
            && self.min.y < self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }

    pub fn contains_strictly(&self, p: Point2) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn union(&self, o: &Rect) -> Rect {
        Rect::new(
            self.min.x.min(o.min.x),
            self.min.y.min(o.min.y),
            self.max.x.max(o.max.x),
            self.max.y.max(o.max.y),
        )
    }

    pub fn expanded(&self, margin: f64) -> Rect {
        Rect::new(
            self.min.x - margin,
            self.min.y - margin,
            self.max.x + margin,
            self.max.y + margin,
        )
    }

    /// Corners in counterclockwise order starting at the lower left.
    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }

    /// Parameter `t > 0` at which a ray starting inside leaves the rectangle.
    pub fn exit_parameter(&self, origin: Point2, dir: Point2) -> Option<f64> {
        let mut t = f64::INFINITY;
        if dir.x > 0.0 {
            t = t.min((self.max.x - origin.x) / dir.x);
        } else if dir.x < 0.0 {
            t = t.min((self.min.x - origin.x) / dir.x);
        }
        if dir.y > 0.0 {
            t = t.min((self.max.y - origin.y) / dir.y);
        } else if dir.y < 0.0 {
            t = t.min((self.min.y - origin.y) / dir.y);
        }
        (t.is_finite() && t > 0.0).then_some(t)
    }

    /// Position along the boundary measured counterclockwise from the lower-left
    /// corner, in `[0, perimeter)`. Meaningful for points on the boundary.
    pub fn boundary_parameter(&self, p: Point2) -> f64 {
        let (w, h) = (self.width(), self.height());
        let dl = (p.x - self.min.x).abs();
        let dr = (p.x - self.max.x).abs();
        let db = (p.y - self.min.y).abs();
        let dt = (p.y - self.max.y).abs();
        let m = dl.min(dr).min(db).min(dt);
        let s = if m == db {
            (p.x - self.min.x).clamp(0.0, w)
        } else if m == dr {
            w + (p.y - self.min.y).clamp(0.0, h)
        } else if m == dt {
            w + h + (self.max.x - p.x).clamp(0.0, w)
        } else {
            2.0 * w + h + (self.max.y - p.y).clamp(0.0, h)
        };
        let per = 2.0 * (w + h);
        if s >= per {
            s - per
        } else {
            s
        }
    }

    /// Boundary points met when walking counterclockwise from `from` to `to`,
    /// i.e. the corners strictly between the two boundary parameters.
    pub fn corners_between(&self, from: Point2, to: Point2) -> Vec<Point2> {
        let (w, h) = (self.width(), self.height());
        let per = 2.0 * (w + h);
        let corner_params = [0.0, w, w + h, 2.0 * w + h];
        let corners = self.corners();
        let s0 = self.boundary_parameter(from);
        let mut s1 = self.boundary_parameter(to);
        if s1 <= s0 {
            s1 += per;
        }
        let mut out = Vec::new();
        for lap in 0..2 {
            for (k, &c) in corner_params.iter().enumerate() {
                let s = c + lap as f64 * per;
                if s > s0 && s < s1 {
                    out.push(corners[k]);
                }
            }
        }
        out
    }
}
