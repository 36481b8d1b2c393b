//! Planar geometry for the navigation environments: points, axis-aligned
//! rectangles, wall segments, crossing tests and cardinal ray casts.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

const EPS: f64 = 1e-12;

/// A position in the plane, in world units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateVec {
    pub x: f64,
    pub y: f64,
}

impl StateVec {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for StateVec {
    type Output = StateVec;
    fn add(self, rhs: Self) -> Self {
        StateVec::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for StateVec {
    type Output = StateVec;
    fn sub(self, rhs: Self) -> Self {
        StateVec::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for StateVec {
    type Output = StateVec;
    fn mul(self, rhs: f64) -> Self {
        StateVec::new(self.x * rhs, self.y * rhs)
    }
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: StateVec,
    pub max: StateVec,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            min: StateVec::new(x0, y0),
            max: StateVec::new(x1, y1),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center(&self) -> StateVec {
        StateVec::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    pub fn contains(&self, p: StateVec) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn clamp(&self, p: StateVec) -> StateVec {
        StateVec::new(p.x.clamp(self.min.x, self.max.x), p.y.clamp(self.min.y, self.max.y))
    }

    /// Closest point of the rectangle to `p` (`p` itself when inside).
    pub fn nearest_point(&self, p: StateVec) -> StateVec {
        self.clamp(p)
    }

    /// True when the open interiors overlap; shared edges do not count.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.min.x < other.max.x && other.min.x < self.max.x && self.min.y < other.max.y && other.min.y < self.max.y
    }

    /// Intersection with `other`, if it has positive area.
    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.min.x.max(other.min.x),
            self.min.y.max(other.min.y),
            self.max.x.min(other.max.x),
            self.max.y.min(other.max.y),
        );
        (r.width() > 0.0 && r.height() > 0.0).then_some(r)
    }

    /// True when the segment passes through the open interior of the rectangle.
    pub fn crossed_by(&self, seg: &Segment) -> bool {
        // Liang-Barsky clipping against the open box.
        let d = seg.b - seg.a;
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for (p, q) in [
            (-d.x, seg.a.x - self.min.x),
            (d.x, self.max.x - seg.a.x),
            (-d.y, seg.a.y - self.min.y),
            (d.y, self.max.y - seg.a.y),
        ] {
            if p.abs() < EPS {
                if q <= 0.0 {
                    return false;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
            }
        }
        t1 - t0 > EPS
    }
}

/// A wall: closed line segment between two points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: StateVec,
    pub b: StateVec,
}

fn orient(p: StateVec, q: StateVec, r: StateVec) -> f64 {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

fn sign(v: f64) -> i8 {
    if v > EPS {
        1
    } else if v < -EPS {
        -1
    } else {
        0
    }
}

impl Segment {
    pub const fn new(ax: f64, ay: f64, bx: f64, by: f64) -> Self {
        Self {
            a: StateVec::new(ax, ay),
            b: StateVec::new(bx, by),
        }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    fn bbox_contains(&self, p: StateVec) -> bool {
        p.x >= self.a.x.min(self.b.x) - EPS
            && p.x <= self.a.x.max(self.b.x) + EPS
            && p.y >= self.a.y.min(self.b.y) - EPS
            && p.y <= self.a.y.max(self.b.y) + EPS
    }

    /// Distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: StateVec) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 < EPS * EPS {
            return p.distance(self.a);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.distance(self.a + d * t)
    }

    /// Closed-segment intersection test; touching endpoints count.
    pub fn intersects(&self, other: &Segment) -> bool {
        let (p1, p2, q1, q2) = (self.a, self.b, other.a, other.b);
        let o1 = sign(orient(p1, p2, q1));
        let o2 = sign(orient(p1, p2, q2));
        let o3 = sign(orient(q1, q2, p1));
        let o4 = sign(orient(q1, q2, p2));
        if o1 != o2 && o3 != o4 {
            return true;
        }
        (o1 == 0 && self.bbox_contains(q1))
            || (o2 == 0 && self.bbox_contains(q2))
            || (o3 == 0 && other.bbox_contains(p1))
            || (o4 == 0 && other.bbox_contains(p2))
    }

    /// Distance travelled from `origin` along the unit direction `dir` before
    /// the ray meets this segment, if it does.
    pub fn ray_hit(&self, origin: StateVec, dir: StateVec) -> Option<f64> {
        let e = self.b - self.a;
        let denom = dir.x * e.y - dir.y * e.x;
        let w = self.a - origin;
        if denom.abs() < EPS {
            // Parallel: only a collinear segment can be hit, at its nearer end.
            if (w.x * dir.y - w.y * dir.x).abs() > EPS {
                return None;
            }
            let ta = w.dot(dir);
            let tb = (self.b - origin).dot(dir);
            let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
            return if hi < -EPS { None } else { Some(lo.max(0.0)) };
        }
        let t = (w.x * e.y - w.y * e.x) / denom;
        let u = (w.x * dir.y - w.y * dir.x) / denom;
        (t >= -EPS && (-EPS..=1.0 + EPS).contains(&u)).then(|| t.max(0.0))
    }
}

/// Unit directions of the four radar beams: up, down, left, right.
pub const CARDINAL_RAYS: [StateVec; 4] = [
    StateVec::new(0.0, 1.0),
    StateVec::new(0.0, -1.0),
    StateVec::new(-1.0, 0.0),
    StateVec::new(1.0, 0.0),
];

/// Distance from `origin` to the first wall or bounds edge along `dir`.
pub fn cast_ray(bounds: &Rect, walls: &[Segment], origin: StateVec, dir: StateVec) -> f64 {
    let to_edge = |lo: f64, hi: f64, p: f64, d: f64| -> f64 {
        if d > EPS {
            (hi - p) / d
        } else if d < -EPS {
            (lo - p) / d
        } else {
            f64::INFINITY
        }
    };
    let mut best = to_edge(bounds.min.x, bounds.max.x, origin.x, dir.x)
        .min(to_edge(bounds.min.y, bounds.max.y, origin.y, dir.y))
        .max(0.0);
    for wall in walls {
        if let Some(t) = wall.ray_hit(origin, dir) {
            best = best.min(t);
        }
    }
    best
}
