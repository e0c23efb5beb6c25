//! Planar geometry in meters.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_km(x_km: f64, y_km: f64) -> Self {
        Self::new(x_km * 1000.0, y_km * 1000.0)
    }

    pub fn to_km(self) -> (f64, f64) {
        (self.x / 1000.0, self.y / 1000.0)
    }

    pub fn dist(self, other: Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point2D, t: f64) -> Point2D {
        Point2D::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

/// Distance from `p` to segment `ab`, and the clamped parameter of the foot point.
pub fn segment_projection(p: Point2D, a: Point2D, b: Point2D) -> (f64, f64) {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return (p.dist(a), 0.0);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    (p.dist(a.lerp(b, t)), t)
}

/// An open polyline with cached cumulative arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point2D>,
    cumulative: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<Point2D>) -> Self {
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                acc += points[i - 1].dist(*p);
            }
            cumulative.push(acc);
        }
        Self { points, cumulative }
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point at arclength `s`, clamped to the ends.
    pub fn point_at(&self, s: f64) -> Point2D {
        match self.points.len() {
            0 => Point2D::default(),
            1 => self.points[0],
            _ => {
                let s = s.clamp(0.0, self.length());
                let seg = self.segment_containing(s);
                let (s0, s1) = (self.cumulative[seg], self.cumulative[seg + 1]);
                let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
                self.points[seg].lerp(self.points[seg + 1], t)
            }
        }
    }

    fn segment_containing(&self, s: f64) -> usize {
        let last = self.points.len() - 2;
        match self.cumulative.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        }
    }

    /// Closest point on the polyline: (distance, arclength).
    pub fn project(&self, p: Point2D) -> (f64, f64) {
        match self.points.len() {
            0 => (f64::INFINITY, 0.0),
            1 => (p.dist(self.points[0]), 0.0),
            _ => {
                let mut best = (f64::INFINITY, 0.0);
                for (i, w) in self.points.windows(2).enumerate() {
                    let (d, t) = segment_projection(p, w[0], w[1]);
                    if d < best.0 {
                        best = (d, self.cumulative[i] + t * w[0].dist(w[1]));
                    }
                }
                best
            }
        }
    }

    /// Minimum distance from `p` to the polyline.
    pub fn distance_to(&self, p: Point2D) -> f64 {
        self.project(p).0
    }

    /// Sub-polyline between two arclengths; reversed when `from > to`.
    pub fn slice(&self, from: f64, to: f64) -> Polyline {
        let (lo, hi) = (from.min(to), from.max(to));
        let mut pts = vec![self.point_at(lo)];
        for (p, &c) in self.points.iter().zip(&self.cumulative) {
            if c > lo && c < hi {
                pts.push(*p);
            }
        }
        if hi > lo {
            pts.push(self.point_at(hi));
        }
        if from > to {
            pts.reverse();
        }
        Polyline::new(pts)
    }

    /// Appends `other`, skipping its first point when it coincides with our last.
    pub fn extend(&mut self, other: &Polyline) {
        let mut pts = std::mem::take(&mut self.points);
        for p in other.points() {
            if pts.last().is_some_and(|q| q.dist(*p) < 1e-9) {
                continue;
            }
            pts.push(*p);
        }
        *self = Polyline::new(pts);
    }
}
