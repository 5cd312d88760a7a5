//! Planar geometry helpers: points, polyline projection, segment/rectangle
//! intersection. All coordinates are meters.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Closest point on segment `a`..`b` to `p`, clamped to the segment.
/// Returns the foot point and the arc distance from `a` to it.
pub fn project_onto_segment(p: Point, a: Point, b: Point) -> (Point, f64) {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return (a, 0.0);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    let foot = Point::new(a.x + t * dx, a.y + t * dy);
    (foot, t * len2.sqrt())
}

pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Result of projecting a point onto a polyline.
#[derive(Debug, Clone, Copy)]
pub struct PolylineProjection {
    /// Closest point on the polyline.
    pub point: Point,
    /// Arc length from the first polyline vertex to `point`.
    pub arc: f64,
    /// Euclidean distance from the query point to `point`.
    pub distance: f64,
}

/// Projects `p` onto the closest segment of `points`. Ties between segments
/// keep the earlier one so the result is deterministic.
pub fn project_onto_polyline(p: Point, points: &[Point]) -> PolylineProjection {
    debug_assert!(!points.is_empty());
    let mut best = PolylineProjection {
        point: points[0],
        arc: 0.0,
        distance: p.distance(&points[0]),
    };
    let mut arc_start = 0.0;
    for w in points.windows(2) {
        let (foot, along) = project_onto_segment(p, w[0], w[1]);
        let d = p.distance(&foot);
        if d < best.distance {
            best = PolylineProjection {
                point: foot,
                arc: arc_start + along,
                distance: d,
            };
        }
        arc_start += w[0].distance(&w[1]);
    }
    best
}

/// Segment/axis-aligned-rectangle intersection, boundary inclusive.
/// A segment grazing a corner counts as intersecting.
pub fn segment_intersects_rect(a: Point, b: Point, min: Point, max: Point) -> bool {
    // Liang-Barsky style slab clipping of the parametric segment.
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (delta, lo, hi, start) in [(dx, min.x, max.x, a.x), (dy, min.y, max.y, a.y)] {
        if delta == 0.0 {
            if start < lo || start > hi {
                return false;
            }
            continue;
        }
        let mut ta = (lo - start) / delta;
        let mut tb = (hi - start) / delta;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}
