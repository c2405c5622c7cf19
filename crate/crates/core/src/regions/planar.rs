//! Planar polygon helpers: convex hull, minimum-area rectangle, convex
//! clipping and areas.

pub type Point2 = (f64, f64);

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain. Returns the hull counter-clockwise (in a
/// y-up frame) without repeating the first vertex; collinear points dropped.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Rectangle given by centre, side lengths and the direction of the `w` side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Point2,
    pub w: f64,
    pub h: f64,
    pub angle: f64,
}

/// Minimum-area enclosing rectangle of a convex polygon.
///
/// Rotating calipers over hull edges: the optimal rectangle has a side
/// collinear with some hull edge, so each edge direction is tried and the
/// smallest area kept (first edge wins ties). Degenerate hulls fall back to
/// the axis-aligned extent.
pub fn min_area_rect(hull: &[Point2]) -> OrientedRect {
    if hull.len() < 3 {
        return axis_aligned_rect(hull);
    }
    let mut best: Option<(f64, OrientedRect)> = None;
    for k in 0..hull.len() {
        let a = hull[k];
        let b = hull[(k + 1) % hull.len()];
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        let (ux, uy) = (dx / len, dy / len);
        let (mut d0, mut d1, mut n0, mut n1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in hull {
            let d = p.0 * ux + p.1 * uy;
            let n = -p.0 * uy + p.1 * ux;
            d0 = d0.min(d);
            d1 = d1.max(d);
            n0 = n0.min(n);
            n1 = n1.max(n);
        }
        let area = (d1 - d0) * (n1 - n0);
        if best.as_ref().is_none_or(|(ba, _)| area < *ba) {
            let (md, mn) = ((d0 + d1) / 2.0, (n0 + n1) / 2.0);
            best = Some((
                area,
                OrientedRect {
                    center: (md * ux - mn * uy, md * uy + mn * ux),
                    w: d1 - d0,
                    h: n1 - n0,
                    angle: uy.atan2(ux),
                },
            ));
        }
    }
    best.map(|(_, r)| r).unwrap_or_else(|| axis_aligned_rect(hull))
}

fn axis_aligned_rect(points: &[Point2]) -> OrientedRect {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1);
        y1 = y1.max(p.1);
    }
    if points.is_empty() {
        return OrientedRect {
            center: (0.0, 0.0),
            w: 0.0,
            h: 0.0,
            angle: 0.0,
        };
    }
    OrientedRect {
        center: ((x0 + x1) / 2.0, (y0 + y1) / 2.0),
        w: x1 - x0,
        h: y1 - y0,
        angle: 0.0,
    }
}

/// Signed shoelace area (positive for counter-clockwise in a y-up frame).
pub fn signed_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        s += a.0 * b.1 - b.0 * a.1;
    }
    s / 2.0
}

pub fn polygon_area(poly: &[Point2]) -> f64 {
    signed_area(poly).abs()
}

fn orient_ccw(poly: &[Point2]) -> Vec<Point2> {
    let mut p = poly.to_vec();
    if signed_area(&p) < 0.0 {
        p.reverse();
    }
    p
}

/// Sutherland-Hodgman clipping of convex `subject` by convex `clip`.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let clip = orient_ccw(clip);
    let mut output = orient_ccw(subject);
    for k in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[k];
        let b = clip[(k + 1) % clip.len()];
        let inside = |p: Point2| cross(a, b, p) >= 0.0;
        let input = std::mem::take(&mut output);
        for m in 0..input.len() {
            let cur = input[m];
            let prev = input[(m + input.len() - 1) % input.len()];
            let (ci, pi) = (inside(cur), inside(prev));
            if ci {
                if !pi {
                    output.push(intersect(prev, cur, a, b));
                }
                output.push(cur);
            } else if pi {
                output.push(intersect(prev, cur, a, b));
            }
        }
    }
    output
}

fn intersect(p: Point2, q: Point2, a: Point2, b: Point2) -> Point2 {
    let (rx, ry) = (q.0 - p.0, q.1 - p.1);
    let (sx, sy) = (b.0 - a.0, b.1 - a.1);
    let denom = rx * sy - ry * sx;
    if denom == 0.0 {
        return q;
    }
    let t = ((a.0 - p.0) * sy - (a.1 - p.1) * sx) / denom;
    (p.0 + t * rx, p.1 + t * ry)
}
