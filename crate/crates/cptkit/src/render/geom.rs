//! Rectangle and convex-quad geometry for overlap tests: rotation about a
//! center, polygon clipping and intersection-over-smaller-area.

/// An axis-aligned rectangle in canvas coordinates (y grows downward).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub top: f64,
    pub left: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn new(top: f64, left: f64, width: f64, height: f64) -> Rect {
        Rect {
            top,
            left,
            width,
            height,
        }
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (self.left + self.width / 2.0, self.top + self.height / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.width.max(0.0) * self.height.max(0.0)
    }

    /// Corners as a quad, clockwise from top-left.
    pub fn quad(&self) -> Quad {
        Quad {
            pts: [
                (self.left, self.top),
                (self.right(), self.top),
                (self.right(), self.bottom()),
                (self.left, self.bottom()),
            ],
        }
    }

    /// Rotate about `center` by `degrees` and return the corner quad.
    pub fn rotated_quad(&self, degrees: f64, center: (f64, f64)) -> Quad {
        let quad = self.quad();
        if degrees == 0.0 {
            return quad;
        }
        let (sin, cos) = degrees.to_radians().sin_cos();
        Quad {
            pts: quad.pts.map(|(x, y)| {
                let (dx, dy) = (x - center.0, y - center.1);
                (center.0 + dx * cos - dy * sin, center.1 + dx * sin + dy * cos)
            }),
        }
    }
}

/// A convex quadrilateral (possibly rotated rectangle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub pts: [(f64, f64); 4],
}

impl Quad {
    pub fn area(&self) -> f64 {
        polygon_area(&self.pts)
    }

    /// Axis-aligned bounding box.
    pub fn aabb(&self) -> Rect {
        let xs = self.pts.map(|p| p.0);
        let ys = self.pts.map(|p| p.1);
        let min_x = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_x = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_y = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_y = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Rect::new(min_y, min_x, max_x - min_x, max_y - min_y)
    }

    /// Whether the point lies inside (or on the edge of) the quad.
    pub fn contains(&self, point: (f64, f64)) -> bool {
        // Consistent-side test; the quad winding is either orientation.
        let mut sign = 0.0f64;
        for i in 0..4 {
            let a = self.pts[i];
            let b = self.pts[(i + 1) % 4];
            let cross = (b.0 - a.0) * (point.1 - a.1) - (b.1 - a.1) * (point.0 - a.0);
            if cross.abs() < 1e-12 {
                continue;
            }
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return false;
            }
        }
        true
    }
}

fn polygon_area(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..pts.len() {
        let (x1, y1) = pts[i];
        let (x2, y2) = pts[(i + 1) % pts.len()];
        sum += x1 * y2 - x2 * y1;
    }
    sum.abs() / 2.0
}

/// Area of the intersection of two convex polygons (Sutherland-Hodgman:
/// clip `a` against each edge of `b`).
pub fn intersection_area(a: &Quad, b: &Quad) -> f64 {
    let mut subject: Vec<(f64, f64)> = a.pts.to_vec();
    let clip = orient_ccw(&b.pts);
    for i in 0..clip.len() {
        if subject.is_empty() {
            return 0.0;
        }
        let e1 = clip[i];
        let e2 = clip[(i + 1) % clip.len()];
        let mut next: Vec<(f64, f64)> = Vec::with_capacity(subject.len() + 2);
        for j in 0..subject.len() {
            let current = subject[j];
            let previous = subject[(j + subject.len() - 1) % subject.len()];
            let current_in = inside(e1, e2, current);
            let previous_in = inside(e1, e2, previous);
            if current_in {
                if !previous_in {
                    next.push(line_intersection(previous, current, e1, e2));
                }
                next.push(current);
            } else if previous_in {
                next.push(line_intersection(previous, current, e1, e2));
            }
        }
        subject = next;
    }
    polygon_area(&subject)
}

fn orient_ccw(pts: &[(f64, f64); 4]) -> Vec<(f64, f64)> {
    // Signed area negative means clockwise in screen coordinates; the
    // inside test below expects one consistent winding.
    let mut sum = 0.0;
    for i in 0..4 {
        let (x1, y1) = pts[i];
        let (x2, y2) = pts[(i + 1) % 4];
        sum += x1 * y2 - x2 * y1;
    }
    if sum < 0.0 {
        vec![pts[3], pts[2], pts[1], pts[0]]
    } else {
        pts.to_vec()
    }
}

fn inside(e1: (f64, f64), e2: (f64, f64), p: (f64, f64)) -> bool {
    (e2.0 - e1.0) * (p.1 - e1.1) - (e2.1 - e1.1) * (p.0 - e1.0) >= 0.0
}

fn line_intersection(
    a: (f64, f64),
    b: (f64, f64),
    c: (f64, f64),
    d: (f64, f64),
) -> (f64, f64) {
    let a1 = b.1 - a.1;
    let b1 = a.0 - b.0;
    let c1 = a1 * a.0 + b1 * a.1;
    let a2 = d.1 - c.1;
    let b2 = c.0 - d.0;
    let c2 = a2 * c.0 + b2 * c.1;
    let det = a1 * b2 - a2 * b1;
    if det.abs() < 1e-12 {
        return a;
    }
    ((b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det)
}

/// Intersection over the smaller area, in [0, 1]; 0 when either quad is
/// degenerate.
pub fn intersection_over_smaller(a: &Quad, b: &Quad) -> f64 {
    let smaller = a.area().min(b.area());
    if smaller <= 0.0 {
        return 0.0;
    }
    intersection_area(a, b) / smaller
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_intersection_matches_direct_formula() {
        let a = Rect::new(0.0, 0.0, 4.0, 4.0).quad();
        let b = Rect::new(2.0, 2.0, 6.0, 6.0).quad();
        assert_eq!(intersection_area(&a, &b), 4.0);
        assert_eq!(intersection_over_smaller(&a, &b), 4.0 / 16.0);
    }

    #[test]
    fn disjoint_quads_have_zero_intersection() {
        let a = Rect::new(0.0, 0.0, 2.0, 2.0).quad();
        let b = Rect::new(10.0, 10.0, 2.0, 2.0).quad();
        assert_eq!(intersection_area(&a, &b), 0.0);
    }

    #[test]
    fn identical_quads_have_ios_one() {
        let a = Rect::new(1.0, 2.0, 5.0, 7.0).quad();
        assert!((intersection_over_smaller(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_area() {
        let r = Rect::new(10.0, 10.0, 6.0, 2.0);
        let q = r.rotated_quad(53.0, r.center());
        assert!((q.area() - 12.0).abs() < 1e-9);
    }

    #[test]
    fn rotated_quad_intersection_is_symmetric() {
        let a = Rect::new(0.0, 0.0, 10.0, 4.0).rotated_quad(30.0, (5.0, 2.0));
        let b = Rect::new(1.0, 1.0, 6.0, 6.0).quad();
        let ab = intersection_area(&a, &b);
        let ba = intersection_area(&b, &a);
        assert!((ab - ba).abs() < 1e-9);
        assert!(ab > 0.0);
    }

    #[test]
    fn contains_point() {
        let q = Rect::new(0.0, 0.0, 4.0, 4.0).rotated_quad(45.0, (2.0, 2.0));
        assert!(q.contains((2.0, 2.0)));
        assert!(!q.contains((3.9, 0.1)));
    }
}
