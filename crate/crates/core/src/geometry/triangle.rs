use crate::{Error, Result, Vec3};

/// Triangles with area below this are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
}

impl Triangle {
    pub const fn new(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Triangle { a, b, c }
    }

    /// Non-normalized normal following the winding order; its length is twice the area.
    #[inline]
    pub fn scaled_normal(&self) -> Vec3 {
        (self.b - self.a).cross(self.c - self.a)
    }

    pub fn area(&self) -> f64 {
        0.5 * self.scaled_normal().norm()
    }

    pub fn is_degenerate(&self) -> bool {
        let area = self.area();
        area.is_nan() || area < DEGENERATE_AREA
    }

    pub fn normal(&self) -> Vec3 {
        self.scaled_normal().normalize()
    }

    pub fn centroid(&self) -> Vec3 {
        (self.a + self.b + self.c) / 3.0
    }

    pub fn point_at(&self, u: f64, v: f64, w: f64) -> Vec3 {
        self.a * u + self.b * v + self.c * w
    }
}

/// Closest point on the triangle and its distance to `q`.
pub fn point_triangle_distance(q: Vec3, tri: &Triangle) -> Result<(f64, Vec3)> {
    if tri.is_degenerate() {
        return Err(Error::DegenerateGeometry("zero-area triangle"));
    }
    let p = closest_point(q, tri);
    Ok((q.distance(p), p))
}

/// Closest point by Voronoi-region classification (Ericson, Real-Time
/// Collision Detection, 5.1.5). Caller guarantees a non-degenerate triangle.
pub fn closest_point(p: Vec3, t: &Triangle) -> Vec3 {
    let (a, b, c) = (t.a, t.b, t.c);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }

    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }

    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Möller–Trumbore intersection. Returns the ray parameter of a hit with
/// `t > t_min`, for either face orientation.
#[inline]
pub fn ray_intersect(origin: Vec3, dir: Vec3, t: &Triangle, t_min: f64) -> Option<f64> {
    let e1 = t.b - t.a;
    let e2 = t.c - t.a;
    let p = dir.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - t.a;
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = dir.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let hit = e2.dot(q) * inv;
    (hit > t_min).then_some(hit)
}
