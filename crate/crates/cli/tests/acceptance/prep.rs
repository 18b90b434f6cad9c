use sdfforge::geometry::{normalize_to_unit_sphere, TriangleMesh};
use sdfforge::sampling::{generate_samples, PrepConfig};
use sdfforge::Vec3;

use crate::Outcome;

fn dot(a: Vec3, b: Vec3) -> f64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    Vec3::new(a.x - b.x, a.y - b.y, a.z - b.z)
}

/// Closest point on triangle `abc` to `p` by Voronoi-region classification.
fn closest_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let (ab, ac, ap) = (sub(b, a), sub(c, a), sub(p, a));
    let (d1, d2) = (dot(ab, ap), dot(ac, ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let (d3, d4) = (dot(ab, bp), dot(ac, bp));
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = sub(p, c);
    let (d5, d6) = (dot(ab, cp), dot(ac, cp));
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        return b + sub(c, b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Solid angle of triangle `abc` seen from `p` (Van Oosterom and Strackee).
fn solid_angle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let (a, b, c) = (sub(a, p), sub(b, p), sub(c, p));
    let (la, lb, lc) = (dot(a, a).sqrt(), dot(b, b).sqrt(), dot(c, c).sqrt());
    let det = dot(a, b.cross(c));
    let den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
    2.0 * det.atan2(den)
}

/// Signed distance over all triangles: exact unsigned distance, sign from
/// the winding number.
fn brute_force_sdf(mesh: &TriangleMesh, p: Vec3) -> f64 {
    let mut best = f64::INFINITY;
    let mut winding = 0.0;
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|i| mesh.vertices[i as usize]);
        let q = closest_on_triangle(p, a, b, c);
        best = best.min(dot(sub(p, q), sub(p, q)).sqrt());
        winding += solid_angle(p, a, b, c);
    }
    let inside = (winding / (4.0 * std::f64::consts::PI)).abs() > 0.5;
    if inside {
        -best
    } else {
        best
    }
}

pub fn run() -> Outcome {
    let cube = TriangleMesh::cuboid(Vec3::new(0.5, 0.5, 0.5));
    assert_eq!(cube.triangles.len(), 12);
    let (mesh, _) = normalize_to_unit_sphere(&cube).unwrap();
    let set = generate_samples(&mesh, "cube", &PrepConfig::default(), 7).unwrap();
    let (mut considered, mut agree, mut worst) = (0usize, 0usize, 0.0f64);
    for s in set.iter() {
        let truth = brute_force_sdf(&mesh, s.point());
        if truth.abs() <= 0.01 {
            continue;
        }
        considered += 1;
        let value = s.sdf as f64;
        if (value < 0.0) == (truth < 0.0) {
            agree += 1;
            worst = worst.max((value - truth).abs());
        }
    }
    let fraction = agree as f64 / considered as f64;
    Outcome::new(
        considered > 0 && fraction >= 0.99 && worst <= 1e-3,
        format!(
            "{considered} samples with |s| > 0.01: sign agreement {:.4}%, max |diff| {worst:.2e} on agreeing samples",
            100.0 * fraction
        ),
    )
}
