use alloc::vec::Vec;

#[allow(unused_imports)] // sqrt and friends without std
use num_traits::Float;
use rand::Rng;
use rand_distr::{weighted::WeightedAliasIndex, Distribution};

use super::triangle::{Triangle, DEGENERATE_AREA};
use super::{Aabb, OrientedPoint};
use crate::{Error, Result, Vec3};

/// Radius of the bounding sphere after normalization.
pub const UNIT_SPHERE_FIT: f64 = 1.0 / 1.03;

/// Indexed triangle mesh.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    /// Builds a mesh, checking indices and dropping zero-area triangles.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let n = vertices.len();
        for tri in &triangles {
            for &i in tri {
                if i as usize >= n {
                    return Err(Error::IndexOutOfRange {
                        index: i as usize,
                        len: n,
                    });
                }
            }
        }
        let mut mesh = TriangleMesh { vertices, triangles };
        mesh.triangles
            .retain(|t| mesh_triangle(&mesh.vertices, t).area() >= DEGENERATE_AREA);
        Ok(mesh)
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    #[inline]
    pub fn triangle(&self, i: usize) -> Triangle {
        mesh_triangle(&self.vertices, &self.triangles[i])
    }

    pub fn triangles_iter(&self) -> impl Iterator<Item = Triangle> + '_ {
        self.triangles.iter().map(move |t| mesh_triangle(&self.vertices, t))
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles_iter().map(|t| t.area()).sum()
    }

    /// Unit face normals following the winding order.
    pub fn face_normals(&self) -> Vec<Vec3> {
        self.triangles_iter().map(|t| t.normal()).collect()
    }

    /// Same surface with every triangle's winding reversed.
    pub fn flipped(&self) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
        }
    }

    /// Applies `p -> p * scale + offset` to every vertex.
    pub fn transformed(&self, scale: f64, offset: Vec3) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|&v| v * scale + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Divergence-theorem volume; positive for closed, outward-wound meshes.
    pub fn signed_volume(&self) -> f64 {
        self.triangles_iter().map(|t| t.a.dot(t.b.cross(t.c)) / 6.0).sum()
    }

    /// Area-weighted uniform samples on the surface with face normals.
    pub fn sample_surface<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<OrientedPoint>> {
        if self.triangles.is_empty() {
            return Err(Error::EmptyInput("mesh has no triangles"));
        }
        let areas: Vec<f64> = self.triangles_iter().map(|t| t.area()).collect();
        let index =
            WeightedAliasIndex::new(areas).map_err(|_| Error::DegenerateGeometry("mesh has zero total area"))?;
        let normals = self.face_normals();
        Ok((0..n)
            .map(|_| {
                let i = index.sample(rng);
                let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
                if u + v > 1.0 {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                let tri = self.triangle(i);
                OrientedPoint {
                    position: tri.point_at(1.0 - u - v, u, v),
                    normal: normals[i],
                }
            })
            .collect())
    }

    /// Axis-aligned box with the given half extents, outward winding.
    pub fn cuboid(half: Vec3) -> TriangleMesh {
        let mut vertices = Vec::with_capacity(8);
        for i in 0..8 {
            let sx = if i & 1 == 0 { -1.0 } else { 1.0 };
            let sy = if i & 2 == 0 { -1.0 } else { 1.0 };
            let sz = if i & 4 == 0 { -1.0 } else { 1.0 };
            vertices.push(Vec3::new(sx * half.x, sy * half.y, sz * half.z));
        }
        let triangles = alloc::vec![
            [0, 2, 1],
            [1, 2, 3], // -z
            [4, 5, 6],
            [5, 7, 6], // +z
            [0, 1, 4],
            [1, 5, 4], // -y
            [2, 6, 3],
            [3, 6, 7], // +y
            [0, 4, 2],
            [2, 4, 6], // -x
            [1, 3, 5],
            [3, 7, 5], // +x
        ];
        TriangleMesh { vertices, triangles }
    }

    /// Geodesic sphere from a subdivided icosahedron, outward winding.
    pub fn icosphere(center: Vec3, radius: f64, subdivisions: u32) -> TriangleMesh {
        let t = (1.0 + 5.0f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec3> = [
            (-1.0, t, 0.0),
            (1.0, t, 0.0),
            (-1.0, -t, 0.0),
            (1.0, -t, 0.0),
            (0.0, -1.0, t),
            (0.0, 1.0, t),
            (0.0, -1.0, -t),
            (0.0, 1.0, -t),
            (t, 0.0, -1.0),
            (t, 0.0, 1.0),
            (-t, 0.0, -1.0),
            (-t, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut triangles: Vec<[u32; 3]> = alloc::vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoints = alloc::collections::BTreeMap::new();
            let mut next = Vec::with_capacity(triangles.len() * 4);
            let mut mid = |a: u32, b: u32, vertices: &mut Vec<Vec3>| -> u32 {
                let key = (a.min(b), a.max(b));
                *midpoints.entry(key).or_insert_with(|| {
                    let m = ((vertices[a as usize] + vertices[b as usize]) * 0.5).normalize();
                    vertices.push(m);
                    (vertices.len() - 1) as u32
                })
            };
            for &[a, b, c] in &triangles {
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, c, &mut vertices);
                let ca = mid(c, a, &mut vertices);
                next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            triangles = next;
        }
        for v in &mut vertices {
            *v = *v * radius + center;
        }
        TriangleMesh { vertices, triangles }
    }
}

#[inline]
fn mesh_triangle(vertices: &[Vec3], t: &[u32; 3]) -> Triangle {
    Triangle::new(
        vertices[t[0] as usize],
        vertices[t[1] as usize],
        vertices[t[2] as usize],
    )
}

/// Transform returned by [`normalize_to_unit_sphere`]: `normalized = (original - offset) * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub scale: f64,
    pub offset: Vec3,
}

impl Normalization {
    pub fn apply(&self, p: Vec3) -> Vec3 {
        (p - self.offset) * self.scale
    }

    pub fn invert(&self, p: Vec3) -> Vec3 {
        p / self.scale + self.offset
    }
}

/// Recenters the mesh on its bounding-box center and scales it so the
/// farthest vertex lies at radius `1/1.03`.
pub fn normalize_to_unit_sphere(mesh: &TriangleMesh) -> Result<(TriangleMesh, Normalization)> {
    if mesh.vertices.is_empty() {
        return Err(Error::EmptyInput("mesh has no vertices"));
    }
    let center = mesh.bounds().center();
    let radius = mesh.vertices.iter().map(|v| v.distance(center)).fold(0.0, f64::max);
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::DegenerateGeometry("all vertices coincide"));
    }
    let norm = Normalization {
        scale: UNIT_SPHERE_FIT / radius,
        offset: center,
    };
    let vertices = mesh.vertices.iter().map(|&v| norm.apply(v)).collect();
    Ok((
        TriangleMesh {
            vertices,
            triangles: mesh.triangles.clone(),
        },
        norm,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cube_has_outward_winding_and_unit_volume() {
        let cube = TriangleMesh::cuboid(Vec3::splat(0.5));
        assert_eq!(cube.triangles.len(), 12);
        assert_relative_eq!(cube.signed_volume(), 1.0, epsilon = 1e-12);
        for t in cube.triangles_iter() {
            assert!(t.normal().dot(t.centroid()) > 0.0);
        }
    }

    #[test]
    fn icosphere_is_outward() {
        let s = TriangleMesh::icosphere(Vec3::ZERO, 1.0, 2);
        assert_eq!(s.triangles.len(), 320);
        assert!(s.signed_volume() > 4.0);
        for t in s.triangles_iter() {
            assert!(t.normal().dot(t.centroid()) > 0.0);
        }
    }

    #[test]
    fn sphere_of_radius_two_normalizes_to_fit_radius() {
        let s = TriangleMesh::icosphere(Vec3::ZERO, 2.0, 2);
        let (n, _) = normalize_to_unit_sphere(&s).unwrap();
        // The icosphere is symmetric, so its bounding-box center is the origin.
        for v in &n.vertices {
            assert_relative_eq!(v.norm(), 1.0 / 1.03, epsilon = 1e-6);
        }
    }

    #[test]
    fn normalization_is_idempotent() {
        let s = TriangleMesh::icosphere(Vec3::new(0.3, -1.0, 2.0), 3.0, 1);
        let (once, _) = normalize_to_unit_sphere(&s).unwrap();
        let (twice, t) = normalize_to_unit_sphere(&once).unwrap();
        assert_relative_eq!(t.scale, 1.0, epsilon = 1e-6);
        assert!(t.offset.norm() < 1e-6);
        for (a, b) in once.vertices.iter().zip(&twice.vertices) {
            assert!(a.distance(*b) < 1e-6);
        }
    }

    #[test]
    fn offset_cube_is_recentered() {
        let cube = TriangleMesh::cuboid(Vec3::splat(0.5)).transformed(1.0, Vec3::new(5.0, 0.0, 0.0));
        let (n, t) = normalize_to_unit_sphere(&cube).unwrap();
        assert!(t.offset.distance(Vec3::new(5.0, 0.0, 0.0)) < 1e-12);
        let max = n.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // Half diagonal sqrt(3)/2 is mapped to 1/1.03.
        assert_relative_eq!(max, 1.0 / 1.03, epsilon = 1e-6);
        assert_relative_eq!(t.scale, 2.0 / (1.03 * 3.0f64.sqrt()), epsilon = 1e-12);
        for (o, p) in cube.vertices.iter().zip(&n.vertices) {
            assert!(t.invert(*p).distance(*o) < 1e-12);
        }
    }

    #[test]
    fn empty_mesh_is_rejected() {
        assert_eq!(
            normalize_to_unit_sphere(&TriangleMesh::default()).unwrap_err(),
            Error::EmptyInput("mesh has no vertices")
        );
    }

    #[test]
    fn bad_index_and_degenerate_faces() {
        let v = alloc::vec![Vec3::ZERO, Vec3::X, Vec3::Y];
        assert!(matches!(
            TriangleMesh::new(v.clone(), alloc::vec![[0, 1, 7]]),
            Err(Error::IndexOutOfRange { index: 7, len: 3 })
        ));
        let m = TriangleMesh::new(v, alloc::vec![[0, 1, 2], [0, 1, 1]]).unwrap();
        assert_eq!(m.triangles.len(), 1);
    }

    #[test]
    fn surface_samples_lie_on_the_sphere() {
        let s = TriangleMesh::icosphere(Vec3::ZERO, 1.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = s.sample_surface(500, &mut rng).unwrap();
        for p in pts {
            assert!(p.position.norm() <= 1.0 + 1e-12 && p.position.norm() > 0.98);
            assert_relative_eq!(p.normal.norm(), 1.0, epsilon = 1e-12);
        }
    }
}
