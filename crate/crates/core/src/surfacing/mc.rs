use alloc::vec::Vec;

use super::field::{LatentField, ScalarField};
use super::grid::{sample_grid, VoxelGrid};
use super::tables::{EDGE_TABLE, TRIANGLE_TABLE};
use crate::decoder::{DecoderParams, Real};
use crate::geometry::{Aabb, TriangleMesh};
use crate::{Result, Vec3};

/// Extracted level set with per-vertex unit normals (zero where the field
/// gradient vanishes).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IsoMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub normals: Vec<Vec3>,
}

impl IsoMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Triangle mesh view (degenerate triangles dropped).
    pub fn to_mesh(&self) -> TriangleMesh {
        TriangleMesh::new(self.vertices.clone(), self.triangles.clone()).expect("marching cubes emits valid indices")
    }
}

/// Corner offsets of a cell, in table order.
const CORNERS: [(usize, usize, usize); 8] = [
    (0, 0, 0),
    (1, 0, 0),
    (1, 1, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 0, 1),
    (1, 1, 1),
    (0, 1, 1),
];

/// Each table edge as (axis, base corner offset) of the lattice edge it lies on.
const EDGES: [(usize, (usize, usize, usize)); 12] = [
    (0, (0, 0, 0)),
    (1, (1, 0, 0)),
    (0, (0, 1, 0)),
    (1, (0, 0, 0)),
    (0, (0, 0, 1)),
    (1, (1, 0, 1)),
    (0, (0, 1, 1)),
    (1, (0, 0, 1)),
    (2, (0, 0, 0)),
    (2, (1, 0, 0)),
    (2, (1, 1, 0)),
    (2, (0, 1, 0)),
];

const NONE: u32 = u32::MAX;

/// Vertex ids of lattice edges, kept for two corner layers at a time.
struct EdgeCache {
    side: usize,
    /// x and y edges of the lower (`[0]`) and upper (`[1]`) layer.
    planar: [Vec<u32>; 2],
    /// z edges between the two layers.
    vertical: Vec<u32>,
}

impl EdgeCache {
    fn new(side: usize) -> Self {
        EdgeCache {
            side,
            planar: [alloc::vec![NONE; 2 * side * side], alloc::vec![NONE; 2 * side * side]],
            vertical: alloc::vec![NONE; side * side],
        }
    }

    fn slot(&mut self, axis: usize, i: usize, j: usize, layer: usize) -> &mut u32 {
        let flat = i + self.side * j;
        match axis {
            2 => &mut self.vertical[flat],
            a => &mut self.planar[layer][a * self.side * self.side + flat],
        }
    }

    fn advance(&mut self) {
        self.planar.swap(0, 1);
        self.planar[1].fill(NONE);
        self.vertical.fill(NONE);
    }
}

/// Marching cubes with linear edge interpolation. A corner is inside when
/// its value is below `iso`. Vertices on shared lattice edges are shared,
/// and triangles wind counter-clockwise seen from the side where the field
/// exceeds `iso`.
pub fn marching_cubes(grid: &VoxelGrid, iso: f32) -> IsoMesh {
    let res = grid.resolution;
    let mut cache = EdgeCache::new(grid.side());
    let mut mesh = IsoMesh::default();
    let mut grads = Vec::new();
    for k in 0..res {
        for j in 0..res {
            for i in 0..res {
                let mut case = 0usize;
                for (c, &(dx, dy, dz)) in CORNERS.iter().enumerate() {
                    if grid.value(i + dx, j + dy, k + dz) < iso {
                        case |= 1 << c;
                    }
                }
                if EDGE_TABLE[case] == 0 {
                    continue;
                }
                let mut ids = [NONE; 12];
                for (e, id) in ids.iter_mut().enumerate() {
                    if EDGE_TABLE[case] & (1 << e) == 0 {
                        continue;
                    }
                    let (axis, (dx, dy, dz)) = EDGES[e];
                    let slot = cache.slot(axis, i + dx, j + dy, dz);
                    if *slot == NONE {
                        let (a, b) = ((i + dx, j + dy, k + dz), step((i + dx, j + dy, k + dz), axis));
                        let (va, vb) = (grid.value(a.0, a.1, a.2), grid.value(b.0, b.1, b.2));
                        let t = ((iso - va) / (vb - va)) as f64;
                        let pa = grid.corner(a.0, a.1, a.2);
                        let pb = grid.corner(b.0, b.1, b.2);
                        mesh.vertices.push(pa.lerp(pb, t));
                        grads.push(
                            grid.corner_gradient(a.0, a.1, a.2)
                                .lerp(grid.corner_gradient(b.0, b.1, b.2), t),
                        );
                        *slot = (mesh.vertices.len() - 1) as u32;
                    }
                    *id = *slot;
                }
                for tri in TRIANGLE_TABLE[case].chunks(3).take_while(|t| t[0] >= 0) {
                    let [a, b, c] = [ids[tri[0] as usize], ids[tri[1] as usize], ids[tri[2] as usize]];
                    if a != b && b != c && a != c {
                        // The tables wind towards the inside; flip to face outward.
                        mesh.triangles.push([a, c, b]);
                    }
                }
            }
        }
        cache.advance();
    }
    mesh.normals = grads
        .into_iter()
        .map(|g| g.try_normalize().unwrap_or(Vec3::ZERO))
        .collect();
    mesh
}

#[inline]
fn step((i, j, k): (usize, usize, usize), axis: usize) -> (usize, usize, usize) {
    match axis {
        0 => (i + 1, j, k),
        1 => (i, j + 1, k),
        _ => (i, j, k + 1),
    }
}

/// Zero level set of the decoder at code `z`, with normals from the
/// decoder's analytic spatial gradient.
pub fn extract_mesh<T: Real>(params: &DecoderParams<T>, z: &[f32], resolution: usize, bounds: Aabb) -> Result<IsoMesh> {
    let field = LatentField::new(params, z)?;
    let grid = sample_grid(&field, resolution, bounds)?;
    let mut mesh = marching_cubes(&grid, 0.0);
    mesh.normals = field
        .gradients(&mesh.vertices)
        .into_iter()
        .map(|g| g.try_normalize().unwrap_or(Vec3::ZERO))
        .collect();
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AnalyticShape;
    use alloc::collections::BTreeMap;

    fn edge_use(mesh: &IsoMesh) -> BTreeMap<(u32, u32), (usize, usize)> {
        let mut m: BTreeMap<(u32, u32), (usize, usize)> = BTreeMap::new();
        for t in &mesh.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let entry = m.entry((a.min(b), a.max(b))).or_default();
                if a < b {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        m
    }

    #[test]
    fn no_sign_change_no_mesh() {
        let g = VoxelGrid::new(3, Aabb::cube(1.0), alloc::vec![1.0; 64]).unwrap();
        assert!(marching_cubes(&g, 0.0).is_empty());
    }

    #[test]
    fn sphere_vertices_near_radius_and_closed() {
        let sphere = AnalyticShape::sphere(Vec3::ZERO, 0.5).unwrap();
        let g = sample_grid(&sphere, 64, Aabb::cube(1.0)).unwrap();
        let mesh = marching_cubes(&g, 0.0);
        let diag = 3f64.sqrt() * 2.0 / 64.0;
        assert!(mesh.vertices.iter().all(|v| (v.norm() - 0.5).abs() <= diag));
        // Linear interpolation on an exact distance field is much tighter.
        assert!(mesh.vertices.iter().all(|v| (v.norm() - 0.5).abs() <= 2e-3));
        // Closed and consistently oriented: every edge used once in each direction.
        assert!(edge_use(&mesh).values().all(|&(f, b)| f == 1 && b == 1));
        let tm = mesh.to_mesh();
        let v = tm.signed_volume();
        let exact = 4.0 / 3.0 * core::f64::consts::PI * 0.125;
        assert!(v > 0.0 && (v - exact).abs() / exact < 0.01, "{v}");
        let euler = mesh.vertices.len() as i64 - edge_use(&mesh).len() as i64 + mesh.triangles.len() as i64;
        assert_eq!(euler, 2);
        for (p, n) in mesh.vertices.iter().zip(&mesh.normals) {
            assert!(n.dot(p.normalize()) > 0.99);
        }
    }

    #[test]
    fn single_negative_corner_is_an_octahedron() {
        let mut vals = alloc::vec![1.0f32; 125];
        let g0 = VoxelGrid::new(4, Aabb::cube(1.0), vals.clone()).unwrap();
        vals[g0.index(2, 2, 2)] = -1.0;
        let g = VoxelGrid::new(4, Aabb::cube(1.0), vals).unwrap();
        let mesh = marching_cubes(&g, 0.0);
        assert_eq!(mesh.vertices.len(), 6);
        assert_eq!(mesh.triangles.len(), 8);
        let edges = edge_use(&mesh);
        assert_eq!(6 - edges.len() as i64 + 8, 2);
        assert!(edges.values().all(|&(f, b)| f == 1 && b == 1));
        assert!(mesh.to_mesh().signed_volume() > 0.0);
    }

    #[test]
    fn torus_has_genus_one() {
        let torus = AnalyticShape::torus(0.5, 0.2).unwrap();
        let g = sample_grid(&torus, 48, Aabb::cube(1.0)).unwrap();
        let mesh = marching_cubes(&g, 0.0);
        let edges = edge_use(&mesh);
        assert!(edges.values().all(|&(f, b)| f == 1 && b == 1));
        assert_eq!(
            mesh.vertices.len() as i64 - edges.len() as i64 + mesh.triangles.len() as i64,
            0
        );
    }

    #[test]
    fn vertex_residual_bounded_by_cell_gap() {
        let shape = AnalyticShape::torus(0.45, 0.15).unwrap();
        let g = sample_grid(&shape, 24, Aabb::cube(1.0)).unwrap();
        let mesh = marching_cubes(&g, 0.0);
        let h = 2.0 / 24.0;
        for v in &mesh.vertices {
            let cell = |x: f64| (((x + 1.0) / h).floor() as usize).min(23);
            let (i, j, k) = (cell(v.x), cell(v.y), cell(v.z));
            let mut lo = f32::INFINITY;
            let mut hi = f32::NEG_INFINITY;
            for &(dx, dy, dz) in &CORNERS {
                let val = g.value(i + dx, j + dy, k + dz);
                lo = lo.min(val);
                hi = hi.max(val);
            }
            assert!(shape.sdf(*v).abs() <= (hi - lo) as f64 + 1e-6);
        }
    }

    #[test]
    fn iso_offset_grows_the_surface() {
        let sphere = AnalyticShape::sphere(Vec3::ZERO, 0.4).unwrap();
        let g = sample_grid(&sphere, 40, Aabb::cube(1.0)).unwrap();
        let mesh = marching_cubes(&g, 0.1);
        assert!(mesh.vertices.iter().all(|v| (v.norm() - 0.5).abs() < 3e-3));
    }
}
