use alloc::vec::Vec;

use crate::exec;
use crate::geometry::{PinholeCamera, TriangleBvh, TriangleMesh};
use crate::Vec3;

/// Per-pixel camera-space depth (0 = no hit) and unit surface normals facing the camera.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub camera: PinholeCamera,
    pub depth: Vec<f64>,
    pub normals: Vec<Vec3>,
}

impl DepthMap {
    pub fn empty(camera: PinholeCamera) -> Self {
        let n = camera.pixel_count();
        DepthMap {
            camera,
            depth: alloc::vec![0.0; n],
            normals: alloc::vec![Vec3::ZERO; n],
        }
    }

    pub fn width(&self) -> u32 {
        self.camera.width
    }

    pub fn height(&self) -> u32 {
        self.camera.height
    }

    /// Pixel indices with a surface hit.
    pub fn hits(&self) -> impl Iterator<Item = usize> + '_ {
        self.depth.iter().enumerate().filter(|(_, &d)| d > 0.0).map(|(i, _)| i)
    }

    pub fn hit_count(&self) -> usize {
        self.hits().count()
    }

    /// World-space direction of pixel `i` scaled to unit camera depth.
    pub fn ray_direction(&self, i: usize) -> Vec3 {
        let w = self.camera.width as usize;
        self.camera.pixel_direction((i % w) as u32, (i / w) as u32)
    }

    /// Back-projected surface point of pixel `i` (meaningful only for hits).
    pub fn point(&self, i: usize) -> Vec3 {
        self.camera.center + self.ray_direction(i) * self.depth[i]
    }
}

/// Pixel hit with the source triangle and whether its winding faces the camera.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PixelHit {
    pub triangle: usize,
    pub front: bool,
}

pub(crate) fn render_with(
    bvh: &TriangleBvh,
    face_normals: &[Vec3],
    camera: &PinholeCamera,
) -> (DepthMap, Vec<Option<PixelHit>>) {
    let w = camera.width as usize;
    let rows = exec::map_range(camera.height as usize, |v| {
        (0..w)
            .map(|u| {
                let dir = camera.pixel_direction(u as u32, v as u32);
                bvh.raycast(camera.center, dir, 0.0, f64::INFINITY).map(|hit| {
                    let n = face_normals[hit.triangle];
                    let front = n.dot(dir) < 0.0;
                    (hit.t, if front { n } else { -n }, hit.triangle, front)
                })
            })
            .collect::<Vec<_>>()
    });
    let mut map = DepthMap::empty(*camera);
    let mut hits = alloc::vec![None; camera.pixel_count()];
    for (i, px) in rows.into_iter().flatten().enumerate() {
        if let Some((t, n, triangle, front)) = px {
            map.depth[i] = t;
            map.normals[i] = n;
            hits[i] = Some(PixelHit { triangle, front });
        }
    }
    (map, hits)
}

/// Ray-casts every pixel against the mesh. Normals come from the hit
/// triangle, flipped to face the camera.
pub fn render_depth(mesh: &TriangleMesh, camera: &PinholeCamera) -> DepthMap {
    render_with(&TriangleBvh::new(mesh), &mesh.face_normals(), camera).0
}
