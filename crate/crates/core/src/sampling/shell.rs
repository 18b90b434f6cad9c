use alloc::vec::Vec;

use super::depth::render_with;
use super::PrepConfig;
use crate::exec;
use crate::geometry::{fibonacci_sphere, OrientedPoint, PinholeCamera, TriangleBvh, TriangleMesh};
use crate::{Error, Result, Vec3};

/// Distance of the virtual cameras from the origin.
pub const CAMERA_RADIUS: f64 = 2.0;
/// Vertical field of view of the virtual cameras.
pub const CAMERA_FOV_Y: f64 = core::f64::consts::FRAC_PI_3;

/// Outer surface seen by the virtual cameras.
#[derive(Debug, Clone)]
pub struct Shell {
    pub points: Vec<OrientedPoint>,
    /// Fraction of triangles seen from both sides across all views.
    pub double_sided_fraction: f64,
}

/// Cameras on the Fibonacci lattice at [`CAMERA_RADIUS`] looking at the origin.
pub fn virtual_cameras(n: usize, resolution: u32) -> Result<Vec<PinholeCamera>> {
    fibonacci_sphere(n)?
        .into_iter()
        .map(|dir| PinholeCamera::look_at(dir * CAMERA_RADIUS, Vec3::ZERO, CAMERA_FOV_Y, resolution, resolution))
        .collect()
}

/// Renders the normalized mesh from every virtual camera and back-projects
/// the hit pixels into camera-facing oriented points.
pub fn extract_shell(mesh: &TriangleMesh, config: &PrepConfig) -> Result<Shell> {
    config.validate()?;
    let cameras = virtual_cameras(config.n_cameras, config.depth_resolution)?;
    let bvh = TriangleBvh::new(mesh);
    let normals = mesh.face_normals();
    let views = exec::map_range(cameras.len(), |c| render_with(&bvh, &normals, &cameras[c]));

    let mut seen_front = alloc::vec![false; mesh.triangles.len()];
    let mut seen_back = alloc::vec![false; mesh.triangles.len()];
    let mut points = Vec::new();
    for (map, hits) in &views {
        for i in map.hits() {
            let hit = hits[i].expect("hit pixel has a triangle");
            if hit.front {
                seen_front[hit.triangle] = true;
            } else {
                seen_back[hit.triangle] = true;
            }
            points.push(OrientedPoint {
                position: map.point(i),
                normal: map.normals[i],
            });
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyShell);
    }
    let both = seen_front.iter().zip(&seen_back).filter(|(a, b)| **a && **b).count();
    Ok(Shell {
        points,
        double_sided_fraction: both as f64 / mesh.triangles.len() as f64,
    })
}

/// Keeps meshes whose double-sided fraction does not exceed the threshold.
pub fn accept_mesh(double_sided_fraction: f64, config: &PrepConfig) -> bool {
    double_sided_fraction <= config.double_sided_reject_fraction
}
