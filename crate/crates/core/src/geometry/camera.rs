#[allow(unused_imports)] // sqrt and friends without std
use num_traits::Float;

use super::vec::{mat_t_vec, mat_vec, Mat3};
use crate::{Error, Result, Vec3};

/// Pinhole camera with OpenCV axes: x right, y down, z forward.
///
/// `rotation` rows are the camera axes expressed in world coordinates, so
/// `p_cam = rotation * (p_world - center)`. Depth values produced with this
/// camera are camera-space `z`, and pixel `(u, v)` is sampled at its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinholeCamera {
    pub rotation: Mat3,
    pub center: Vec3,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl PinholeCamera {
    /// Camera at `eye` looking at `target` with vertical field of view `fov_y`
    /// (radians). Up is world +Y orthogonalized against the view direction,
    /// falling back to +X when they are parallel.
    pub fn look_at(eye: Vec3, target: Vec3, fov_y: f64, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("camera resolution must be positive"));
        }
        let forward = (target - eye)
            .try_normalize()
            .ok_or(Error::DegenerateGeometry("camera eye coincides with target"))?;
        let reference = if Vec3::Y.cross(forward).norm() > 1e-6 {
            Vec3::Y
        } else {
            Vec3::X
        };
        let up = (reference - forward * reference.dot(forward)).normalize();
        let down = -up;
        let right = down.cross(forward);
        let f = 0.5 * height as f64 / (0.5 * fov_y).tan();
        Ok(PinholeCamera {
            rotation: [right.to_array(), down.to_array(), forward.to_array()],
            center: eye,
            fx: f,
            fy: f,
            cx: 0.5 * width as f64,
            cy: 0.5 * height as f64,
            width,
            height,
        })
    }

    pub fn forward(&self) -> Vec3 {
        Vec3::from_array(self.rotation[2])
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// World-space ray direction through the center of pixel `(u, v)`, scaled
    /// so its camera-space `z` is 1: `center + depth * dir` is the point at that depth.
    pub fn pixel_direction(&self, u: u32, v: u32) -> Vec3 {
        let cam = Vec3::new(
            (u as f64 + 0.5 - self.cx) / self.fx,
            (v as f64 + 0.5 - self.cy) / self.fy,
            1.0,
        );
        mat_t_vec(&self.rotation, cam)
    }

    pub fn world_to_camera(&self, p: Vec3) -> Vec3 {
        mat_vec(&self.rotation, p - self.center)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn center_pixel_looks_at_target() {
        let cam = PinholeCamera::look_at(Vec3::new(0.0, 0.0, 2.0), Vec3::ZERO, 1.0, 64, 64).unwrap();
        let d = cam.pixel_direction(32, 32);
        // Pixel centers sit half a pixel off the optical axis.
        assert!(d.normalize().dot(-Vec3::Z) > 0.9999);
        assert_relative_eq!(cam.world_to_camera(Vec3::ZERO).z, 2.0);
        assert_relative_eq!(d.dot(cam.forward()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_is_right_handed_and_orthonormal() {
        for eye in [
            Vec3::new(0.0, 3.0, 0.0),
            Vec3::new(1.0, 2.0, -0.5),
            Vec3::new(0.0, -2.0, 0.0),
        ] {
            let cam = PinholeCamera::look_at(eye, Vec3::ZERO, 1.0, 8, 8).unwrap();
            let r = Vec3::from_array(cam.rotation[0]);
            let d = Vec3::from_array(cam.rotation[1]);
            let f = Vec3::from_array(cam.rotation[2]);
            assert_relative_eq!(r.cross(d).dot(f), 1.0, epsilon = 1e-12);
            assert!(r.dot(d).abs() < 1e-12 && r.dot(f).abs() < 1e-12);
        }
    }
}
