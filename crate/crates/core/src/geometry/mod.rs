//! Geometric primitives, exact distance oracles and spatial indices.

mod analytic;
mod bvh;
mod camera;
mod kdtree;
mod lattice;
mod mesh;
mod triangle;
mod vec;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub use analytic::AnalyticShape;
pub use bvh::{ClosestHit, RayHit, TriangleBvh};
pub use camera::PinholeCamera;
pub use kdtree::{KdTree3, Neighbor};
pub use lattice::fibonacci_sphere;
pub use mesh::{normalize_to_unit_sphere, Normalization, TriangleMesh, UNIT_SPHERE_FIT};
pub use triangle::{closest_point, point_triangle_distance, ray_intersect, Triangle};
pub use vec::{Aabb, Mat3, Point3, Vec3};

/// Surface point with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedPoint {
    pub position: Vec3,
    pub normal: Vec3,
}

/// Anything that can report a signed distance, negative inside.
pub trait SignedDistance {
    fn signed_distance(&self, q: Vec3) -> f64;
}

impl SignedDistance for AnalyticShape {
    fn signed_distance(&self, q: Vec3) -> f64 {
        self.sdf(q)
    }
}

/// Signed distance to an oriented point cloud: magnitude is the distance to
/// the nearest point, sign follows the nearest point's normal.
#[derive(Debug, Clone)]
pub struct ShellOracle {
    points: Vec<OrientedPoint>,
    tree: KdTree3,
}

impl ShellOracle {
    pub fn new(points: Vec<OrientedPoint>) -> crate::Result<Self> {
        if points.is_empty() {
            return Err(crate::Error::EmptyShell);
        }
        let positions: Vec<Vec3> = points.iter().map(|p| p.position).collect();
        Ok(ShellOracle {
            tree: KdTree3::new(&positions),
            points,
        })
    }

    pub fn points(&self) -> &[OrientedPoint] {
        &self.points
    }
}

impl SignedDistance for ShellOracle {
    fn signed_distance(&self, q: Vec3) -> f64 {
        let nn = self.tree.nearest(q).expect("non-empty shell");
        let p = &self.points[nn.index];
        let d = nn.distance_squared.sqrt();
        if p.normal.dot(q - p.position) < 0.0 {
            -d
        } else {
            d
        }
    }
}

/// Signed distance to `surface` at `q`.
pub fn signed_distance_oracle<S: SignedDistance + ?Sized>(surface: &S, q: Vec3) -> f64 {
    surface.signed_distance(q)
}
