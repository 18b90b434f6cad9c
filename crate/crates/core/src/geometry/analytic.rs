use alloc::boxed::Box;

#[allow(unused_imports)] // sqrt and friends without std
use num_traits::Float;

use super::vec::{mat_t_vec, Mat3};
use crate::{Error, Result, Vec3};

/// Closed-form shapes with exact metric signed distance.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticShape {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    /// Axis-aligned box centered at the origin.
    Box {
        half_extents: Vec3,
    },
    /// Torus around the y axis, centered at the origin.
    Torus {
        major: f64,
        minor: f64,
    },
    /// `child` rotated by `rotation`, uniformly scaled by `scale`, then translated.
    Transformed {
        child: Box<AnalyticShape>,
        rotation: Mat3,
        translation: Vec3,
        scale: f64,
    },
}

impl AnalyticShape {
    pub fn sphere(center: Vec3, radius: f64) -> Result<Self> {
        positive(radius, "sphere radius")?;
        Ok(AnalyticShape::Sphere { center, radius })
    }

    pub fn cuboid(half_extents: Vec3) -> Result<Self> {
        positive(half_extents.x, "box half extent")?;
        positive(half_extents.y, "box half extent")?;
        positive(half_extents.z, "box half extent")?;
        Ok(AnalyticShape::Box { half_extents })
    }

    pub fn torus(major: f64, minor: f64) -> Result<Self> {
        positive(major, "torus major radius")?;
        positive(minor, "torus minor radius")?;
        Ok(AnalyticShape::Torus { major, minor })
    }

    /// Wraps `self` in a rigid transform with uniform scale. `rotation` must be orthonormal.
    pub fn transformed(self, rotation: Mat3, translation: Vec3, scale: f64) -> Result<Self> {
        positive(scale, "scale")?;
        Ok(AnalyticShape::Transformed {
            child: Box::new(self),
            rotation,
            translation,
            scale,
        })
    }

    /// Exact signed distance, negative inside.
    pub fn sdf(&self, p: Vec3) -> f64 {
        match self {
            AnalyticShape::Sphere { center, radius } => p.distance(*center) - radius,
            AnalyticShape::Box { half_extents } => {
                let q = p.abs() - *half_extents;
                q.max(Vec3::ZERO).norm() + q.max_element().min(0.0)
            }
            AnalyticShape::Torus { major, minor } => {
                let ring = (p.x * p.x + p.z * p.z).sqrt() - major;
                (ring * ring + p.y * p.y).sqrt() - minor
            }
            AnalyticShape::Transformed {
                child,
                rotation,
                translation,
                scale,
            } => {
                let local = mat_t_vec(rotation, p - *translation) / *scale;
                child.sdf(local) * scale
            }
        }
    }
}

fn positive(v: f64, what: &'static str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!("{what} must be positive, got {v}")))
    }
}
