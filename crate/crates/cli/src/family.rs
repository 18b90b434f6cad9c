//! Procedural shape families with exact signed distances.

use std::fmt;
use std::str::FromStr;

use sdfforge::geometry::{Aabb, AnalyticShape, TriangleMesh};
use sdfforge::surfacing::{marching_cubes, sample_grid};
use sdfforge::Vec3;

/// MC resolution for ground-truth meshes of curved families.
pub const GT_RESOLUTION: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Axis-aligned boxes whose aspect ratio sweeps with the parameter.
    Boxes,
    /// Origin-centered spheres with a radius sweep.
    Spheres,
    /// Tori around the y axis with major and minor radii sweeping together.
    Tori,
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "boxes" => Ok(FamilyKind::Boxes),
            "spheres" => Ok(FamilyKind::Spheres),
            "tori" => Ok(FamilyKind::Tori),
            other => Err(format!("unknown family {other:?} (expected boxes, spheres or tori)")),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Boxes => "boxes",
            FamilyKind::Spheres => "spheres",
            FamilyKind::Tori => "tori",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub shape_id: String,
    /// Position in the sweep, in [0, 1].
    pub param: f64,
    pub held_out: bool,
    pub shape: AnalyticShape,
}

impl Member {
    /// Ground-truth surface: exact for boxes, dense marching cubes otherwise.
    pub fn gt_mesh(&self) -> sdfforge::Result<TriangleMesh> {
        match &self.shape {
            AnalyticShape::Box { half_extents } => Ok(TriangleMesh::cuboid(*half_extents)),
            shape => {
                let grid = sample_grid(shape, GT_RESOLUTION, Aabb::cube(1.0))?;
                Ok(marching_cubes(&grid, 0.0).to_mesh())
            }
        }
    }

    pub fn descriptor(&self) -> String {
        match &self.shape {
            AnalyticShape::Box { half_extents: h } => format!("box half_extents={},{},{}", h.x, h.y, h.z),
            AnalyticShape::Sphere { center, radius } => {
                format!("sphere center={},{},{} radius={radius}", center.x, center.y, center.z)
            }
            AnalyticShape::Torus { major, minor } => format!("torus major={major} minor={minor}"),
            AnalyticShape::Transformed { .. } => "transformed".into(),
        }
    }
}

/// Training members sit on a uniform grid over [0, 1]; held-out members sit
/// at midpoints between neighbouring training members, spread over the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub kind: FamilyKind,
    pub count: usize,
    pub held_out: usize,
}

impl Family {
    pub fn new(kind: FamilyKind, count: usize, held_out: usize) -> Result<Self, String> {
        if count == 0 {
            return Err("a family needs at least one member".into());
        }
        if held_out > 0 && count < 2 {
            return Err("held-out members need at least two training members".into());
        }
        if held_out >= count.max(2) {
            return Err(format!("held_out ({held_out}) must be smaller than count ({count})"));
        }
        Ok(Family { kind, count, held_out })
    }

    pub fn shape_at(&self, a: f64) -> AnalyticShape {
        let shape = match self.kind {
            FamilyKind::Boxes => AnalyticShape::cuboid(Vec3::new(0.2 + 0.35 * a, 0.45 - 0.15 * a, 0.25 + 0.1 * a)),
            FamilyKind::Spheres => AnalyticShape::sphere(Vec3::ZERO, 0.3 + 0.4 * a),
            FamilyKind::Tori => AnalyticShape::torus(0.45 + 0.15 * a, 0.15 + 0.1 * a),
        };
        shape.expect("family parameters are positive on [0, 1]")
    }

    fn prefix(&self) -> &'static str {
        match self.kind {
            FamilyKind::Boxes => "box",
            FamilyKind::Spheres => "sphere",
            FamilyKind::Tori => "torus",
        }
    }

    pub fn training(&self) -> Vec<Member> {
        let denom = (self.count - 1).max(1) as f64;
        (0..self.count)
            .map(|i| {
                let param = i as f64 / denom;
                Member {
                    shape_id: format!("{}_{i:02}", self.prefix()),
                    param,
                    held_out: false,
                    shape: self.shape_at(param),
                }
            })
            .collect()
    }

    pub fn held_out(&self) -> Vec<Member> {
        let gaps = (self.count - 1) as f64;
        (0..self.held_out)
            .map(|k| {
                let gap = ((k as f64 + 0.5) * gaps / self.held_out as f64).floor();
                let param = (gap + 0.5) / gaps;
                Member {
                    shape_id: format!("{}_test_{k:02}", self.prefix()),
                    param,
                    held_out: true,
                    shape: self.shape_at(param),
                }
            })
            .collect()
    }

    pub fn members(&self) -> Vec<Member> {
        let mut all = self.training();
        all.extend(self.held_out());
        all
    }
}
