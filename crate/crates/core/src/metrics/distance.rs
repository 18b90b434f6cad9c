use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exec;
use crate::geometry::{KdTree3, TriangleBvh, TriangleMesh};
use crate::{Error, Result, Vec3};
#[allow(unused_imports)] // sqrt and friends without std
use num_traits::Float;

/// A point with an optional unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSample {
    pub position: Vec3,
    pub normal: Option<Vec3>,
}

/// `n` area-weighted surface samples with face normals.
pub fn sample_points(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<Vec<PointSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(mesh
        .sample_surface(n, &mut rng)?
        .into_iter()
        .map(|p| PointSample {
            position: p.position,
            normal: Some(p.normal),
        })
        .collect())
}

fn mean_nearest_squared(from: &[Vec3], to: &[Vec3]) -> f64 {
    let tree = KdTree3::new(to);
    let d = exec::map_range(from.len(), |i| {
        tree.nearest(from[i]).expect("non-empty tree").distance_squared
    });
    d.iter().sum::<f64>() / from.len() as f64
}

/// Symmetric Chamfer distance: mean squared nearest-neighbour distance from
/// `a` to `b` plus the same from `b` to `a`.
pub fn chamfer(a: &[Vec3], b: &[Vec3]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("point set"));
    }
    Ok(mean_nearest_squared(a, b) + mean_nearest_squared(b, a))
}

/// Exact distance from every point to the closest point on any face of `mesh`.
pub fn point_mesh_distances(points: &[Vec3], mesh: &TriangleMesh) -> Result<Vec<f64>> {
    if mesh.is_empty() {
        return Err(Error::EmptyInput("mesh"));
    }
    let bvh = TriangleBvh::new(mesh);
    Ok(exec::map_range(points.len(), |i| {
        bvh.closest(points[i]).expect("non-empty mesh").distance
    }))
}

/// Nearest-rank percentile (`ceil(p * n)`-th smallest) of point-to-mesh distances.
pub fn mesh_accuracy_percentile(points: &[Vec3], gt: &TriangleMesh, percentile: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("points"));
    }
    if !(percentile > 0.0 && percentile <= 1.0) {
        return Err(Error::invalid("percentile must lie in (0, 1]"));
    }
    let mut d = point_mesh_distances(points, gt)?;
    d.sort_by(f64::total_cmp);
    let rank = ((percentile * d.len() as f64).ceil() as usize).clamp(1, d.len());
    Ok(d[rank - 1])
}

/// Distance within which 90% of the generated points lie from the ground truth mesh.
pub fn mesh_accuracy(points: &[Vec3], gt: &TriangleMesh) -> Result<f64> {
    mesh_accuracy_percentile(points, gt, 0.9)
}

/// Fraction of ground-truth points within `delta` of the generated mesh.
/// An empty generated mesh completes nothing.
pub fn mesh_completion(generated: &TriangleMesh, gt_points: &[Vec3], delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    if gt_points.is_empty() {
        return Err(Error::EmptyInput("ground truth points"));
    }
    if generated.is_empty() {
        log::warn!("mesh completion against an empty mesh is 0");
        return Ok(0.0);
    }
    let d = point_mesh_distances(gt_points, generated)?;
    Ok(d.iter().filter(|&&x| x <= delta).count() as f64 / d.len() as f64)
}

/// Mean of `|n_face . n_point|` between each ground-truth normal and the
/// normal of the closest generated face. Insensitive to face orientation.
pub fn cosine_similarity(generated: &TriangleMesh, gt: &[PointSample]) -> Result<f64> {
    if gt.is_empty() {
        return Err(Error::EmptyInput("ground truth points"));
    }
    if generated.is_empty() {
        return Err(Error::EmptyInput("mesh"));
    }
    let normals: Vec<Vec3> = gt
        .iter()
        .map(|p| p.normal.ok_or(Error::invalid("ground truth points need normals")))
        .collect::<Result<_>>()?;
    let faces = generated.face_normals();
    let bvh = TriangleBvh::new(generated);
    let sims = exec::map_range(gt.len(), |i| {
        let hit = bvh.closest(gt[i].position).expect("non-empty mesh");
        faces[hit.triangle].dot(normals[i]).abs()
    });
    Ok(sims.iter().sum::<f64>() / sims.len() as f64)
}
