use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::sampling::{DepthMap, SdfSample};
use crate::{Error, Result, Vec3};

/// SDF samples straddling observed surface points plus points known to be
/// in free space (SDF >= 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PartialObservation {
    pub sdf_samples: Vec<SdfSample>,
    pub free_points: Vec<Vec3>,
    pub eta: f64,
}

/// Per hit pixel: samples at `p + eta n` (sdf `+eta`) and `p - eta n`
/// (sdf `-eta`), plus `free_points_per_ray` points drawn uniformly along the
/// camera ray between 5% and 95% of the measured depth.
pub fn depth_to_observation(
    map: &DepthMap,
    eta: f64,
    free_points_per_ray: usize,
    seed: u64,
) -> Result<PartialObservation> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::invalid("eta must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sdf_samples = Vec::new();
    let mut free_points = Vec::new();
    for i in map.hits() {
        let p = map.point(i);
        let n = map.normals[i];
        sdf_samples.push(SdfSample::new(p + n * eta, eta));
        sdf_samples.push(SdfSample::new(p - n * eta, -eta));
        let dir = map.ray_direction(i);
        let d = map.depth[i];
        for _ in 0..free_points_per_ray {
            let t = rng.random_range(0.05 * d..0.95 * d);
            free_points.push(map.camera.center + dir * t);
        }
    }
    if sdf_samples.is_empty() {
        return Err(Error::EmptyObservation);
    }
    Ok(PartialObservation {
        sdf_samples,
        free_points,
        eta,
    })
}

/// Inverse-depth Gaussian noise: `D' = 1 / (1/D + N(0, alpha^2))` for every
/// hit pixel. Draws that would give a non-positive inverse depth are redrawn.
pub fn perturb_depth(map: &DepthMap, alpha: f64, seed: u64) -> Result<DepthMap> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid("alpha must be finite and non-negative"));
    }
    let mut out = map.clone();
    if alpha == 0.0 {
        return Ok(out);
    }
    let noise = Normal::new(0.0, alpha).map_err(|_| Error::invalid("invalid noise level"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in out.depth.iter_mut().filter(|d| **d > 0.0) {
        let inv = 1.0 / *d;
        *d = loop {
            let v = inv + noise.sample(&mut rng);
            if v > 0.0 {
                break 1.0 / v;
            }
        };
    }
    Ok(out)
}
