//! Turning a latent-conditioned SDF into geometry and pictures: voxel grid
//! evaluation, marching cubes, sphere tracing and shaded rendering.

mod field;
mod grid;
mod mc;
mod render;
mod tables;
mod trace;

pub use field::{LatentField, ScalarField};
pub use grid::{evaluate_grid, sample_grid, VoxelGrid};
pub use mc::{extract_mesh, marching_cubes, IsoMesh};
pub use render::{render, render_field, Image, RenderConfig};
pub use trace::{sphere_trace, sphere_trace_batch, trace_field, TraceConfig, TraceHit, TRACE_BOUNDS};

use alloc::vec::Vec;

use crate::{Error, Result};

/// `(1 - t) a + t b`.
pub fn interpolate_latents(a: &[f32], b: &[f32], t: f64) -> Result<Vec<f32>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid("interpolation parameter must lie in [0, 1]"));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| ((1.0 - t) * x as f64 + t * y as f64) as f32)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_endpoints_and_midpoint() {
        let a = [1.0, -2.0, 0.5];
        let b = [-1.0, 2.0, -0.5];
        assert_eq!(interpolate_latents(&a, &b, 0.0).unwrap(), a);
        assert_eq!(interpolate_latents(&a, &b, 1.0).unwrap(), b);
        assert_eq!(interpolate_latents(&a, &b, 0.5).unwrap(), [0.0, 0.0, 0.0]);
        assert!(interpolate_latents(&a, &b[..2], 0.5).is_err());
        assert!(interpolate_latents(&a, &b, 1.5).is_err());
    }
}
