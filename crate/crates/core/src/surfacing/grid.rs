use alloc::vec::Vec;

use super::field::{LatentField, ScalarField};
use crate::decoder::{DecoderParams, Real};
use crate::geometry::Aabb;
use crate::{Error, Result, Vec3};

/// Field values at the `(res + 1)^3` corners of a regular lattice; `x`
/// varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    pub resolution: usize,
    pub bounds: Aabb,
    pub values: Vec<f32>,
}

impl VoxelGrid {
    pub fn new(resolution: usize, bounds: Aabb, values: Vec<f32>) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::invalid("grid resolution must be at least 2"));
        }
        let e = bounds.extent();
        if !(e.x > 0.0 && e.y > 0.0 && e.z > 0.0) {
            return Err(Error::DegenerateGeometry("grid bounds have no volume"));
        }
        let n = resolution + 1;
        if values.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        Ok(VoxelGrid {
            resolution,
            bounds,
            values,
        })
    }

    /// Corners per axis.
    pub fn side(&self) -> usize {
        self.resolution + 1
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.side();
        i + n * (j + n * k)
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f32 {
        self.values[self.index(i, j, k)]
    }

    pub fn cell_size(&self) -> Vec3 {
        self.bounds.extent() * (1.0 / self.resolution as f64)
    }

    #[inline]
    pub fn corner(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let c = self.cell_size();
        self.bounds.min + Vec3::new(i as f64 * c.x, j as f64 * c.y, k as f64 * c.z)
    }

    /// All corner positions in storage order.
    pub fn corners(&self) -> Vec<Vec3> {
        let n = self.side();
        let mut out = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    out.push(self.corner(i, j, k));
                }
            }
        }
        out
    }

    /// Finite-difference gradient at a corner (one-sided on the boundary).
    pub fn corner_gradient(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let n = self.side();
        let c = self.cell_size();
        let axis = |lo: (usize, usize, usize), hi: (usize, usize, usize), h: f64| {
            (self.value(hi.0, hi.1, hi.2) as f64 - self.value(lo.0, lo.1, lo.2) as f64) / h
        };
        let span = |x: usize| {
            let lo = x.saturating_sub(1);
            let hi = (x + 1).min(n - 1);
            (lo, hi, (hi - lo) as f64)
        };
        let (xl, xh, sx) = span(i);
        let (yl, yh, sy) = span(j);
        let (zl, zh, sz) = span(k);
        Vec3::new(
            axis((xl, j, k), (xh, j, k), sx * c.x),
            axis((i, yl, k), (i, yh, k), sy * c.y),
            axis((i, j, zl), (i, j, zh), sz * c.z),
        )
    }
}

/// Samples any field on the lattice.
pub fn sample_grid<F: ScalarField + ?Sized>(field: &F, resolution: usize, bounds: Aabb) -> Result<VoxelGrid> {
    if resolution < 2 {
        return Err(Error::invalid("grid resolution must be at least 2"));
    }
    let n = resolution + 1;
    let shell = VoxelGrid {
        resolution,
        bounds,
        values: Vec::new(),
    };
    let values: Vec<f32> = field.values(&shell.corners()).into_iter().map(|v| v as f32).collect();
    debug_assert_eq!(values.len(), n * n * n);
    VoxelGrid::new(resolution, bounds, values)
}

/// Decoder values `f(z, corner)` on the lattice, eval mode.
pub fn evaluate_grid<T: Real>(
    params: &DecoderParams<T>,
    z: &[f32],
    resolution: usize,
    bounds: Aabb,
) -> Result<VoxelGrid> {
    sample_grid(&LatentField::new(params, z)?, resolution, bounds)
}
