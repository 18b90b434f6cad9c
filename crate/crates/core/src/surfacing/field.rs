use alloc::vec::Vec;

use crate::decoder::{assemble_inputs, DecoderParams, Network, Real};
use crate::exec;
use crate::geometry::AnalyticShape;
use crate::{Error, Result, Vec3};

/// Points evaluated per decoder call.
const CHUNK: usize = 4096;

/// A scalar field that can be evaluated in batches.
pub trait ScalarField: Sync {
    fn values(&self, points: &[Vec3]) -> Vec<f64>;

    /// Spatial gradients at `points`.
    fn gradients(&self, points: &[Vec3]) -> Vec<Vec3>;
}

/// The decoder with a fixed latent code, evaluated in eval mode.
#[derive(Debug, Clone)]
pub struct LatentField<'p, T: Real> {
    net: Network<'p, T>,
    z: Vec<T>,
}

impl<'p, T: Real> LatentField<'p, T> {
    pub fn new(params: &'p DecoderParams<T>, z: &[f32]) -> Result<Self> {
        let dim = params.config().latent_dim;
        if z.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: z.len(),
            });
        }
        Ok(LatentField {
            net: Network::new(params),
            z: z.iter().map(|&v| T::of(v as f64)).collect(),
        })
    }

    fn rows(&self, points: &[Vec3]) -> Vec<T> {
        let pts: Vec<[T; 3]> = points.iter().map(|p| p.to_array().map(T::of)).collect();
        assemble_inputs(&self.z, &pts)
    }
}

impl<T: Real> ScalarField for LatentField<'_, T> {
    fn values(&self, points: &[Vec3]) -> Vec<f64> {
        let ranges = exec::chunks(points.len(), CHUNK);
        exec::map_range(ranges.len(), |c| {
            let out = self
                .net
                .evaluate(&self.rows(&points[ranges[c].clone()]))
                .expect("rows match the network input width");
            out.into_iter().map(|v| v.f64()).collect::<Vec<_>>()
        })
        .concat()
    }

    fn gradients(&self, points: &[Vec3]) -> Vec<Vec3> {
        let ranges = exec::chunks(points.len(), CHUNK);
        exec::map_range(ranges.len(), |c| {
            self.net
                .spatial_gradients(&self.rows(&points[ranges[c].clone()]))
                .expect("rows match the network input width")
                .into_iter()
                .map(|g| Vec3::new(g[0].f64(), g[1].f64(), g[2].f64()))
                .collect::<Vec<_>>()
        })
        .concat()
    }
}

impl ScalarField for AnalyticShape {
    fn values(&self, points: &[Vec3]) -> Vec<f64> {
        points.iter().map(|&p| self.sdf(p)).collect()
    }

    /// Central differences with step 1e-6.
    fn gradients(&self, points: &[Vec3]) -> Vec<Vec3> {
        let h = 1e-6;
        points
            .iter()
            .map(|&p| {
                let d = |e: Vec3| (self.sdf(p + e * h) - self.sdf(p - e * h)) / (2.0 * h);
                Vec3::new(d(Vec3::X), d(Vec3::Y), d(Vec3::Z))
            })
            .collect()
    }
}
