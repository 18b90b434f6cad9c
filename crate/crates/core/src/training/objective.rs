//! Chunked evaluation of per-sample losses and their gradients.
//!
//! Work is split into fixed-size chunks and reduced in chunk order, so
//! results do not depend on the number of worker threads.

use alloc::vec::Vec;

use super::loss::{clamped_l1, clamped_l1_grad};
use crate::decoder::{assemble_inputs, DecoderParams, Mode, Network, Real};
use crate::exec;
use crate::sampling::SdfSample;
use crate::{Error, Result};

/// Samples per forward/backward chunk.
pub(crate) const CHUNK: usize = 1024;
/// Chunks evaluated concurrently before their gradients are folded in.
const GROUP: usize = 16;

/// The latent code and query points of one shape in a step.
pub(crate) struct ShapeQuery<'a, T: Real> {
    pub z: &'a [T],
    pub points: &'a [[T; 3]],
}

/// Summed losses and gradients of one step.
pub(crate) struct StepGrads<T: Real> {
    pub loss: Vec<f64>,
    pub latent: Vec<Vec<T>>,
    /// Empty unless parameter gradients were requested.
    pub params: Vec<T>,
}

/// Evaluates `loss(shape, index, prediction) -> (value, d value / d prediction)`
/// for every query point and backpropagates it. Dropout masks, when
/// `train_seed` is given, depend only on the seed, shape and chunk.
pub(crate) fn accumulate<T, L>(
    net: &Network<'_, T>,
    shapes: &[ShapeQuery<'_, T>],
    train_seed: Option<u64>,
    with_params: bool,
    loss: L,
) -> Result<StepGrads<T>>
where
    T: Real,
    L: Fn(usize, usize, f64) -> (f64, f64) + Sync,
{
    let dim = net.params().config().latent_dim;
    let mut jobs = Vec::new();
    for (s, q) in shapes.iter().enumerate() {
        if q.z.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: q.z.len(),
            });
        }
        for (c, range) in exec::chunks(q.points.len(), CHUNK).into_iter().enumerate() {
            jobs.push((s, c, range));
        }
    }
    let mut out = StepGrads {
        loss: alloc::vec![0.0; shapes.len()],
        latent: alloc::vec![alloc::vec![T::zero(); dim]; shapes.len()],
        params: if with_params {
            alloc::vec![T::zero(); net.params().len()]
        } else {
            Vec::new()
        },
    };
    for group in jobs.chunks(GROUP) {
        let results = exec::map_range(group.len(), |k| -> Result<_> {
            let (s, c, ref range) = group[k];
            let q = &shapes[s];
            let inputs = assemble_inputs(q.z, &q.points[range.clone()]);
            let mode = match train_seed {
                Some(seed) => Mode::Train {
                    mask_seed: exec::derive_seed(seed, s as u64, c as u64),
                },
                None => Mode::Eval,
            };
            let (pred, tape) = net.forward(&inputs, mode)?;
            let mut total = 0.0;
            let upstream: Vec<T> = pred
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let (l, g) = loss(s, range.start + i, p.f64());
                    total += l;
                    T::of(g)
                })
                .collect();
            let grads = net.backward(&tape, &upstream, with_params)?;
            let mut latent = alloc::vec![T::zero(); dim];
            for i in 0..pred.len() {
                for (a, &g) in latent.iter_mut().zip(grads.latent(i)) {
                    *a += g;
                }
            }
            Ok((s, total, latent, grads.params))
        });
        for r in results {
            let (s, total, latent, params) = r?;
            out.loss[s] += total;
            for (a, g) in out.latent[s].iter_mut().zip(latent) {
                *a += g;
            }
            for (a, g) in out.params.iter_mut().zip(params) {
                *a += g;
            }
        }
    }
    Ok(out)
}

pub(crate) fn sample_points<T: Real>(samples: &[SdfSample]) -> Vec<[T; 3]> {
    samples.iter().map(|s| s.position.map(|v| T::of(v as f64))).collect()
}

/// Mean clamped-L1 loss of `samples` under code `z` plus `lambda * |z|^2`,
/// and its gradient with respect to `z` (eval mode, parameters fixed).
pub fn latent_objective<T: Real>(
    params: &DecoderParams<T>,
    z: &[T],
    samples: &[SdfSample],
    delta: f64,
    lambda: f64,
) -> Result<(f64, Vec<T>)> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let net = Network::new(params);
    let points = sample_points::<T>(samples);
    let w = 1.0 / samples.len() as f64;
    let g = accumulate(&net, &[ShapeQuery { z, points: &points }], None, false, |_, j, p| {
        let s = samples[j].sdf as f64;
        (clamped_l1(p, s, delta) * w, clamped_l1_grad(p, s, delta) * w)
    })?;
    let norm2: f64 = z.iter().map(|v| v.f64() * v.f64()).sum();
    let grad = g.latent[0]
        .iter()
        .zip(z)
        .map(|(&a, &zi)| a + T::of(2.0 * lambda * zi.f64()))
        .collect();
    Ok((g.loss[0] + lambda * norm2, grad))
}
