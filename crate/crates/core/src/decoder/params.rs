use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{LayerShape, NetConfig};
use super::real::Real;
use crate::{Error, Result};

static NEXT_STAMP: AtomicUsize = AtomicUsize::new(1);

fn fresh_stamp() -> usize {
    NEXT_STAMP.fetch_add(1, Ordering::Relaxed)
}

/// Variance gain of the output layer. Small, so initial predictions start
/// inside the clamp band where the loss has a gradient.
const OUTPUT_GAIN: f64 = 1e-2;

/// Weight-normalized decoder parameters.
///
/// Every layer stores a direction matrix `v`, per-row gains `g` and biases
/// `b`; the effective weight row is `g * v / |v|`. All values live in one
/// flat vector (see [`LayerShape`]) so optimizers can treat them uniformly.
#[derive(Debug, Clone)]
pub struct DecoderParams<T: Real> {
    config: NetConfig,
    layers: Vec<LayerShape>,
    data: Vec<T>,
    /// Changes whenever `data` may have changed; ties forward tapes to a parameter state.
    stamp: usize,
}

impl<T: Real> PartialEq for DecoderParams<T> {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.data == other.data
    }
}

impl<T: Real> DecoderParams<T> {
    /// Fan-in scaled Gaussian directions (He scaling for ReLU layers, a small
    /// gain for the output layer), gains
    /// equal to the row norms so the initial effective weights equal `v`, zero biases.
    pub fn init(config: &NetConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let layers = config.layer_shapes();
        let mut data = alloc::vec![T::zero(); layers.iter().map(|l| l.param_count()).sum()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let last = layers.len() - 1;
        for (li, shape) in layers.iter().enumerate() {
            let gain = if li == last { OUTPUT_GAIN } else { 2.0 };
            let std = num_traits::Float::sqrt(gain / shape.in_dim as f64);
            for row in 0..shape.out_dim {
                let mut sq = 0.0;
                for col in 0..shape.in_dim {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    let x = T::of(x * std);
                    sq += x.f64() * x.f64();
                    data[shape.offset + row * shape.in_dim + col] = x;
                }
                data[shape.g_range().start + row] = T::of(num_traits::Float::sqrt(sq));
            }
        }
        Ok(DecoderParams {
            config: config.clone(),
            layers,
            data,
            stamp: fresh_stamp(),
        })
    }

    /// Wraps an existing flat parameter vector.
    pub fn from_flat(config: &NetConfig, data: Vec<T>) -> Result<Self> {
        config.validate()?;
        let layers = config.layer_shapes();
        let expected: usize = layers.iter().map(|l| l.param_count()).sum();
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(DecoderParams {
            config: config.clone(),
            layers,
            data,
            stamp: fresh_stamp(),
        })
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn layers(&self) -> &[LayerShape] {
        &self.layers
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Mutable access to the flat parameters; invalidates outstanding tapes.
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        self.stamp = fresh_stamp();
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub(crate) fn stamp(&self) -> usize {
        self.stamp
    }

    /// Same parameters in another precision.
    pub fn cast<U: Real>(&self) -> DecoderParams<U> {
        DecoderParams {
            config: self.config.clone(),
            layers: self.layers.clone(),
            data: self.data.iter().map(|v| U::of(v.f64())).collect(),
            stamp: fresh_stamp(),
        }
    }

    /// Order-sensitive FNV-1a hash of the parameter bits.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for v in &self.data {
            for byte in v.f64().to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }

    /// Effective weight row `g * v / |v|` of one layer; zero when `|v| = 0`.
    pub fn effective_row(&self, layer: usize, row: usize) -> Vec<T> {
        let s = &self.layers[layer];
        let v = &self.data[s.offset + row * s.in_dim..s.offset + (row + 1) * s.in_dim];
        let g = self.data[s.g_range().start + row];
        let inv = inv_norm(v);
        v.iter().map(|&x| x * g * inv).collect()
    }
}

pub(crate) fn inv_norm<T: Real>(v: &[T]) -> T {
    let sq = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
    if sq > T::zero() {
        T::one() / sq.sqrt()
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_params() {
        let cfg = NetConfig::new(8, 32, 4, &[2]);
        let a = DecoderParams::<f32>::init(&cfg, 9).unwrap();
        let b = DecoderParams::<f32>::init(&cfg, 9).unwrap();
        let c = DecoderParams::<f32>::init(&cfg, 10).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a.as_slice(), c.as_slice());
        assert_eq!(a.checksum(), b.checksum());
    }

    #[test]
    fn initial_gain_equals_row_norm() {
        let cfg = NetConfig::new(4, 16, 3, &[]);
        let p = DecoderParams::<f64>::init(&cfg, 1).unwrap();
        let s = p.layers()[1];
        for row in 0..s.out_dim {
            let v = &p.as_slice()[s.offset + row * s.in_dim..s.offset + (row + 1) * s.in_dim];
            let eff = p.effective_row(1, row);
            for (a, b) in v.iter().zip(&eff) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(p.as_slice()[s.b_range()].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn flat_length_is_checked() {
        let cfg = NetConfig::new(2, 8, 2, &[]);
        assert!(DecoderParams::<f32>::from_flat(&cfg, alloc::vec![0.0; 3]).is_err());
        let n = cfg.param_count();
        assert_eq!(
            DecoderParams::<f32>::from_flat(&cfg, alloc::vec![0.0; n])
                .unwrap()
                .len(),
            n
        );
    }
}
