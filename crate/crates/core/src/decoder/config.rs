use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Architecture of the decoder `f(z, x)`.
///
/// Layers are numbered from 1; layer `n_layers` is the scalar output layer.
/// A layer index `k` in `skip_layers` makes layer `k` narrower by
/// `latent_dim + 3` units and feeds `[output_k, z, x]` into layer `k + 1`, so
/// that layer still sees `hidden_width` inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct NetConfig {
    pub latent_dim: usize,
    pub hidden_width: usize,
    pub n_layers: usize,
    pub skip_layers: Vec<usize>,
    pub dropout_rate: f64,
}

impl Default for NetConfig {
    /// Eight 512-wide layers with the latent skip into layer 5.
    fn default() -> Self {
        NetConfig {
            latent_dim: 256,
            hidden_width: 512,
            n_layers: 8,
            skip_layers: alloc::vec![4],
            dropout_rate: 0.2,
        }
    }
}

/// Input/output widths of one fully connected layer and where its
/// parameters live in the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerShape {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Offset of `v` (row-major `out_dim x in_dim`), followed by `g` and `b`.
    pub offset: usize,
    /// The layer input is `[previous output, network input]`.
    pub takes_skip: bool,
}

impl LayerShape {
    pub fn v_range(&self) -> core::ops::Range<usize> {
        self.offset..self.offset + self.out_dim * self.in_dim
    }

    pub fn g_range(&self) -> core::ops::Range<usize> {
        let s = self.offset + self.out_dim * self.in_dim;
        s..s + self.out_dim
    }

    pub fn b_range(&self) -> core::ops::Range<usize> {
        let s = self.offset + self.out_dim * (self.in_dim + 1);
        s..s + self.out_dim
    }

    pub fn param_count(&self) -> usize {
        self.out_dim * (self.in_dim + 2)
    }
}

impl NetConfig {
    /// Convenience constructor without dropout.
    pub fn new(latent_dim: usize, hidden_width: usize, n_layers: usize, skip_layers: &[usize]) -> Self {
        NetConfig {
            latent_dim,
            hidden_width,
            n_layers,
            skip_layers: skip_layers.to_vec(),
            dropout_rate: 0.0,
        }
    }

    /// Width of the network input `[z, x]`.
    pub fn input_dim(&self) -> usize {
        self.latent_dim + 3
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_layers == 0 {
            return Err(Error::invalid("n_layers must be at least 1"));
        }
        if self.n_layers > 1 && self.hidden_width == 0 {
            return Err(Error::invalid("hidden_width must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::invalid(format!(
                "dropout_rate must be in [0, 1), got {}",
                self.dropout_rate
            )));
        }
        for (i, &k) in self.skip_layers.iter().enumerate() {
            if k <= 1 || k >= self.n_layers {
                return Err(Error::invalid(format!("skip layer {k} outside (1, {})", self.n_layers)));
            }
            if self.skip_layers[..i].contains(&k) {
                return Err(Error::invalid(format!("skip layer {k} listed twice")));
            }
        }
        if !self.skip_layers.is_empty() && self.hidden_width <= self.input_dim() {
            return Err(Error::invalid(format!(
                "hidden_width {} must exceed latent_dim + 3 = {} when skips are used",
                self.hidden_width,
                self.input_dim()
            )));
        }
        Ok(())
    }

    fn is_skip(&self, layer: usize) -> bool {
        self.skip_layers.contains(&layer)
    }

    /// Shapes of all layers in order. Assumes a validated config.
    pub fn layer_shapes(&self) -> Vec<LayerShape> {
        let d = self.input_dim();
        let mut shapes = Vec::with_capacity(self.n_layers);
        let mut offset = 0;
        let mut in_dim = d;
        let mut takes_skip = false;
        for layer in 1..=self.n_layers {
            let out_dim = if layer == self.n_layers {
                1
            } else if self.is_skip(layer) {
                self.hidden_width - d
            } else {
                self.hidden_width
            };
            let shape = LayerShape {
                in_dim,
                out_dim,
                offset,
                takes_skip,
            };
            offset += shape.param_count();
            shapes.push(shape);
            takes_skip = self.is_skip(layer);
            in_dim = out_dim + if takes_skip { d } else { 0 };
        }
        shapes
    }

    pub fn param_count(&self) -> usize {
        self.layer_shapes().iter().map(|s| s.param_count()).sum()
    }
}
