//! Batched forward and reverse-mode evaluation of the decoder.
//!
//! Activations are row-major `batch x width` matrices. Layers after a skip
//! read `[previous activation, network input]` without materializing the
//! concatenation: the two halves of the weight matrix are applied by two
//! GEMMs into the same output.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::LayerShape;
use super::params::{inv_norm, DecoderParams};
use super::real::Real;
use crate::{Error, Result};

/// Dropout behaviour of a forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Deterministic; hidden activations are scaled by `1 - dropout_rate`.
    Eval,
    /// Each hidden unit is zeroed with probability `dropout_rate` (no rescaling);
    /// masks are drawn from `mask_seed`.
    Train { mask_seed: u64 },
}

/// Everything reverse mode needs from one forward evaluation.
#[derive(Debug, Clone)]
pub struct ForwardTape<T: Real> {
    stamp: usize,
    batch: usize,
    inputs: Vec<T>,
    /// Post-ReLU, post-dropout activations of the hidden layers. A unit
    /// carries gradient exactly when its activation is positive.
    hidden: Vec<Vec<T>>,
    outputs: Vec<T>,
    /// Multiplier applied after ReLU (1 in train mode, `1 - rate` in eval mode).
    act_scale: T,
}

impl<T: Real> ForwardTape<T> {
    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn outputs(&self) -> &[T] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[T] {
        &self.inputs
    }

    /// Whether each hidden unit passed gradient, layer by layer and row-major.
    pub fn active_units(&self) -> impl Iterator<Item = bool> + '_ {
        self.hidden.iter().flatten().map(|&a| a > T::zero())
    }
}

/// Gradients of `sum_i upstream_i * f(input_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T: Real> {
    /// Same layout as [`DecoderParams::as_slice`]; empty when not requested.
    pub params: Vec<T>,
    /// Row-major `batch x (latent_dim + 3)`, matching the input layout.
    pub inputs: Vec<T>,
    input_dim: usize,
}

impl<T: Real> Gradients<T> {
    /// Gradient with respect to the latent code of sample `i`.
    pub fn latent(&self, i: usize) -> &[T] {
        let row = &self.inputs[i * self.input_dim..(i + 1) * self.input_dim];
        &row[..self.input_dim - 3]
    }

    /// Gradient with respect to the query point of sample `i`.
    pub fn spatial(&self, i: usize) -> [T; 3] {
        let row = &self.inputs[(i + 1) * self.input_dim - 3..(i + 1) * self.input_dim];
        [row[0], row[1], row[2]]
    }
}

/// Decoder with effective (weight-normalized) weights materialized for evaluation.
#[derive(Debug, Clone)]
pub struct Network<'p, T: Real> {
    params: &'p DecoderParams<T>,
    /// Effective weights, one `out x in` block per layer at the `v` offsets
    /// relative to `weight_offsets`.
    weights: Vec<T>,
    weight_offsets: Vec<usize>,
    /// `1 / |v_row|` for every row of every layer, concatenated.
    inv_norms: Vec<T>,
    dropout: T,
}

impl<'p, T: Real> Network<'p, T> {
    pub fn new(params: &'p DecoderParams<T>) -> Self {
        let data = params.as_slice();
        let mut weights = Vec::new();
        let mut weight_offsets = Vec::with_capacity(params.layers().len());
        let mut inv_norms = Vec::new();
        for s in params.layers() {
            weight_offsets.push(weights.len());
            let g = &data[s.g_range()];
            for row in 0..s.out_dim {
                let v = &data[s.offset + row * s.in_dim..s.offset + (row + 1) * s.in_dim];
                let inv = inv_norm(v);
                inv_norms.push(inv);
                let scale = g[row] * inv;
                weights.extend(v.iter().map(|&x| x * scale));
            }
        }
        Network {
            params,
            weights,
            weight_offsets,
            inv_norms,
            dropout: T::of(params.config().dropout_rate),
        }
    }

    pub fn params(&self) -> &'p DecoderParams<T> {
        self.params
    }

    pub fn input_dim(&self) -> usize {
        self.params.config().input_dim()
    }

    fn weight(&self, layer: usize) -> &[T] {
        let s = &self.params.layers()[layer];
        let o = self.weight_offsets[layer];
        &self.weights[o..o + s.out_dim * s.in_dim]
    }

    fn check_inputs(&self, inputs: &[T]) -> Result<usize> {
        let d = self.input_dim();
        if !inputs.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: inputs.len() % d,
            });
        }
        Ok(inputs.len() / d)
    }

    /// `pre = [prev, inputs] * W^T + b` for one layer.
    fn affine(&self, layer: usize, prev: &[T], inputs: &[T], batch: usize) -> Vec<T> {
        let shapes = self.params.layers();
        let s: &LayerShape = &shapes[layer];
        let d = self.input_dim();
        let w = self.weight(layer);
        let bias = &self.params.as_slice()[s.b_range()];
        let mut pre = Vec::with_capacity(batch * s.out_dim);
        for _ in 0..batch {
            pre.extend_from_slice(bias);
        }
        let prev_width = if s.takes_skip { s.in_dim - d } else { s.in_dim };
        T::gemm(
            batch,
            prev_width,
            s.out_dim,
            T::one(),
            prev,
            prev_width,
            1,
            w,
            1,
            s.in_dim,
            T::one(),
            &mut pre,
            s.out_dim,
            1,
        );
        if s.takes_skip {
            T::gemm(
                batch,
                d,
                s.out_dim,
                T::one(),
                inputs,
                d,
                1,
                &w[prev_width..],
                1,
                s.in_dim,
                T::one(),
                &mut pre,
                s.out_dim,
                1,
            );
        }
        pre
    }

    fn run(&self, inputs: &[T], mode: Mode, keep: bool) -> Result<(Vec<T>, Vec<Vec<T>>, T)> {
        let batch = self.check_inputs(inputs)?;
        let n = self.params.layers().len();
        let (act_scale, mut rng) = match mode {
            Mode::Eval => (T::one() - self.dropout, None),
            Mode::Train { mask_seed } => (T::one(), Some(ChaCha8Rng::seed_from_u64(mask_seed))),
        };
        let rate = self.params.config().dropout_rate;
        let mut hidden: Vec<Vec<T>> = Vec::with_capacity(if keep { n - 1 } else { 0 });
        let mut prev: Vec<T> = Vec::new();
        for layer in 0..n {
            let src: &[T] = if layer == 0 { inputs } else { &prev };
            let mut pre = self.affine(layer, src, inputs, batch);
            if layer == n - 1 {
                for v in pre.iter_mut() {
                    *v = v.tanh();
                }
                return Ok((pre, hidden, act_scale));
            }
            match rng.as_mut() {
                Some(rng) if rate > 0.0 => {
                    for v in pre.iter_mut() {
                        let dropped = rng.random::<f64>() < rate;
                        *v = if dropped || *v <= T::zero() { T::zero() } else { *v };
                    }
                }
                _ => {
                    for v in pre.iter_mut() {
                        *v = if *v > T::zero() { *v * act_scale } else { T::zero() };
                    }
                }
            }
            if keep {
                hidden.push(pre.clone());
            }
            prev = pre;
        }
        unreachable!("the loop returns at the output layer")
    }

    /// Forward pass over `batch` rows of `[z, x]`, keeping a tape for [`Network::backward`].
    pub fn forward(&self, inputs: &[T], mode: Mode) -> Result<(Vec<T>, ForwardTape<T>)> {
        let (outputs, hidden, act_scale) = self.run(inputs, mode, true)?;
        let tape = ForwardTape {
            stamp: self.params.stamp(),
            batch: outputs.len(),
            inputs: inputs.to_vec(),
            hidden,
            outputs: outputs.clone(),
            act_scale,
        };
        Ok((outputs, tape))
    }

    /// Eval-mode outputs without a tape.
    pub fn evaluate(&self, inputs: &[T]) -> Result<Vec<T>> {
        Ok(self.run(inputs, Mode::Eval, false)?.0)
    }

    /// Reverse-mode gradients of `sum_i upstream[i] * output[i]` under the
    /// tape's dropout masks. Parameter gradients are skipped unless `with_params`.
    pub fn backward(&self, tape: &ForwardTape<T>, upstream: &[T], with_params: bool) -> Result<Gradients<T>> {
        if tape.stamp != self.params.stamp() || upstream.len() != tape.batch {
            return Err(Error::TapeMismatch);
        }
        let batch = tape.batch;
        let d = self.input_dim();
        let shapes = self.params.layers();
        let n = shapes.len();

        let mut grad_params = if with_params {
            alloc::vec![T::zero(); self.params.len()]
        } else {
            Vec::new()
        };
        let mut grad_inputs = alloc::vec![T::zero(); batch * d];

        // d(output)/d(pre) of the tanh layer.
        let mut delta: Vec<T> = upstream
            .iter()
            .zip(&tape.outputs)
            .map(|(&u, &y)| u * (T::one() - y * y))
            .collect();

        let mut dw = Vec::new();
        for layer in (0..n).rev() {
            let s = &shapes[layer];
            let prev: &[T] = if layer == 0 {
                &tape.inputs
            } else {
                &tape.hidden[layer - 1]
            };
            let prev_width = if s.takes_skip { s.in_dim - d } else { s.in_dim };

            if with_params {
                dw.clear();
                dw.resize(s.out_dim * s.in_dim, T::zero());
                // dW = delta^T * [prev, inputs]
                T::gemm(
                    s.out_dim,
                    batch,
                    prev_width,
                    T::one(),
                    &delta,
                    1,
                    s.out_dim,
                    prev,
                    prev_width,
                    1,
                    T::zero(),
                    &mut dw,
                    s.in_dim,
                    1,
                );
                if s.takes_skip {
                    T::gemm(
                        s.out_dim,
                        batch,
                        d,
                        T::one(),
                        &delta,
                        1,
                        s.out_dim,
                        &tape.inputs,
                        d,
                        1,
                        T::zero(),
                        &mut dw[prev_width..],
                        s.in_dim,
                        1,
                    );
                }
                self.write_param_grads(layer, &dw, &delta, batch, &mut grad_params);
            }

            // d(loss)/d(layer input) = delta * W
            let mut din = alloc::vec![T::zero(); batch * s.in_dim];
            T::gemm(
                batch,
                s.out_dim,
                s.in_dim,
                T::one(),
                &delta,
                s.out_dim,
                1,
                self.weight(layer),
                s.in_dim,
                1,
                T::zero(),
                &mut din,
                s.in_dim,
                1,
            );

            if layer == 0 {
                for (g, v) in grad_inputs.iter_mut().zip(&din) {
                    *g += *v;
                }
                break;
            }
            if s.takes_skip {
                for r in 0..batch {
                    let src = &din[r * s.in_dim + prev_width..(r + 1) * s.in_dim];
                    for (g, v) in grad_inputs[r * d..(r + 1) * d].iter_mut().zip(src) {
                        *g += *v;
                    }
                }
            }
            let act = &tape.hidden[layer - 1];
            let mut next = Vec::with_capacity(batch * prev_width);
            for r in 0..batch {
                let src = &din[r * s.in_dim..r * s.in_dim + prev_width];
                let a = &act[r * prev_width..(r + 1) * prev_width];
                next.extend(src.iter().zip(a).map(
                    |(&g, &a)| {
                        if a > T::zero() {
                            g * tape.act_scale
                        } else {
                            T::zero()
                        }
                    },
                ));
            }
            delta = next;
        }

        Ok(Gradients {
            params: grad_params,
            inputs: grad_inputs,
            input_dim: d,
        })
    }

    /// Converts `dL/dW` into gradients of `v`, `g` and `b`.
    fn write_param_grads(&self, layer: usize, dw: &[T], delta: &[T], batch: usize, out: &mut [T]) {
        let s = &self.params.layers()[layer];
        let data = self.params.as_slice();
        let row_start: usize = self.params.layers()[..layer].iter().map(|l| l.out_dim).sum();
        for row in 0..s.out_dim {
            let inv = self.inv_norms[row_start + row];
            let g = data[s.g_range().start + row];
            let v = &data[s.offset + row * s.in_dim..s.offset + (row + 1) * s.in_dim];
            let dwr = &dw[row * s.in_dim..(row + 1) * s.in_dim];
            // dL/dg = dW . v_hat
            let dg = dwr.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b) * inv;
            out[s.g_range().start + row] = dg;
            // dL/dv = (g / |v|) (dW - dg v_hat)
            let k = g * inv;
            let dv = &mut out[s.offset + row * s.in_dim..s.offset + (row + 1) * s.in_dim];
            for ((o, &a), &b) in dv.iter_mut().zip(dwr).zip(v) {
                *o = k * (a - dg * b * inv);
            }
            let mut db = T::zero();
            for r in 0..batch {
                db += delta[r * s.out_dim + row];
            }
            out[s.b_range().start + row] = db;
        }
    }

    /// Spatial gradients `df/dx` for every row of `inputs` (eval mode).
    pub fn spatial_gradients(&self, inputs: &[T]) -> Result<Vec<[T; 3]>> {
        let (out, tape) = self.forward(inputs, Mode::Eval)?;
        let ones = alloc::vec![T::one(); out.len()];
        let g = self.backward(&tape, &ones, false)?;
        Ok((0..out.len()).map(|i| g.spatial(i)).collect())
    }
}

/// Builds network input rows `[z, x]` for each point.
pub fn assemble_inputs<T: Real>(z: &[T], points: &[[T; 3]]) -> Vec<T> {
    let mut rows = Vec::with_capacity(points.len() * (z.len() + 3));
    for p in points {
        rows.extend_from_slice(z);
        rows.extend_from_slice(p);
    }
    rows
}
