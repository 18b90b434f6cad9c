//! The latent-conditioned decoder `f(z, x)`: fully connected, weight-normalized
//! ReLU layers with optional latent skip connections and a tanh output.

mod codebook;
mod config;
mod network;
mod params;
mod real;

pub use codebook::LatentCodebook;
pub use config::{LayerShape, NetConfig};
pub use network::{assemble_inputs, ForwardTape, Gradients, Mode, Network};
pub use params::DecoderParams;
pub use real::Real;

use alloc::vec::Vec;

use crate::{Error, Result};

fn input_row<T: Real>(params: &DecoderParams<T>, z: &[T], x: [T; 3]) -> Result<Vec<T>> {
    let latent = params.config().latent_dim;
    if z.len() != latent {
        return Err(Error::DimensionMismatch {
            expected: latent,
            got: z.len(),
        });
    }
    Ok(assemble_inputs(z, &[x]))
}

/// Evaluates `f(z, x)` for one point, returning the tape for [`backward`].
pub fn forward<T: Real>(params: &DecoderParams<T>, z: &[T], x: [T; 3], mode: Mode) -> Result<(T, ForwardTape<T>)> {
    let row = input_row(params, z, x)?;
    let (out, tape) = Network::new(params).forward(&row, mode)?;
    Ok((out[0], tape))
}

/// Gradients of `upstream * f` with respect to parameters, `z` and `x`.
pub fn backward<T: Real>(params: &DecoderParams<T>, tape: &ForwardTape<T>, upstream: T) -> Result<Gradients<T>> {
    if tape.batch() != 1 {
        return Err(Error::TapeMismatch);
    }
    Network::new(params).backward(tape, &[upstream], true)
}

/// `df/dx` at one point, in eval mode.
pub fn spatial_gradient<T: Real>(params: &DecoderParams<T>, z: &[T], x: [T; 3]) -> Result<[T; 3]> {
    let row = input_row(params, z, x)?;
    Ok(Network::new(params).spatial_gradients(&row)?[0])
}

/// Unit normal from a spatial gradient; `None` signals a degenerate (zero) gradient.
pub fn surface_normal<T: Real>(gradient: [T; 3]) -> Option<crate::Vec3> {
    crate::Vec3::new(gradient[0].f64(), gradient[1].f64(), gradient[2].f64()).try_normalize()
}
