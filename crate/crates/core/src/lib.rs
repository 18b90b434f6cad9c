//! Neural signed distance functions for shape families.
//!
//! A latent-conditioned, weight-normalized MLP `f(z, x)` approximates the
//! signed distance field of every shape in a family. Per-shape codes `z` are
//! free variables optimized jointly with the network (auto-decoding) and, at
//! test time, alone against partial or full observations.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. The `parallel` feature distributes batch work over rayon; results
//! are identical for every worker count because work is split into fixed-size
//! chunks and reduced in chunk order.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod decoder;
mod error;
mod exec;
pub mod geometry;
pub mod inference;
pub mod metrics;
pub mod sampling;
pub mod surfacing;
pub mod training;

pub use error::{Error, Result};
pub use exec::derive_seed;
pub use geometry::{Point3, Vec3};
