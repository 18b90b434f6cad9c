use alloc::vec::Vec;

#[allow(unused_imports)] // sqrt and friends without std
use num_traits::Float;

use crate::{Error, Result, Vec3};

/// `n` near-uniform unit vectors on the Fibonacci spiral lattice.
pub fn fibonacci_sphere(n: usize) -> Result<Vec<Vec3>> {
    if n == 0 {
        return Err(Error::EmptyInput("fibonacci_sphere needs n >= 1"));
    }
    let golden_angle = core::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    Ok((0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            Vec3::new(r * phi.cos(), y, r * phi.sin()).normalize()
        })
        .collect())
}
