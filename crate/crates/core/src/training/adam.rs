use alloc::vec::Vec;

use crate::decoder::Real;
use crate::{Error, Result};

/// Bias-corrected Adam moments for a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T: Real> {
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl<T: Real> AdamState<T> {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: alloc::vec![T::zero(); len],
            v: alloc::vec![T::zero(); len],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// One Adam update of `params` in place. Non-finite gradients abort the
    /// step without touching parameters or moments.
    pub fn update(&mut self, params: &mut [T], grads: &[T], lr: f64) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                got: if params.len() != self.m.len() {
                    params.len()
                } else {
                    grads.len()
                },
            });
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::OptimizerFault(alloc::format!(
                "non-finite gradient at index {i}"
            )));
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - num_traits::Float::powi(self.beta1, t);
        let c2 = 1.0 - num_traits::Float::powi(self.beta2, t);
        let (b1, b2) = (T::of(self.beta1), T::of(self.beta2));
        let (ob1, ob2) = (T::of(1.0 - self.beta1), T::of(1.0 - self.beta2));
        let step_size = T::of(lr / c1);
        let inv_c2 = T::of(1.0 / c2);
        let eps = T::of(self.eps);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + ob1 * g;
            self.v[i] = b2 * self.v[i] + ob2 * g * g;
            params[i] -= step_size * self.m[i] / ((self.v[i] * inv_c2).sqrt() + eps);
        }
        Ok(())
    }
}

/// Free-function form of [`AdamState::update`].
pub fn adam_step<T: Real>(state: &mut AdamState<T>, params: &mut [T], grads: &[T], lr: f64) -> Result<()> {
    state.update(params, grads, lr)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook Adam written out in f64.
    fn reference(params: &mut [f64], grads_seq: &[Vec<f64>], lr: f64) {
        let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8);
        let mut m = alloc::vec![0.0; params.len()];
        let mut v = alloc::vec![0.0; params.len()];
        for (t, g) in grads_seq.iter().enumerate() {
            let t = (t + 1) as i32;
            for i in 0..params.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let mh = m[i] / (1.0 - b1.powi(t));
                let vh = v[i] / (1.0 - b2.powi(t));
                params[i] -= lr * mh / (vh.sqrt() + eps);
            }
        }
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut s = AdamState::<f64>::new(3);
        let mut p = alloc::vec![1.0, 2.0, 3.0];
        s.update(&mut p, &[0.5, -2.0, 1e-3], 0.01).unwrap();
        assert!((p[0] - 0.99).abs() < 1e-8);
        assert!((p[1] - 2.01).abs() < 1e-8);
        assert!((p[2] - (3.0 - 0.01 * 1e-3 / (1e-3 + 1e-8))).abs() < 1e-12);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn zero_gradient_keeps_params_and_decays_moments() {
        let mut s = AdamState::<f64>::new(2);
        let mut p = alloc::vec![1.0, -1.0];
        s.update(&mut p, &[1.0, 1.0], 0.1).unwrap();
        let before = p.clone();
        let (m0, v0) = (s.m.clone(), s.v.clone());
        let mut q = before.clone();
        let mut fresh = AdamState::<f64>::new(2);
        fresh.update(&mut q, &[0.0, 0.0], 0.1).unwrap();
        assert_eq!(q, before);
        s.update(&mut p, &[0.0, 0.0], 0.0).unwrap();
        assert_eq!(p, before);
        assert!((s.m[0] - 0.9 * m0[0]).abs() < 1e-15);
        assert!((s.v[0] - 0.999 * v0[0]).abs() < 1e-15);
    }

    #[test]
    fn matches_reference_over_many_steps() {
        let seq: Vec<Vec<f64>> = (0..50)
            .map(|k| (0..4).map(|i| ((k * 7 + i * 3) as f64).sin()).collect())
            .collect();
        let mut expect = alloc::vec![0.1, 0.2, 0.3, 0.4];
        reference(&mut expect, &seq, 0.003);
        let mut p = alloc::vec![0.1, 0.2, 0.3, 0.4];
        let mut s = AdamState::new(4);
        for g in &seq {
            adam_step(&mut s, &mut p, g, 0.003).unwrap();
        }
        for (a, b) in p.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn stateful_steps_differ_from_one_big_step() {
        let g = [0.3, -0.7];
        let mut twice = alloc::vec![0.0, 0.0];
        let mut s = AdamState::new(2);
        s.update(&mut twice, &g, 0.01).unwrap();
        s.update(&mut twice, &g, 0.01).unwrap();
        let mut once = alloc::vec![0.0, 0.0];
        AdamState::new(2).update(&mut once, &g, 0.02).unwrap();
        assert_ne!(twice, once);
        let mut expect = alloc::vec![0.0, 0.0];
        reference(&mut expect, &[g.to_vec(), g.to_vec()], 0.01);
        for (a, b) in twice.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn non_finite_gradient_is_a_fault() {
        let mut s = AdamState::<f32>::new(2);
        let mut p = alloc::vec![1.0f32, 1.0];
        let err = s.update(&mut p, &[f32::NAN, 0.0], 0.1).unwrap_err();
        assert!(matches!(err, Error::OptimizerFault(_)));
        assert_eq!(p, [1.0, 1.0]);
        assert_eq!(s.step, 0);
        assert!(s.update(&mut p, &[0.0], 0.1).is_err());
    }
}
