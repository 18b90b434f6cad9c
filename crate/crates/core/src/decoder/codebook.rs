use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::real::Real;
use crate::{Error, Result};

/// Latent code per training shape, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentCodebook<T: Real> {
    dim: usize,
    ids: Vec<String>,
    codes: Vec<Vec<T>>,
    lookup: BTreeMap<String, usize>,
}

impl<T: Real> LatentCodebook<T> {
    pub fn new(dim: usize) -> Self {
        LatentCodebook {
            dim,
            ids: Vec::new(),
            codes: Vec::new(),
            lookup: BTreeMap::new(),
        }
    }

    /// Codes drawn i.i.d. from `N(0, stddev^2)`, one per id.
    pub fn random<S: AsRef<str>>(ids: &[S], dim: usize, stddev: f64, seed: u64) -> Result<Self> {
        let normal = Normal::new(0.0, stddev)
            .map_err(|_| Error::invalid("latent init stddev must be finite and non-negative"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut book = LatentCodebook::new(dim);
        for id in ids {
            let code = (0..dim).map(|_| T::of(normal.sample(&mut rng))).collect();
            book.insert(id.as_ref(), code)?;
        }
        Ok(book)
    }

    pub fn insert(&mut self, id: &str, code: Vec<T>) -> Result<()> {
        if code.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: code.len(),
            });
        }
        if code.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("latent code has non-finite entries"));
        }
        if self.lookup.contains_key(id) {
            return Err(Error::invalid(alloc::format!("duplicate shape id {id:?}")));
        }
        if id.is_empty() {
            return Err(Error::invalid("empty shape id"));
        }
        self.lookup.insert(id.into(), self.ids.len());
        self.ids.push(id.into());
        self.codes.push(code);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&[T]> {
        self.lookup.get(id).map(|&i| self.codes[i].as_slice())
    }

    pub fn code(&self, index: usize) -> &[T] {
        &self.codes[index]
    }

    pub(crate) fn code_mut(&mut self, index: usize) -> &mut Vec<T> {
        &mut self.codes[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[T])> {
        self.ids
            .iter()
            .map(String::as_str)
            .zip(self.codes.iter().map(Vec::as_slice))
    }
}
