use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sampling::{SampleSet, SdfSample};
use crate::{Error, Result};

/// `ceil(n/2)` positive and `floor(n/2)` negative samples drawn without
/// replacement; positives come first.
pub fn make_balanced_batch(set: &SampleSet, n: usize, seed: u64) -> Result<Vec<SdfSample>> {
    let n_pos = n.div_ceil(2);
    let n_neg = n / 2;
    for (sign, needed, available) in [
        ("positive", n_pos, set.positive.len()),
        ("negative", n_neg, set.negative.len()),
    ] {
        if available < needed {
            return Err(Error::Imbalance {
                sign,
                needed,
                available,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut batch = Vec::with_capacity(n);
    batch.extend(
        sample(&mut rng, set.positive.len(), n_pos)
            .into_iter()
            .map(|i| set.positive[i]),
    );
    batch.extend(
        sample(&mut rng, set.negative.len(), n_neg)
            .into_iter()
            .map(|i| set.negative[i]),
    );
    Ok(batch)
}
