use alloc::vec::Vec;

use crate::{Error, Result};

/// Optimization settings shared by single-shape and auto-decoder training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Clamp distance of the loss.
    pub delta: f64,
    /// Decoder learning rate; `None` means `1e-5 * shapes_per_batch`.
    pub decoder_lr: Option<f64>,
    pub latent_lr: f64,
    /// Weight of `|z|^2` in the per-shape objective.
    pub lambda: f64,
    /// Prior stddev of the latent codes; `1 / sigma^2` is the literal regularizer weight.
    pub sigma: f64,
    pub samples_per_step: usize,
    /// Shapes per optimization step (auto-decoder only).
    pub shapes_per_batch: usize,
    pub epochs: usize,
    pub latent_init_stddev: f64,
    /// Learning-rate schedule shared by the decoder and the codes.
    pub lr_decay: Option<StepDecay>,
    pub seed: u64,
}

/// Multiplies the learning rates by `factor` after every `every` epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDecay {
    pub every: usize,
    pub factor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            delta: 0.1,
            decoder_lr: None,
            latent_lr: 1e-3,
            lambda: 1e-4,
            sigma: 1e-2,
            samples_per_step: 16_384,
            shapes_per_batch: 64,
            epochs: 100,
            latent_init_stddev: 0.01,
            lr_decay: None,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.delta) {
            return Err(Error::invalid("delta must be positive"));
        }
        if !positive(self.latent_lr) || self.decoder_lr.is_some_and(|lr| !positive(lr)) {
            return Err(Error::invalid("learning rates must be positive"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::invalid("lambda must be non-negative"));
        }
        if !(self.latent_init_stddev.is_finite() && self.latent_init_stddev >= 0.0) {
            return Err(Error::invalid("latent init stddev must be non-negative"));
        }
        if let Some(d) = self.lr_decay {
            if d.every == 0 || !(d.factor > 0.0 && d.factor <= 1.0) {
                return Err(Error::invalid("lr decay needs every > 0 and factor in (0, 1]"));
            }
        }
        if self.samples_per_step == 0 || self.shapes_per_batch == 0 {
            return Err(Error::invalid("batch sizes must be positive"));
        }
        Ok(())
    }

    /// Decoder learning rate for `shapes` shapes per step.
    pub fn decoder_lr_for(&self, shapes: usize) -> f64 {
        self.decoder_lr.unwrap_or(1e-5 * shapes as f64)
    }

    /// Factor applied to both learning rates during `epoch`.
    pub fn lr_scale(&self, epoch: usize) -> f64 {
        self.lr_decay
            .map_or(1.0, |d| num_traits::Float::powi(d.factor, (epoch / d.every) as i32))
    }

    /// `1 / sigma^2`, the regularizer weight read literally from the prior.
    pub fn literal_lambda(&self) -> f64 {
        1.0 / (self.sigma * self.sigma)
    }
}

/// Per-epoch means of the data term and the latent regularizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLoss {
    pub epoch: usize,
    pub sdf_loss: f64,
    pub reg_loss: f64,
    /// Wall time spent in the epoch (0 without `std`).
    pub seconds: f64,
}

impl EpochLoss {
    pub fn objective(&self) -> f64 {
        self.sdf_loss + self.reg_loss
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossRecord {
    pub epochs: Vec<EpochLoss>,
}

impl LossRecord {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn first(&self) -> Option<&EpochLoss> {
        self.epochs.first()
    }

    pub fn last(&self) -> Option<&EpochLoss> {
        self.epochs.last()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_decay_scales_by_whole_intervals() {
        let cfg = TrainConfig {
            lr_decay: Some(StepDecay {
                every: 500,
                factor: 0.5,
            }),
            ..TrainConfig::default()
        };
        assert_eq!(cfg.lr_scale(0), 1.0);
        assert_eq!(cfg.lr_scale(499), 1.0);
        assert_eq!(cfg.lr_scale(500), 0.5);
        assert_eq!(cfg.lr_scale(1999), 0.125);
        assert_eq!(TrainConfig::default().lr_scale(10_000), 1.0);
    }

    #[test]
    fn rejects_degenerate_decay() {
        for (every, factor) in [(0, 0.5), (10, 0.0), (10, 1.5), (10, f64::NAN)] {
            let cfg = TrainConfig {
                lr_decay: Some(StepDecay { every, factor }),
                ..TrainConfig::default()
            };
            assert!(cfg.validate().is_err(), "{every} {factor}");
        }
    }
}
