//! Clamped-L1 regression of signed distances: single-shape fitting and
//! joint auto-decoder training of the decoder and a latent codebook.

mod adam;
mod batch;
mod config;
mod loss;
pub(crate) mod objective;
mod trainer;

pub use adam::{adam_step, AdamState};
pub use batch::make_balanced_batch;
pub use config::{EpochLoss, LossRecord, StepDecay, TrainConfig};
pub use loss::{clamp, clamped_l1, clamped_l1_grad};
pub use objective::latent_objective;
pub use trainer::{train_auto_decoder, train_single_shape, TrainedModel};
