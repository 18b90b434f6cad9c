//! Latent code estimation with a frozen decoder: fitting SDF samples,
//! completing shapes from single depth views, and a depth noise model.

mod estimate;
mod observation;

pub use estimate::{complete_shape, estimate_latent, freespace_loss, CompletionConfig, Estimate, EstimateConfig};
pub use observation::{depth_to_observation, perturb_depth, PartialObservation};
