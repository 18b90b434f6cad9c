//! Training data preparation: virtual depth rendering, oriented shell
//! extraction, near-surface and uniform spatial sampling.

mod depth;
mod samples;
mod shell;

pub use depth::{render_depth, DepthMap};
pub use samples::{generate_samples, generate_samples_with, sample_positions, PrepConfig, SampleSet, SdfSample};
pub use shell::{accept_mesh, extract_shell, virtual_cameras, Shell, CAMERA_FOV_Y, CAMERA_RADIUS};
