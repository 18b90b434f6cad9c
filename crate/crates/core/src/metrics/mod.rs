//! Shape reconstruction metrics: Chamfer distance, earth mover's distance,
//! mesh accuracy, mesh completion and normal consistency.

mod assignment;
mod distance;

pub use assignment::{emd, optimal_assignment, MAX_EMD_POINTS};
pub use distance::{
    chamfer, cosine_similarity, mesh_accuracy, mesh_accuracy_percentile, mesh_completion, point_mesh_distances,
    sample_points, PointSample,
};
