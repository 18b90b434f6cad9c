use sdfforge::decoder::NetConfig;
use sdfforge::geometry::{Aabb, AnalyticShape, TriangleMesh};
use sdfforge::sampling::{generate_samples_with, PrepConfig, SampleSet};
use sdfforge::surfacing::{marching_cubes, sample_grid, LatentField, ScalarField};
use sdfforge::training::{clamped_l1, train_auto_decoder, TrainConfig};
use sdfforge::Vec3;

use crate::Outcome;

const DELTA: f64 = 0.1;

fn shapes() -> Vec<SampleSet> {
    let prep = PrepConfig {
        n_surface: 1_500,
        n_uniform: 1_000,
        ..PrepConfig::default()
    };
    let sphere = AnalyticShape::sphere(Vec3::ZERO, 0.55).unwrap();
    let half = Vec3::new(0.5, 0.3, 0.4);
    let cuboid = AnalyticShape::cuboid(half).unwrap();
    let torus = AnalyticShape::torus(0.5, 0.18).unwrap();
    let torus_mesh = marching_cubes(&sample_grid(&torus, 96, Aabb::cube(1.0)).unwrap(), 0.0).to_mesh();
    vec![
        generate_samples_with(
            &TriangleMesh::icosphere(Vec3::ZERO, 0.55, 4),
            &sphere,
            "sphere",
            &prep,
            1,
        )
        .unwrap(),
        generate_samples_with(&TriangleMesh::cuboid(half), &cuboid, "box", &prep, 2).unwrap(),
        generate_samples_with(&torus_mesh, &torus, "torus", &prep, 3).unwrap(),
    ]
}

/// Clamped L1 over every sample of every shape with the learned codes.
fn final_loss(sets: &[SampleSet], net: &NetConfig, seed: u64) -> f64 {
    let cfg = TrainConfig {
        delta: DELTA,
        decoder_lr: Some(5e-4),
        latent_lr: 1e-3,
        samples_per_step: 1024,
        shapes_per_batch: 3,
        epochs: 1500,
        seed,
        ..TrainConfig::default()
    };
    let model = train_auto_decoder(sets, net, &cfg).unwrap();
    let (mut sum, mut n) = (0.0, 0usize);
    for set in sets {
        let field = LatentField::new(&model.params, model.codebook.get(&set.shape_id).unwrap()).unwrap();
        let points: Vec<Vec3> = set.iter().map(|s| s.point()).collect();
        for (pred, s) in field.values(&points).into_iter().zip(set.iter()) {
            sum += clamped_l1(pred, s.sdf as f64, DELTA);
            n += 1;
        }
    }
    sum / n as f64
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|l| format!("{l:.3e}")).collect::<Vec<_>>().join(", ")
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

pub fn run() -> Outcome {
    let sets = shapes();
    let with_skip = NetConfig::new(8, 64, 8, &[4]);
    let without = NetConfig::new(8, 64, 8, &[]);
    let mut skip_losses = Vec::new();
    let mut plain_losses = Vec::new();
    for seed in 0..3 {
        skip_losses.push(final_loss(&sets, &with_skip, seed));
        plain_losses.push(final_loss(&sets, &without, seed));
    }
    let (a, b) = (median(skip_losses.clone()), median(plain_losses.clone()));
    Outcome::new(
        a <= b,
        format!(
            "median final loss with skip {a:.3e} vs without {b:.3e} (per seed {} / {})",
            fmt(&skip_losses),
            fmt(&plain_losses)
        ),
    )
}
