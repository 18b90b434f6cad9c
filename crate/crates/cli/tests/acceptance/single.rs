use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdfforge::decoder::{DecoderParams, NetConfig};
use sdfforge::geometry::{fibonacci_sphere, AnalyticShape, TriangleMesh};
use sdfforge::metrics::{chamfer, sample_points};
use sdfforge::sampling::{generate_samples_with, PrepConfig};
use sdfforge::surfacing::{LatentField, ScalarField};
use sdfforge::training::{train_single_shape, StepDecay, TrainConfig};
use sdfforge::Vec3;
use sdfforge_cli::runtime::decode_mesh;

use crate::Outcome;

pub const RADIUS: f64 = 0.5;

pub fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n2 = v.x * v.x + v.y * v.y + v.z * v.z;
        if n2 > 1e-6 && n2 <= 1.0 {
            return v * (1.0 / n2.sqrt());
        }
    }
}

/// Fits the sphere and returns the network for the surfacing checks.
pub fn run() -> (Outcome, Option<DecoderParams<f32>>) {
    let sphere = AnalyticShape::sphere(Vec3::ZERO, RADIUS).unwrap();
    let prep = PrepConfig {
        n_surface: 9_500,
        n_uniform: 1_000,
        ..PrepConfig::default()
    };
    let surface = TriangleMesh::icosphere(Vec3::ZERO, RADIUS, 5);
    let set = generate_samples_with(&surface, &sphere, "sphere", &prep, 2).unwrap();
    assert_eq!(set.len(), 20_000);
    let net = NetConfig::new(0, 128, 4, &[]);
    let cfg = TrainConfig {
        delta: 0.1,
        decoder_lr: Some(3e-3),
        lr_decay: Some(StepDecay {
            every: 200,
            factor: 0.7,
        }),
        samples_per_step: 4096,
        epochs: 2000,
        seed: 3,
        ..TrainConfig::default()
    };
    let (params, history) = match train_single_shape(&set, &net, &cfg) {
        Ok(r) => r,
        Err(e) => return (Outcome::new(false, format!("training failed: {e}")), None),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let band: Vec<(Vec3, f64)> = (0..20_000)
        .map(|_| {
            let s = rng.random_range(-0.1..=0.1);
            (random_unit(&mut rng) * (RADIUS + s), s)
        })
        .collect();
    let field = LatentField::new(&params, &[]).unwrap();
    let pred = field.values(&band.iter().map(|b| b.0).collect::<Vec<_>>());
    let band_err = pred.iter().zip(&band).map(|(f, (_, s))| (f - s).abs()).sum::<f64>() / band.len() as f64;

    let mesh = decode_mesh(&params, &[], 64).unwrap().to_mesh();
    let chamfer_value = if mesh.is_empty() {
        f64::INFINITY
    } else {
        let gen: Vec<Vec3> = sample_points(&mesh, 2000, 5)
            .unwrap()
            .into_iter()
            .map(|p| p.position)
            .collect();
        // A lattice keeps the ground-truth side free of sampling clumps.
        let gt: Vec<Vec3> = fibonacci_sphere(2000)
            .unwrap()
            .into_iter()
            .map(|p| p * RADIUS)
            .collect();
        chamfer(&gen, &gt).unwrap()
    };
    let first = history.epochs.first().map_or(f64::NAN, |e| e.sdf_loss);
    let last = history.epochs.last().map_or(f64::NAN, |e| e.sdf_loss);
    let outcome = Outcome::new(
        band_err <= 0.01 && chamfer_value <= 1e-3,
        format!("band error {band_err:.2e}, MC-64 chamfer {chamfer_value:.2e}, loss {first:.3e} -> {last:.3e}"),
    )
    .within(120.0);
    (outcome, Some(params))
}
