use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdfforge::decoder::{assemble_inputs, NetConfig, Network};
use sdfforge::geometry::AnalyticShape;
use sdfforge::sampling::{SampleSet, SdfSample};
use sdfforge::training::{train_auto_decoder, train_single_shape, TrainConfig};
use sdfforge::Vec3;

/// Near-surface and uniform samples of an analytic shape.
fn analytic_set(id: &str, shape: &AnalyticShape, n: usize, seed: u64) -> SampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n);
    while samples.len() < n {
        let p = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let s = shape.sdf(p);
        // Keep all band samples and a tenth of the far ones.
        if s.abs() < 0.15 || rng.random_range(0.0..1.0) < 0.1 {
            samples.push(SdfSample::new(p, s));
        }
    }
    SampleSet::new(id, samples).unwrap()
}

#[test]
fn sphere_fit_is_accurate_in_the_band() {
    let sphere = AnalyticShape::sphere(Vec3::ZERO, 0.5).unwrap();
    let set = analytic_set("sphere", &sphere, 60_000, 1);
    let net = NetConfig::new(0, 128, 4, &[]);
    let cfg = TrainConfig {
        decoder_lr: Some(5e-4),
        samples_per_step: 1024,
        epochs: 2000,
        ..TrainConfig::default()
    };
    let (params, history) = train_single_shape(&set, &net, &cfg).unwrap();
    assert_eq!(history.len(), 2000);
    assert!(history.last().unwrap().sdf_loss < history.first().unwrap().sdf_loss);

    let network = Network::new(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut err, mut n) = (0.0, 0);
    while n < 5000 {
        let p = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let s = sphere.sdf(p);
        if s.abs() > 0.1 {
            continue;
        }
        let f = network
            .evaluate(&assemble_inputs(&[], &[[p.x as f32, p.y as f32, p.z as f32]]))
            .unwrap()[0];
        err += (f as f64 - s).abs();
        n += 1;
    }
    let mean = err / n as f64;
    assert!(mean <= 0.01, "mean band error {mean}");
}

#[test]
fn one_dimensional_latent_matches_single_shape_budget() {
    let torus = AnalyticShape::torus(0.5, 0.2).unwrap();
    let set = analytic_set("torus", &torus, 20_000, 2);
    let cfg = TrainConfig {
        decoder_lr: Some(5e-4),
        samples_per_step: 512,
        epochs: 300,
        ..TrainConfig::default()
    };
    let (_, single) = train_single_shape(&set, &NetConfig::new(0, 64, 4, &[]), &cfg).unwrap();
    let model = train_auto_decoder(std::slice::from_ref(&set), &NetConfig::new(1, 64, 4, &[]), &cfg).unwrap();
    let tail = |h: &[sdfforge::training::EpochLoss]| h[h.len() - 20..].iter().map(|e| e.sdf_loss).sum::<f64>() / 20.0;
    let a = tail(&single.epochs);
    let b = tail(&model.history.epochs);
    assert!(b <= 2.0 * a, "latent {b} vs single {a}");
}
