use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sdfforge::decoder::DecoderParams;
use sdfforge::geometry::{Aabb, AnalyticShape, PinholeCamera};
use sdfforge::surfacing::{marching_cubes, render, sample_grid, sphere_trace_batch, RenderConfig, TraceConfig};
use sdfforge::Vec3;
use sdfforge_cli::with_threads;

use crate::single::{random_unit, RADIUS};
use crate::Outcome;

/// First intersection of a unit-direction ray with the origin-centered sphere.
fn ray_sphere(o: Vec3, d: Vec3, r: f64) -> Option<f64> {
    let b = o.x * d.x + o.y * d.y + o.z * d.z;
    let c = o.x * o.x + o.y * o.y + o.z * o.z - r * r;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t >= 0.0).then_some(t)
}

pub fn run(net: Option<&DecoderParams<f32>>) -> Outcome {
    let sphere = AnalyticShape::sphere(Vec3::ZERO, RADIUS).unwrap();
    let grid = sample_grid(&sphere, 64, Aabb::cube(1.0)).unwrap();
    let mc = marching_cubes(&grid, 0.0);
    let diag = 0.054;
    let radius_dev = mc
        .vertices
        .iter()
        .map(|v| ((v.x * v.x + v.y * v.y + v.z * v.z).sqrt() - RADIUS).abs())
        .fold(0.0f64, f64::max);
    let mc_ok = !mc.vertices.is_empty() && radius_dev <= diag;

    let Some(net) = net else {
        return Outcome::new(
            false,
            format!("MC max radius deviation {radius_dev:.4} (limit {diag:.4}); no sphere net to trace"),
        );
    };
    let cfg = TraceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rays: Vec<(Vec3, Vec3)> = (0..4000)
        .map(|_| {
            let origin = random_unit(&mut rng) * 1.1;
            let target = random_unit(&mut rng) * 0.45;
            let d = target - origin;
            (origin, d * (1.0 / (d.x * d.x + d.y * d.y + d.z * d.z).sqrt()))
        })
        .collect();
    let hits = sphere_trace_batch(net, &[], &rays, &cfg).unwrap();
    let (mut intersecting, mut close) = (0usize, 0usize);
    for ((o, d), hit) in rays.iter().zip(&hits) {
        let Some(t) = ray_sphere(*o, *d, RADIUS) else { continue };
        intersecting += 1;
        let truth = *o + *d * t;
        if hit.is_some_and(|h| (h.point - truth).norm() <= 2.0 * cfg.surface_eps) {
            close += 1;
        }
    }
    let trace_fraction = close as f64 / intersecting as f64;

    let camera = PinholeCamera::look_at(Vec3::new(0.9, 0.6, 1.5), Vec3::ZERO, 1.0, 96, 80).unwrap();
    let image = |threads: usize| {
        with_threads(threads, || {
            render(net, &[], &camera, &RenderConfig::default()).unwrap().to_ppm()
        })
        .unwrap()
    };
    let reference = image(1);
    let identical = reference == image(1) && reference == image(2) && reference == image(3);

    Outcome::new(
        mc_ok && trace_fraction >= 0.95 && identical,
        format!(
            "MC max radius deviation {radius_dev:.4} (limit {diag:.4}), {:.1}% of {intersecting} rays within 2 eps, renders identical across runs/threads: {identical}",
            100.0 * trace_fraction
        ),
    )
}
