use std::f64::consts::FRAC_PI_3;
use std::path::Path;

use sdfforge::decoder::LatentCodebook;
use sdfforge::geometry::{PinholeCamera, TriangleMesh};
use sdfforge::inference::{complete_shape, depth_to_observation, perturb_depth, CompletionConfig};
use sdfforge::sampling::{render_depth, DepthMap};
use sdfforge::surfacing::{evaluate_grid, marching_cubes, LatentField, ScalarField};
use sdfforge::Vec3;
use sdfforge_cli::formats::Checkpoint;
use sdfforge_cli::manifest::{Manifest, Split};
use sdfforge_cli::pipeline::{self, PipelineConfig, Summary};
use sdfforge_cli::runtime;

use crate::Outcome;

const ETA: f64 = 0.005;
const EVAL_POINTS: usize = 2000;

pub struct Trained {
    summary: Summary,
    ckpt: Checkpoint,
    manifest: Manifest,
}

impl Trained {
    fn gt_mesh(&self, shape_id: &str) -> TriangleMesh {
        let rel = self
            .manifest
            .get(shape_id)
            .and_then(|r| r.gt_mesh.clone())
            .expect("ground-truth mesh");
        runtime::read_mesh(&self.manifest.resolve(&rel)).unwrap()
    }

    fn test_ids(&self) -> Vec<String> {
        self.manifest.split(Split::Test).map(|r| r.shape_id.clone()).collect()
    }

    fn embed_chamfer(&self, shape_id: &str) -> f64 {
        self.summary
            .metrics
            .iter()
            .find(|m| m.shape_id == shape_id)
            .map_or(f64::NAN, |m| m.chamfer)
    }
}

fn config_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/boxes20.cfg")
}

pub fn train(work: &Path) -> (Outcome, Option<Trained>) {
    let cfg = match PipelineConfig::load(&config_path()) {
        Ok(c) => c,
        Err(e) => return (Outcome::new(false, format!("config: {e}")), None),
    };
    let summary = match pipeline::run(&cfg, work) {
        Ok(s) => s,
        Err(e) => return (Outcome::new(false, format!("pipeline failed: {e}")), None),
    };
    let ckpt = runtime::read_checkpoint(&summary.checkpoint).unwrap();
    let manifest = Manifest::load(&summary.manifest).unwrap();
    let train: Vec<f64> = summary
        .metrics
        .iter()
        .filter(|m| m.split == Split::Train)
        .map(|m| m.chamfer)
        .collect();
    let worst = train.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let decreased = summary.final_objective < summary.initial_objective;
    let outcome = Outcome::new(
        train.len() == 20 && worst <= 5e-3 && decreased,
        format!(
            "{} shapes, worst chamfer {worst:.3e}, mean {:.3e}, objective {:.4e} -> {:.4e}",
            train.len(),
            summary.mean_train_chamfer,
            summary.initial_objective,
            summary.final_objective
        ),
    )
    .within(900.0);
    (
        outcome,
        Some(Trained {
            summary,
            ckpt,
            manifest,
        }),
    )
}

pub fn embed(t: &Trained) -> Outcome {
    let test: Vec<f64> = t
        .summary
        .metrics
        .iter()
        .filter(|m| m.split == Split::Test)
        .map(|m| m.chamfer)
        .collect();
    let limit = 2.0 * t.summary.mean_train_chamfer;
    let worst = test.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        test.len() == 4 && worst <= limit,
        format!("held-out chamfer {} (limit {limit:.3e})", fmt_all(&test)),
    )
}

fn fmt_all(v: &[f64]) -> String {
    v.iter().map(|c| format!("{c:.2e}")).collect::<Vec<_>>().join(", ")
}

fn view_camera() -> PinholeCamera {
    PinholeCamera::look_at(
        Vec3::new(1.0, 0.8, 1.3).normalize() * 2.0,
        Vec3::ZERO,
        FRAC_PI_3,
        128,
        128,
    )
    .unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Median objective over the last tenth of iterations against the first tenth.
fn trend_down(history: &[f64]) -> bool {
    let k = (history.len() / 10).max(1);
    median(history[history.len() - k..].to_vec()) < median(history[..k].to_vec())
}

struct Completion {
    chamfer: f64,
    z: Vec<f32>,
    trend_ok: bool,
}

fn complete(t: &Trained, map: &DepthMap, gt: &TriangleMesh, cfg: &CompletionConfig, obs_seed: u64) -> Completion {
    let obs = depth_to_observation(map, ETA, 2, obs_seed).unwrap();
    let est = complete_shape(&t.ckpt.params, &obs, cfg).unwrap();
    let mesh = runtime::decode_mesh(&t.ckpt.params, &est.z, 64).unwrap().to_mesh();
    Completion {
        chamfer: runtime::mesh_chamfer(&mesh, gt, EVAL_POINTS, 5).unwrap(),
        trend_ok: trend_down(&est.history),
        z: est.z,
    }
}

/// Fraction of observed rays whose segment up to 0.95 depth stays outside the learned surface.
fn clean_fraction(t: &Trained, map: &DepthMap, z: &[f32]) -> f64 {
    let field = LatentField::new(&t.ckpt.params, z).unwrap();
    let (mut rays, mut clean) = (0usize, 0usize);
    for i in map.hits() {
        let dir = map.ray_direction(i);
        let reach = 0.95 * map.depth[i];
        let points: Vec<Vec3> = (0..=64)
            .map(|k| map.camera.center + dir * (reach * k as f64 / 64.0))
            .collect();
        rays += 1;
        if field.values(&points).iter().all(|&f| f > 0.0) {
            clean += 1;
        }
    }
    clean as f64 / rays.max(1) as f64
}

pub fn completion(t: &Trained) -> Outcome {
    let cfg = CompletionConfig {
        eta: ETA,
        iterations: 800,
        samples_per_iter: Some(4096),
        seed: 3,
        ..CompletionConfig::default()
    };
    let camera = view_camera();
    let mut pass = true;
    let mut parts = Vec::new();
    for id in t.test_ids() {
        let gt = t.gt_mesh(&id);
        let map = render_depth(&gt, &camera);
        let c = complete(t, &map, &gt, &cfg, 7);
        let limit = 3.0 * t.embed_chamfer(&id);
        let clean = clean_fraction(t, &map, &c.z);
        pass &= c.chamfer <= limit && clean >= 0.95 && c.trend_ok;
        parts.push(format!(
            "{id} {:.2e}/{limit:.2e} clean {:.1}%",
            c.chamfer,
            100.0 * clean
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

pub fn noise(t: &Trained) -> Outcome {
    let camera = view_camera();
    let shapes: Vec<(TriangleMesh, DepthMap)> = t
        .test_ids()
        .iter()
        .map(|id| {
            let gt = t.gt_mesh(id);
            let map = render_depth(&gt, &camera);
            (gt, map)
        })
        .collect();
    let mut medians = Vec::new();
    let mut trend_ok = true;
    for alpha in [0.0, 0.01, 0.02, 0.03] {
        let mut per_seed = Vec::new();
        for seed in 0..3u64 {
            let cfg = CompletionConfig {
                eta: ETA,
                iterations: 400,
                samples_per_iter: Some(2048),
                seed: 300 + seed,
                ..CompletionConfig::default()
            };
            let mut sum = 0.0;
            for (gt, map) in &shapes {
                let noisy = perturb_depth(map, alpha, 100 + seed).unwrap();
                let c = complete(t, &noisy, gt, &cfg, 200 + seed);
                trend_ok &= c.trend_ok;
                sum += c.chamfer;
            }
            per_seed.push(sum / shapes.len() as f64);
        }
        medians.push(median(per_seed));
    }
    let monotone = medians.windows(2).all(|w| w[0] <= w[1]);
    Outcome::new(
        monotone && trend_ok,
        format!("median chamfer at alpha 0, 0.01, 0.02, 0.03: {}", fmt_all(&medians)),
    )
}

fn occupancy(t: &Trained, z: &[f32]) -> (usize, bool) {
    let grid = evaluate_grid(&t.ckpt.params, z, 64, runtime::extraction_bounds()).unwrap();
    let mesh = marching_cubes(&grid, 0.0);
    (grid.values.iter().filter(|&&v| v < 0.0).count(), !mesh.is_empty())
}

pub fn interpolation(t: &Trained) -> Outcome {
    let codebook: &LatentCodebook<f32> = &t.ckpt.codebook;
    let ids = codebook.ids();
    let (a, b) = (codebook.code(0), codebook.code(ids.len() - 1));
    let volumes: Vec<(usize, bool)> = (0..=10)
        .map(|k| {
            let s = k as f32 / 10.0;
            let z: Vec<f32> = a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect();
            occupancy(t, &z)
        })
        .collect();
    let (v0, v1) = (volumes[0].0 as f64, volumes[10].0 as f64);
    let slack = 0.1 * (v1 - v0).abs();
    let sign = if v1 >= v0 { 1.0 } else { -1.0 };
    let monotone = volumes
        .windows(2)
        .all(|w| sign * (w[1].0 as f64 - w[0].0 as f64) >= -slack);
    let non_empty = volumes[1..10].iter().all(|v| v.1);
    Outcome::new(
        monotone && non_empty && v0 != v1,
        format!(
            "{} -> {} occupancy {:?}",
            ids[0],
            ids[ids.len() - 1],
            volumes.iter().map(|v| v.0).collect::<Vec<_>>()
        ),
    )
}
