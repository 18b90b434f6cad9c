use sdfforge::inference::{
    complete_shape, depth_to_observation, estimate_latent, perturb_depth, CompletionConfig, EstimateConfig,
};
use sdfforge::{derive_seed, Vec3};

use crate::cli::{CompleteArgs, EmbedArgs, FitArgs};
use crate::error::{CliError, CliResult};
use crate::formats::LatentFile;
use crate::runtime;

fn check_fit(f: &FitArgs) -> CliResult<()> {
    if f.iters == 0 {
        return Err(CliError::Config("--iters must be at least 1".into()));
    }
    Ok(())
}

pub fn embed(a: EmbedArgs) -> CliResult<()> {
    check_fit(&a.fit)?;
    let ckpt = runtime::read_checkpoint(&a.checkpoint)?;
    let set = runtime::read_samples(&a.samples, "query")?;
    let samples: Vec<_> = set.iter().copied().collect();
    let cfg = EstimateConfig {
        lambda: a.fit.lambda,
        iterations: a.fit.iters,
        lr: a.fit.lr,
        delta: a.delta,
        init_stddev: a.fit.latent_init,
        samples_per_iter: a.fit.samples_per_iter,
        seed: a.common.seed(),
    };
    let est = estimate_latent(&ckpt.params, &samples, &cfg)?;
    log::info!("objective {:.6}", est.objective);
    runtime::write_latent(
        &a.out_latent,
        &LatentFile {
            shape_id: None,
            latent: est.z.clone(),
            objective: Some(est.objective),
        },
    )?;
    if let Some(path) = &a.out_mesh {
        runtime::write_iso_mesh(path, &runtime::decode_mesh(&ckpt.params, &est.z, a.res)?)?;
    }
    Ok(())
}

pub fn complete(a: CompleteArgs) -> CliResult<()> {
    check_fit(&a.fit)?;
    if a.alpha < 0.0 {
        return Err(CliError::Config("--alpha must be non-negative".into()));
    }
    let ckpt = runtime::read_checkpoint(&a.checkpoint)?;
    let mut map = runtime::read_depth(&a.depth)?;
    for n in &mut map.normals {
        *n = n.try_normalize().unwrap_or(Vec3::ZERO);
    }
    let seed = a.common.seed();
    let map = perturb_depth(&map, a.alpha, derive_seed(seed, 1, 0))?;
    let obs = depth_to_observation(&map, a.eta, a.free_points, derive_seed(seed, 2, 0))?;
    let cfg = CompletionConfig {
        eta: a.eta,
        iterations: a.fit.iters,
        lr: a.fit.lr,
        lambda: a.fit.lambda,
        free_points_per_ray: a.free_points,
        init_stddev: a.fit.latent_init,
        samples_per_iter: a.fit.samples_per_iter,
        warmup_delta: (!a.no_warmup).then_some(a.warmup_delta),
        seed,
    };
    let est = complete_shape(&ckpt.params, &obs, &cfg)?;
    log::info!(
        "objective {:.6} over {} samples and {} free points",
        est.objective,
        obs.sdf_samples.len(),
        obs.free_points.len()
    );
    runtime::write_latent(
        &a.out_latent,
        &LatentFile {
            shape_id: None,
            latent: est.z.clone(),
            objective: Some(est.objective),
        },
    )?;
    if let Some(path) = &a.out_mesh {
        runtime::write_iso_mesh(path, &runtime::decode_mesh(&ckpt.params, &est.z, a.res)?)?;
    }
    Ok(())
}
