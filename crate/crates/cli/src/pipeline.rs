//! End-to-end runs driven by a `key = value` config file.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use sdfforge::decoder::NetConfig;
use sdfforge::derive_seed;
use sdfforge::inference::{estimate_latent, EstimateConfig};
use sdfforge::sampling::PrepConfig;
use sdfforge::training::{train_auto_decoder, TrainConfig};

use crate::cli::PipelineArgs;
use crate::config::KeyValues;
use crate::error::{CliError, CliResult};
use crate::family::{Family, FamilyKind};
use crate::formats::{Checkpoint, LatentFile};
use crate::manifest::{Manifest, Split};
use crate::runtime;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub family: Family,
    pub prep: PrepConfig,
    pub net: NetConfig,
    pub train: TrainConfig,
    pub embed: EstimateConfig,
    pub extract_res: usize,
    pub eval_points: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Parses a config; every key is optional and unknown keys are errors.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut kv = KeyValues::parse(text)?;
        let seed = kv.take_or("seed", 0u64)?;
        let kind: FamilyKind = kv
            .take::<String>("family")?
            .map(|s| s.parse())
            .transpose()
            .map_err(CliError::Config)?
            .unwrap_or(FamilyKind::Boxes);
        let family =
            Family::new(kind, kv.take_or("count", 20)?, kv.take_or("held_out", 4)?).map_err(CliError::Config)?;
        let defaults = PrepConfig::default();
        let prep = PrepConfig {
            n_surface: kv.take_or("n_surface", 10_000)?,
            n_uniform: kv.take_or("n_uniform", 2_000)?,
            perturb_variances: kv.take_list("variances")?.unwrap_or(defaults.perturb_variances.clone()),
            ..defaults
        };
        let mut net = NetConfig::new(
            kv.take_or("latent_dim", 8)?,
            kv.take_or("hidden", 128)?,
            kv.take_or("layers", 4)?,
            &kv.take_list("skip")?.unwrap_or_default(),
        );
        net.dropout_rate = kv.take_or("dropout", 0.0)?;
        let td = TrainConfig::default();
        let train = TrainConfig {
            delta: kv.take_or("delta", td.delta)?,
            decoder_lr: kv.take("decoder_lr")?,
            latent_lr: kv.take_or("latent_lr", td.latent_lr)?,
            lambda: kv.take_or("lambda", td.lambda)?,
            samples_per_step: kv.take_or("samples_per_step", 1024)?,
            shapes_per_batch: kv.take_or("shapes_per_batch", 5)?,
            epochs: kv.take_or("epochs", 1500)?,
            latent_init_stddev: kv.take_or("latent_init", td.latent_init_stddev)?,
            seed: derive_seed(seed, 10, 0),
            ..td
        };
        let embed = EstimateConfig {
            lambda: train.lambda,
            iterations: kv.take_or("embed_iters", 400)?,
            lr: kv.take_or("embed_lr", 5e-3)?,
            delta: train.delta,
            init_stddev: train.latent_init_stddev,
            samples_per_iter: kv.take("embed_samples")?,
            seed: derive_seed(seed, 11, 0),
        };
        let cfg = PipelineConfig {
            family,
            prep,
            net,
            train,
            embed,
            extract_res: kv.take_or("extract_res", 64)?,
            eval_points: kv.take_or("eval_points", 2_000)?,
            seed,
            out_dir: kv.take::<String>("out_dir")?.map(PathBuf::from),
        };
        kv.finish()?;
        cfg.prep.validate()?;
        cfg.net.validate()?;
        cfg.train.validate()?;
        if cfg.embed.iterations == 0 || cfg.extract_res < 2 || cfg.eval_points == 0 {
            return Err(CliError::Config(
                "embed_iters, eval_points must be positive and extract_res at least 2".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShapeMetric {
    pub shape_id: String,
    pub split: Split,
    pub chamfer: f64,
    /// Final objective of the latent fit (held-out shapes only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTime {
    pub stage: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub manifest: PathBuf,
    pub checkpoint: PathBuf,
    pub initial_objective: f64,
    pub final_sdf_loss: f64,
    pub final_reg_loss: f64,
    pub final_objective: f64,
    pub metrics: Vec<ShapeMetric>,
    pub mean_train_chamfer: f64,
    pub mean_test_chamfer: Option<f64>,
    pub stages: Vec<StageTime>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn stage<T>(name: &'static str, times: &mut Vec<StageTime>, f: impl FnOnce() -> CliResult<T>) -> CliResult<T> {
    let clock = Instant::now();
    let out = f().map_err(|e| e.in_stage(name))?;
    let seconds = clock.elapsed().as_secs_f64();
    log::info!("stage {name} finished in {seconds:.1}s");
    times.push(StageTime { stage: name, seconds });
    Ok(out)
}

/// Runs generate, train, reconstruct and embed, writing artifacts and
/// `summary.json` into `out_dir`.
pub fn run(cfg: &PipelineConfig, out_dir: &Path) -> CliResult<Summary> {
    let mut times = Vec::new();
    let manifest_path = stage("generate", &mut times, || {
        runtime::generate_family(&cfg.family, &cfg.prep, derive_seed(cfg.seed, 12, 0), out_dir)
    })?;
    let manifest = Manifest::load(&manifest_path)?;
    let checkpoint = out_dir.join("model.dsdf");
    let model = stage("train", &mut times, || {
        let sets = manifest
            .split(Split::Train)
            .map(|r| manifest.load_samples(r))
            .collect::<CliResult<Vec<_>>>()?;
        let model = train_auto_decoder(&sets, &cfg.net, &cfg.train)?;
        runtime::write_loss_csv(&out_dir.join("loss.csv"), &model.history)?;
        let ckpt = Checkpoint {
            params: model.params.clone(),
            codebook: model.codebook.clone(),
        };
        runtime::write_checkpoint(&checkpoint, &ckpt)?;
        Ok(model)
    })?;
    let gt_mesh = |shape_id: &str| -> CliResult<_> {
        let record = manifest.get(shape_id).expect("shape from manifest");
        let rel = record
            .gt_mesh
            .as_deref()
            .ok_or_else(|| CliError::Data(format!("{shape_id} has no ground-truth mesh")))?;
        runtime::read_mesh(&manifest.resolve(rel))
    };
    let eval_seed = derive_seed(cfg.seed, 13, 0);
    let mut metrics = stage("reconstruct", &mut times, || {
        let mut out = Vec::new();
        for (id, z) in model.codebook.iter() {
            let mesh = runtime::decode_mesh(&model.params, z, cfg.extract_res)?;
            runtime::write_iso_mesh(&out_dir.join("recon").join(format!("{id}.obj")), &mesh)?;
            let chamfer = runtime::mesh_chamfer(&mesh.to_mesh(), &gt_mesh(id)?, cfg.eval_points, eval_seed)?;
            out.push(ShapeMetric {
                shape_id: id.to_string(),
                split: Split::Train,
                chamfer,
                objective: None,
            });
        }
        Ok(out)
    })?;
    let embedded = stage("embed", &mut times, || {
        let mut out = Vec::new();
        for (i, record) in manifest.split(Split::Test).enumerate() {
            let set = manifest.load_samples(record)?;
            let samples: Vec<_> = set.iter().copied().collect();
            let est_cfg = EstimateConfig {
                seed: derive_seed(cfg.embed.seed, 0, i as u64),
                ..cfg.embed.clone()
            };
            let est = estimate_latent(&model.params, &samples, &est_cfg)?;
            let id = &record.shape_id;
            runtime::write_latent(
                &out_dir.join("embed").join(format!("{id}.json")),
                &LatentFile {
                    shape_id: Some(id.clone()),
                    latent: est.z.clone(),
                    objective: Some(est.objective),
                },
            )?;
            let mesh = runtime::decode_mesh(&model.params, &est.z, cfg.extract_res)?;
            runtime::write_iso_mesh(&out_dir.join("embed").join(format!("{id}.obj")), &mesh)?;
            let chamfer = runtime::mesh_chamfer(&mesh.to_mesh(), &gt_mesh(id)?, cfg.eval_points, eval_seed)?;
            out.push(ShapeMetric {
                shape_id: id.clone(),
                split: Split::Test,
                chamfer,
                objective: Some(est.objective),
            });
        }
        Ok(out)
    })?;
    metrics.extend(embedded);
    let first = model.history.first().copied();
    let last = model.history.last().copied();
    let summary = Summary {
        seed: cfg.seed,
        manifest: manifest_path,
        checkpoint,
        initial_objective: first.map_or(f64::NAN, |e| e.objective()),
        final_sdf_loss: last.map_or(f64::NAN, |e| e.sdf_loss),
        final_reg_loss: last.map_or(f64::NAN, |e| e.reg_loss),
        final_objective: last.map_or(f64::NAN, |e| e.objective()),
        mean_train_chamfer: mean(metrics.iter().filter(|m| m.split == Split::Train).map(|m| m.chamfer))
            .unwrap_or(f64::NAN),
        mean_test_chamfer: mean(metrics.iter().filter(|m| m.split == Split::Test).map(|m| m.chamfer)),
        metrics,
        stages: times,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Data(e.to_string()))?;
    runtime::write_bytes(&out_dir.join("summary.json"), format!("{json}\n").as_bytes())?;
    Ok(summary)
}

pub fn run_command(a: PipelineArgs) -> CliResult<()> {
    let mut cfg = PipelineConfig::load(&a.config)?;
    if let Some(seed) = a.common.seed {
        cfg.seed = seed;
        cfg.train.seed = derive_seed(seed, 10, 0);
        cfg.embed.seed = derive_seed(seed, 11, 0);
    }
    let base = a.config.parent().unwrap_or(Path::new("."));
    let out_dir = match (&a.out_dir, &cfg.out_dir) {
        (Some(dir), _) => dir.clone(),
        (None, Some(dir)) => base.join(dir),
        (None, None) => {
            return Err(CliError::Config(
                "no output directory: pass --out-dir or set out_dir".into(),
            ))
        }
    };
    runtime::create_dir(&out_dir)?;
    let summary = run(&cfg, &out_dir)?;
    println!("{}", out_dir.join("summary.json").display());
    log::info!(
        "mean chamfer: train {:.3e}, test {}",
        summary.mean_train_chamfer,
        summary.mean_test_chamfer.map_or("n/a".into(), |v| format!("{v:.3e}"))
    );
    Ok(())
}
