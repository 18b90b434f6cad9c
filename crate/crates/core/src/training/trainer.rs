use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::AdamState;
use super::batch::make_balanced_batch;
use super::config::{EpochLoss, LossRecord, TrainConfig};
use super::loss::{clamped_l1, clamped_l1_grad};
use super::objective::{accumulate, sample_points, ShapeQuery};
use crate::decoder::{DecoderParams, LatentCodebook, NetConfig, Network};
use crate::exec::{derive_seed, Stopwatch};
use crate::sampling::{SampleSet, SdfSample};
use crate::{Error, Result};

const BATCH_STREAM: u64 = 1;
const MASK_STREAM: u64 = 2;
const ORDER_STREAM: u64 = 3;
const CODE_STREAM: u64 = 4;

/// Output of auto-decoder training.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub params: DecoderParams<f32>,
    pub codebook: LatentCodebook<f32>,
    pub history: LossRecord,
}

/// Fits a decoder without latent input to one shape. Every epoch is one
/// Adam step on a fresh balanced batch.
pub fn train_single_shape(
    samples: &SampleSet,
    net: &NetConfig,
    cfg: &TrainConfig,
) -> Result<(DecoderParams<f32>, LossRecord)> {
    cfg.validate()?;
    if net.latent_dim != 0 {
        return Err(Error::invalid("single-shape training needs latent_dim = 0"));
    }
    let mut params = DecoderParams::<f32>::init(net, cfg.seed)?;
    let mut adam = AdamState::new(params.len());
    let lr = cfg.decoder_lr_for(1);
    let mut history = LossRecord::default();
    for epoch in 0..cfg.epochs {
        let clock = Stopwatch::start();
        let batch = make_balanced_batch(
            samples,
            cfg.samples_per_step,
            derive_seed(cfg.seed, BATCH_STREAM, epoch as u64),
        )?;
        let points = sample_points::<f32>(&batch);
        let w = 1.0 / batch.len() as f64;
        let grads = accumulate(
            &Network::new(&params),
            &[ShapeQuery {
                z: &[],
                points: &points,
            }],
            Some(derive_seed(cfg.seed, MASK_STREAM, epoch as u64)),
            true,
            |_, j, p| data_loss(&batch[j], p, cfg.delta, w),
        )?;
        adam.update(params.as_mut_slice(), &grads.params, lr * cfg.lr_scale(epoch))?;
        history.epochs.push(EpochLoss {
            epoch,
            sdf_loss: grads.loss[0],
            reg_loss: 0.0,
            seconds: clock.seconds(),
        });
        log::debug!("epoch {epoch}: sdf loss {:.6}", grads.loss[0]);
    }
    Ok((params, history))
}

#[inline]
fn data_loss(sample: &SdfSample, pred: f64, delta: f64, weight: f64) -> (f64, f64) {
    let s = sample.sdf as f64;
    (
        clamped_l1(pred, s, delta) * weight,
        clamped_l1_grad(pred, s, delta) * weight,
    )
}

/// Jointly optimizes decoder parameters and one latent code per shape.
///
/// Each epoch visits every shape once in a shuffled order, in steps of
/// `shapes_per_batch` shapes. A step minimizes the mean over its shapes of
/// (mean clamped-L1 loss on a balanced batch + `lambda * |z|^2`); only the
/// codes of the shapes in the step are updated.
pub fn train_auto_decoder(sets: &[SampleSet], net: &NetConfig, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    if sets.is_empty() {
        return Err(Error::EmptyInput("training shapes"));
    }
    if net.latent_dim == 0 {
        return Err(Error::invalid("auto-decoder training needs latent_dim >= 1"));
    }
    let ids: Vec<&String> = sets.iter().map(|s| &s.shape_id).collect();
    let mut codebook = LatentCodebook::<f32>::random(
        &ids,
        net.latent_dim,
        cfg.latent_init_stddev,
        derive_seed(cfg.seed, CODE_STREAM, 0),
    )?;
    let mut params = DecoderParams::<f32>::init(net, cfg.seed)?;
    let mut adam = AdamState::new(params.len());
    let mut code_adam: Vec<AdamState<f32>> = (0..sets.len()).map(|_| AdamState::new(net.latent_dim)).collect();
    let per_step = cfg.shapes_per_batch.min(sets.len());
    let lr = cfg.decoder_lr_for(per_step);
    let mut history = LossRecord::default();

    for epoch in 0..cfg.epochs {
        let clock = Stopwatch::start();
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(
            cfg.seed,
            ORDER_STREAM,
            epoch as u64,
        )));
        let batch_seed = derive_seed(cfg.seed, BATCH_STREAM, epoch as u64);
        let scale = cfg.lr_scale(epoch);
        let (mut sdf_sum, mut reg_sum) = (0.0, 0.0);
        for (step, group) in order.chunks(per_step).enumerate() {
            let batches = group
                .iter()
                .map(|&s| make_balanced_batch(&sets[s], cfg.samples_per_step, derive_seed(batch_seed, 0, s as u64)))
                .collect::<Result<Vec<_>>>()?;
            let points: Vec<Vec<[f32; 3]>> = batches.iter().map(|b| sample_points(b)).collect();
            let queries: Vec<ShapeQuery<'_, f32>> = group
                .iter()
                .zip(&points)
                .map(|(&s, p)| ShapeQuery {
                    z: codebook.code(s),
                    points: p,
                })
                .collect();
            let g = group.len() as f64;
            let grads = accumulate(
                &Network::new(&params),
                &queries,
                Some(derive_seed(cfg.seed, MASK_STREAM, ((epoch as u64) << 32) | step as u64)),
                true,
                |k, j, p| data_loss(&batches[k][j], p, cfg.delta, 1.0 / (g * batches[k].len() as f64)),
            )?;
            drop(queries);
            adam.update(params.as_mut_slice(), &grads.params, lr * scale)?;
            for (k, &s) in group.iter().enumerate() {
                let z = codebook.code_mut(s);
                let norm2: f64 = z.iter().map(|&v| (v as f64) * (v as f64)).sum();
                sdf_sum += grads.loss[k] * g;
                reg_sum += cfg.lambda * norm2;
                let dz: Vec<f32> = grads.latent[k]
                    .iter()
                    .zip(z.iter())
                    .map(|(&d, &zi)| d + (2.0 * cfg.lambda / g) as f32 * zi)
                    .collect();
                code_adam[s].update(z, &dz, cfg.latent_lr * scale)?;
            }
        }
        let n = sets.len() as f64;
        let record = EpochLoss {
            epoch,
            sdf_loss: sdf_sum / n,
            reg_loss: reg_sum / n,
            seconds: clock.seconds(),
        };
        log::debug!(
            "epoch {epoch}: sdf loss {:.6}, latent reg {:.3e}",
            record.sdf_loss,
            record.reg_loss
        );
        history.epochs.push(record);
    }
    Ok(TrainedModel {
        params,
        codebook,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AnalyticShape;
    use crate::Vec3;
    use rand::Rng;

    fn sphere_set(id: &str, radius: f64, n: usize, seed: u64) -> SampleSet {
        let shape = AnalyticShape::sphere(Vec3::ZERO, radius).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = radius + 0.2;
        let samples = (0..n).map(|_| {
            let p = Vec3::new(
                rng.random_range(-h..h),
                rng.random_range(-h..h),
                rng.random_range(-h..h),
            );
            SdfSample::new(p, shape.sdf(p))
        });
        SampleSet::new(id, samples).unwrap()
    }

    fn quick(epochs: usize) -> TrainConfig {
        TrainConfig {
            decoder_lr: Some(1e-3),
            samples_per_step: 256,
            epochs,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_epochs_returns_init() {
        let set = sphere_set("s", 0.5, 2000, 1);
        let net = NetConfig::new(0, 16, 3, &[]);
        let (params, history) = train_single_shape(&set, &net, &quick(0)).unwrap();
        assert_eq!(params, DecoderParams::init(&net, 0).unwrap());
        assert!(history.is_empty());
    }

    #[test]
    fn single_shape_loss_decreases() {
        let set = sphere_set("s", 0.5, 4000, 2);
        let net = NetConfig::new(0, 32, 3, &[]);
        let (_, history) = train_single_shape(&set, &net, &quick(150)).unwrap();
        assert_eq!(history.len(), 150);
        let first = history.first().unwrap().sdf_loss;
        let last: f64 = history.epochs[140..].iter().map(|e| e.sdf_loss).sum::<f64>() / 10.0;
        assert!(last < 0.5 * first, "{first} -> {last}");
        assert!(history.epochs.iter().all(|e| (0.0..=0.2).contains(&e.sdf_loss)));
    }

    #[test]
    fn single_shape_rejects_latent_input() {
        let set = sphere_set("s", 0.5, 100, 2);
        assert!(train_single_shape(&set, &NetConfig::new(2, 16, 3, &[]), &quick(1)).is_err());
    }

    #[test]
    fn auto_decoder_is_reproducible_and_learns() {
        let sets: Vec<SampleSet> = (0..4)
            .map(|i| sphere_set(&alloc::format!("s{i}"), 0.3 + 0.1 * i as f64, 3000, i))
            .collect();
        let net = NetConfig::new(4, 32, 3, &[]);
        let cfg = TrainConfig {
            shapes_per_batch: 2,
            ..quick(60)
        };
        let a = train_auto_decoder(&sets, &net, &cfg).unwrap();
        let b = train_auto_decoder(&sets, &net, &cfg).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.codebook, b.codebook);
        assert_eq!(a.history.len(), 60);
        let first = a.history.first().unwrap().objective();
        let last = a.history.last().unwrap().objective();
        assert!(last < first, "{first} -> {last}");
        assert_eq!(a.codebook.ids(), ["s0", "s1", "s2", "s3"]);
    }

    #[test]
    fn strong_regularizer_shrinks_codes() {
        let sets: Vec<SampleSet> = (0..2)
            .map(|i| sphere_set(&alloc::format!("s{i}"), 0.4, 1000, i))
            .collect();
        let net = NetConfig::new(3, 16, 3, &[]);
        let mut prev = f64::INFINITY;
        for epochs in [0, 5, 10, 20] {
            let cfg = TrainConfig {
                lambda: 1e4,
                latent_lr: 1e-4,
                latent_init_stddev: 0.1,
                ..quick(epochs)
            };
            let m = train_auto_decoder(&sets, &net, &cfg).unwrap();
            let norm: f64 = m
                .codebook
                .iter()
                .flat_map(|(_, z)| z.iter())
                .map(|&v| (v as f64).powi(2))
                .sum();
            assert!(norm < prev, "{norm} !< {prev}");
            prev = norm;
        }
    }

    #[test]
    fn auto_decoder_input_checks() {
        let net = NetConfig::new(2, 16, 3, &[]);
        assert!(matches!(
            train_auto_decoder(&[], &net, &quick(1)),
            Err(Error::EmptyInput(_))
        ));
        let set = sphere_set("s", 0.5, 100, 0);
        assert!(train_auto_decoder(core::slice::from_ref(&set), &NetConfig::new(0, 16, 3, &[]), &quick(1)).is_err());
        assert!(matches!(
            train_auto_decoder(
                &[set],
                &net,
                &TrainConfig {
                    samples_per_step: 10_000,
                    ..quick(1)
                }
            ),
            Err(Error::Imbalance { .. })
        ));
    }
}
