use sdfforge::decoder::{LatentCodebook, NetConfig};
use sdfforge::training::{train_auto_decoder, train_single_shape, TrainConfig};

use super::net_config;
use crate::cli::{TrainArgs, TrainSingleArgs};
use crate::error::{CliError, CliResult};
use crate::formats::Checkpoint;
use crate::manifest::{Manifest, Split};
use crate::runtime;

pub fn train(a: TrainArgs) -> CliResult<()> {
    let manifest = Manifest::load(&a.manifest)?;
    let sets = manifest
        .split(Split::Train)
        .map(|r| manifest.load_samples(r))
        .collect::<CliResult<Vec<_>>>()?;
    if sets.is_empty() {
        return Err(CliError::Data("manifest has no training shapes".into()));
    }
    let cfg = TrainConfig {
        delta: a.optim.delta,
        decoder_lr: a.decoder_lr,
        latent_lr: a.latent_lr,
        lambda: a.lambda,
        samples_per_step: a.optim.samples_per_step,
        shapes_per_batch: a.shapes_per_batch,
        epochs: a.optim.epochs,
        latent_init_stddev: a.latent_init,
        seed: a.common.seed(),
        ..TrainConfig::default()
    };
    let model = train_auto_decoder(&sets, &net_config(&a.net), &cfg)?;
    if let Some(path) = &a.loss_csv {
        runtime::write_loss_csv(path, &model.history)?;
    }
    if let Some(last) = model.history.last() {
        log::info!("final sdf loss {:.6}, regularizer {:.3e}", last.sdf_loss, last.reg_loss);
    }
    runtime::write_checkpoint(
        &a.out,
        &Checkpoint {
            params: model.params,
            codebook: model.codebook,
        },
    )
}

pub fn train_single(a: TrainSingleArgs) -> CliResult<()> {
    let set = runtime::read_samples(&a.samples, "shape")?;
    let net = NetConfig::new(0, a.hidden, a.layers, &a.skip);
    let cfg = TrainConfig {
        delta: a.optim.delta,
        decoder_lr: Some(a.lr),
        samples_per_step: a.optim.samples_per_step,
        epochs: a.optim.epochs,
        seed: a.common.seed(),
        ..TrainConfig::default()
    };
    let (params, history) = train_single_shape(&set, &net, &cfg)?;
    if let Some(path) = &a.loss_csv {
        runtime::write_loss_csv(path, &history)?;
    }
    runtime::write_checkpoint(
        &a.out,
        &Checkpoint {
            params,
            codebook: LatentCodebook::new(0),
        },
    )
}
