mod data;
mod eval;
mod fit;
mod surface;
mod train;

pub use eval::{evaluate_meshes, MetricRequest};

use sdfforge::decoder::NetConfig;
use sdfforge::geometry::PinholeCamera;
use sdfforge::sampling::PrepConfig;

use crate::cli::{CameraArgs, Command, LatentSource, NetArgs, SamplingArgs};
use crate::error::{CliError, CliResult};
use crate::formats::Checkpoint;
use crate::runtime;

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::GenFamily(a) => data::gen_family(a),
        Command::Prepare(a) => data::prepare(a),
        Command::Depth(a) => data::depth(a),
        Command::Train(a) => train::train(a),
        Command::TrainSingle(a) => train::train_single(a),
        Command::Embed(a) => fit::embed(a),
        Command::Complete(a) => fit::complete(a),
        Command::Extract(a) => surface::extract(a),
        Command::Render(a) => surface::render(a),
        Command::Interp(a) => surface::interp(a),
        Command::Eval(a) => eval::eval(a),
        Command::Pipeline(a) => crate::pipeline::run_command(a),
        Command::Info(a) => surface::info(a),
    }
}

fn prep_config(s: &SamplingArgs) -> PrepConfig {
    PrepConfig {
        n_surface: s.n_surface,
        n_uniform: s.n_uniform,
        perturb_variances: s.variances.clone(),
        ..PrepConfig::default()
    }
}

fn net_config(n: &NetArgs) -> NetConfig {
    let mut cfg = NetConfig::new(n.latent_dim, n.hidden, n.layers, &n.skip);
    cfg.dropout_rate = n.dropout;
    cfg
}

fn camera(c: &CameraArgs) -> CliResult<PinholeCamera> {
    if !(c.fov > 0.0 && c.fov < 180.0) {
        return Err(CliError::Config(format!(
            "field of view must be in (0, 180) degrees, got {}",
            c.fov
        )));
    }
    Ok(PinholeCamera::look_at(
        c.camera,
        c.target,
        c.fov.to_radians(),
        c.width,
        c.height,
    )?)
}

fn latent(ckpt: &Checkpoint, src: &LatentSource) -> CliResult<Vec<f32>> {
    let z = match (&src.shape_id, &src.latent_file) {
        (Some(id), _) => ckpt
            .codebook
            .get(id)
            .map(<[f32]>::to_vec)
            .ok_or_else(|| CliError::Data(format!("checkpoint has no code for shape {id:?}")))?,
        (None, Some(path)) => runtime::read_latent(path)?.latent,
        (None, None) => return Err(CliError::Config("pass --shape-id or --latent-file".into())),
    };
    let dim = ckpt.params.config().latent_dim;
    if z.len() != dim {
        return Err(CliError::Data(format!(
            "latent has {} entries, network expects {dim}",
            z.len()
        )));
    }
    Ok(z)
}
