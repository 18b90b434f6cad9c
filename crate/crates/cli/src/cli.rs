//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sdfforge::Vec3;

use crate::family::FamilyKind;

#[derive(Debug, Parser)]
#[command(
    name = "sdfforge",
    version,
    about = "Train, fit, extract and evaluate neural signed distance fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags every subcommand accepts.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Base random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "SDFFORGE_THREADS", default_value_t = 0)]
    pub threads: usize,
}

impl Common {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a procedural shape family with exact SDF samples and ground-truth meshes.
    GenFamily(GenFamilyArgs),
    /// Normalize OBJ meshes and compute SDF samples from their visible shell.
    Prepare(PrepareArgs),
    /// Render a synthetic depth map of a mesh.
    Depth(DepthArgs),
    /// Jointly train a decoder and per-shape latent codes.
    Train(TrainArgs),
    /// Fit a latent-free decoder to a single shape.
    TrainSingle(TrainSingleArgs),
    /// Estimate a latent code for a set of SDF samples.
    Embed(EmbedArgs),
    /// Complete a shape from a single depth view.
    Complete(CompleteArgs),
    /// Extract a mesh from a decoded shape.
    Extract(ExtractArgs),
    /// Sphere-trace a decoded shape into a PPM image.
    Render(RenderArgs),
    /// Extract meshes along the line between two latent codes.
    Interp(InterpArgs),
    /// Compare a generated mesh against a ground-truth mesh.
    Eval(EvalArgs),
    /// Run generation, training, embedding and evaluation from a config file.
    Pipeline(PipelineArgs),
    /// Print checkpoint configuration.
    Info(InfoArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::GenFamily(a) => &a.common,
            Command::Prepare(a) => &a.common,
            Command::Depth(a) => &a.common,
            Command::Train(a) => &a.common,
            Command::TrainSingle(a) => &a.common,
            Command::Embed(a) => &a.common,
            Command::Complete(a) => &a.common,
            Command::Extract(a) => &a.common,
            Command::Render(a) => &a.common,
            Command::Interp(a) => &a.common,
            Command::Eval(a) => &a.common,
            Command::Pipeline(a) => &a.common,
            Command::Info(a) => &a.common,
        }
    }
}

pub fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x, y, z] if v.iter().all(|c| c.is_finite()) => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("expected three finite comma-separated numbers, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct GenFamilyArgs {
    #[arg(long, default_value = "boxes")]
    pub family: FamilyKind,
    /// Training members.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Held-out members between training members.
    #[arg(long, default_value_t = 4)]
    pub held_out: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    /// Near-surface samples per perturbation variance.
    #[arg(long, default_value_t = 10_000)]
    pub n_surface: usize,
    /// Samples drawn uniformly in the unit ball.
    #[arg(long, default_value_t = 2_000)]
    pub n_uniform: usize,
    /// Perturbation variances (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = [0.0025, 0.00025])]
    pub variances: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Input OBJ meshes.
    #[arg(required = true)]
    pub meshes: Vec<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Virtual cameras used for shell extraction.
    #[arg(long, default_value_t = 100)]
    pub cameras: usize,
    /// Virtual depth map resolution.
    #[arg(long, default_value_t = 256)]
    pub depth_res: u32,
    /// Reject meshes whose double-sided triangle fraction exceeds this.
    #[arg(long, default_value_t = 0.02)]
    pub reject_fraction: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CameraArgs {
    /// Camera position.
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,2")]
    pub camera: Vec3,
    /// Point the camera looks at.
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,0")]
    pub target: Vec3,
    /// Vertical field of view in degrees.
    #[arg(long, default_value_t = 60.0)]
    pub fov: f64,
    #[arg(long, default_value_t = 128)]
    pub width: u32,
    #[arg(long, default_value_t = 128)]
    pub height: u32,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[command(flatten)]
    pub camera: CameraArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct NetArgs {
    #[arg(long, default_value_t = 256)]
    pub latent_dim: usize,
    /// Number of fully connected layers, output layer included.
    #[arg(long, default_value_t = 8)]
    pub layers: usize,
    #[arg(long, default_value_t = 512)]
    pub hidden: usize,
    /// Layers whose output is concatenated with the network input.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize])]
    pub skip: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub dropout: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OptimArgs {
    /// Clamp distance.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    /// Samples per shape per step.
    #[arg(long, default_value_t = 16384)]
    pub samples_per_step: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub optim: OptimArgs,
    /// Latent regularizer weight.
    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,
    #[arg(long, default_value_t = 64)]
    pub shapes_per_batch: usize,
    /// Decoder learning rate (default 1e-5 times the shapes per step).
    #[arg(long)]
    pub decoder_lr: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub latent_lr: f64,
    #[arg(long, default_value_t = 0.01)]
    pub latent_init: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch loss history.
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TrainSingleArgs {
    /// SDFS sample file.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub layers: usize,
    #[arg(long, default_value_t = 128)]
    pub hidden: usize,
    #[arg(long, value_delimiter = ',')]
    pub skip: Vec<usize>,
    #[command(flatten)]
    pub optim: OptimArgs,
    #[arg(long, default_value_t = 5e-4)]
    pub lr: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct LatentSource {
    /// Use a code stored in the checkpoint.
    #[arg(long)]
    pub shape_id: Option<String>,
    /// Use a code from a latent JSON file.
    #[arg(long)]
    pub latent_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 800)]
    pub iters: usize,
    #[arg(long, default_value_t = 5e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,
    /// Random subset of points per iteration (all when omitted).
    #[arg(long)]
    pub samples_per_iter: Option<usize>,
    /// Stddev of the initial latent code.
    #[arg(long, default_value_t = 0.01)]
    pub latent_init: f64,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// SDFS sample file to explain.
    #[arg(long)]
    pub samples: PathBuf,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long)]
    pub out_latent: PathBuf,
    /// Also extract the fitted shape.
    #[arg(long)]
    pub out_mesh: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// DPTH depth file.
    #[arg(long)]
    pub depth: PathBuf,
    /// Offset of the two samples along each observed normal.
    #[arg(long, default_value_t = 0.005)]
    pub eta: f64,
    /// Inverse-depth noise stddev applied before fitting.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Free-space points per observed ray.
    #[arg(long, default_value_t = 2)]
    pub free_points: usize,
    /// Initial clamp distance, shrunk to eta over the first half of the iterations.
    #[arg(long, default_value_t = 1.0)]
    pub warmup_delta: f64,
    /// Clamp at eta from the first iteration.
    #[arg(long)]
    pub no_warmup: bool,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long)]
    pub out_latent: PathBuf,
    #[arg(long)]
    pub out_mesh: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[command(flatten)]
    pub latent: LatentSource,
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[command(flatten)]
    pub latent: LatentSource,
    #[command(flatten)]
    pub camera: CameraArgs,
    /// Direction towards the light (default: from the camera).
    #[arg(long, value_parser = parse_vec3)]
    pub light: Option<Vec3>,
    #[arg(long, default_value_t = 200)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub surface_eps: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// First shape id.
    #[arg(long)]
    pub a: String,
    /// Second shape id.
    #[arg(long)]
    pub b: String,
    /// Number of intervals; meshes are written for steps + 1 values of t.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gen: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Any of chamfer, emd, acc, comp, cos.
    #[arg(long, value_delimiter = ',', default_value = "chamfer,emd,acc,comp,cos")]
    pub metrics: Vec<String>,
    #[arg(long, default_value_t = 30_000)]
    pub n_chamfer: usize,
    #[arg(long, default_value_t = 500)]
    pub n_emd: usize,
    /// Generated-surface points for accuracy.
    #[arg(long, default_value_t = 1_000)]
    pub n_acc: usize,
    /// Ground-truth points for completion.
    #[arg(long, default_value_t = 1_000)]
    pub n_comp: usize,
    /// Ground-truth points for normal consistency.
    #[arg(long, default_value_t = 2_500)]
    pub n_cos: usize,
    /// Completion distance threshold.
    #[arg(long, default_value_t = 0.01)]
    pub comp_delta: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// `key = value` run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `out_dir` in the config).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[command(flatten)]
    pub common: Common,
}
