use serde_json::json;

use sdfforge::surfacing::{interpolate_latents, render as render_image, RenderConfig, TraceConfig};

use super::{camera, latent};
use crate::cli::{ExtractArgs, InfoArgs, InterpArgs, RenderArgs};
use crate::error::{CliError, CliResult};
use crate::formats::LatentFile;
use crate::runtime;

pub fn extract(a: ExtractArgs) -> CliResult<()> {
    let ckpt = runtime::read_checkpoint(&a.checkpoint)?;
    let z = latent(&ckpt, &a.latent)?;
    let mesh = runtime::decode_mesh(&ckpt.params, &z, a.res)?;
    if mesh.is_empty() {
        log::warn!("decoded shape has no zero crossing inside the bounds");
    }
    runtime::write_iso_mesh(&a.out, &mesh)
}

pub fn render(a: RenderArgs) -> CliResult<()> {
    let ckpt = runtime::read_checkpoint(&a.checkpoint)?;
    let z = latent(&ckpt, &a.latent)?;
    let cfg = RenderConfig {
        light: a.light,
        trace: TraceConfig {
            max_steps: a.max_steps,
            surface_eps: a.surface_eps,
            ..TraceConfig::default()
        },
        ..RenderConfig::default()
    };
    let image = render_image(&ckpt.params, &z, &camera(&a.camera)?, &cfg)?;
    runtime::write_bytes(&a.out, &image.to_ppm())
}

/// Writes `interp_XX.obj` and `interp_XX.json` (the code) per step and
/// prints one JSON line with the occupancy of each step.
pub fn interp(a: InterpArgs) -> CliResult<()> {
    if a.steps == 0 {
        return Err(CliError::Config("--steps must be at least 1".into()));
    }
    let ckpt = runtime::read_checkpoint(&a.checkpoint)?;
    let code = |id: &str| {
        ckpt.codebook
            .get(id)
            .map(<[f32]>::to_vec)
            .ok_or_else(|| CliError::Data(format!("checkpoint has no code for shape {id:?}")))
    };
    let (za, zb) = (code(&a.a)?, code(&a.b)?);
    runtime::create_dir(&a.out_dir)?;
    let mut steps = Vec::new();
    for k in 0..=a.steps {
        let t = k as f64 / a.steps as f64;
        let z = interpolate_latents(&za, &zb, t)?;
        let grid = sdfforge::surfacing::evaluate_grid(&ckpt.params, &z, a.res, runtime::extraction_bounds())?;
        let occupancy = grid.values.iter().filter(|v| **v < 0.0).count();
        let mesh = runtime::decode_mesh(&ckpt.params, &z, a.res)?;
        runtime::write_iso_mesh(&a.out_dir.join(format!("interp_{k:02}.obj")), &mesh)?;
        runtime::write_latent(
            &a.out_dir.join(format!("interp_{k:02}.json")),
            &LatentFile {
                shape_id: None,
                latent: z,
                objective: None,
            },
        )?;
        steps.push(json!({ "t": t, "occupancy": occupancy, "triangles": mesh.triangles.len() }));
    }
    println!("{}", json!({ "a": a.a, "b": a.b, "steps": steps }));
    Ok(())
}

pub fn info(a: InfoArgs) -> CliResult<()> {
    let ckpt = runtime::read_checkpoint(&a.checkpoint)?;
    let cfg = ckpt.params.config();
    let out = json!({
        "latent_dim": cfg.latent_dim,
        "hidden_width": cfg.hidden_width,
        "n_layers": cfg.n_layers,
        "skip_layers": cfg.skip_layers,
        "dropout_rate": cfg.dropout_rate,
        "parameters": ckpt.params.len(),
        "checksum": format!("{:016x}", ckpt.params.checksum()),
        "shapes": ckpt.codebook.ids(),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&out).map_err(|e| CliError::Data(e.to_string()))?
    );
    Ok(())
}
