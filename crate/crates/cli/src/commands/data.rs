use std::collections::HashSet;

use sdfforge::derive_seed;
use sdfforge::geometry::{normalize_to_unit_sphere, ShellOracle};
use sdfforge::sampling::{accept_mesh, extract_shell, generate_samples_with, render_depth};

use super::{camera, prep_config};
use crate::cli::{DepthArgs, GenFamilyArgs, PrepareArgs};
use crate::error::{CliError, CliResult};
use crate::family::Family;
use crate::manifest::{prep_hash, Manifest, Record, Source, Split};
use crate::runtime;

pub fn gen_family(a: GenFamilyArgs) -> CliResult<()> {
    let family = Family::new(a.family, a.count, a.held_out).map_err(CliError::Config)?;
    let prep = prep_config(&a.sampling);
    prep.validate()?;
    let path = runtime::generate_family(&family, &prep, a.common.seed(), &a.out_dir)?;
    println!("{}", path.display());
    Ok(())
}

pub fn prepare(a: PrepareArgs) -> CliResult<()> {
    let prep = sdfforge::sampling::PrepConfig {
        n_cameras: a.cameras,
        depth_resolution: a.depth_res,
        double_sided_reject_fraction: a.reject_fraction,
        ..super::prep_config(&a.sampling)
    };
    prep.validate()?;
    let seed = a.common.seed();
    runtime::create_dir(&a.out_dir)?;
    let mut manifest = Manifest::new(&a.out_dir);
    let mut ids = HashSet::new();
    for (i, path) in a.meshes.iter().enumerate() {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| CliError::Config(format!("cannot derive a shape id from {}", path.display())))?
            .to_string();
        if !ids.insert(id.clone()) {
            return Err(CliError::Config(format!("two inputs map to shape id {id:?}")));
        }
        let mesh = runtime::read_mesh(path)?;
        let (normalized, _) = normalize_to_unit_sphere(&mesh).map_err(|e| CliError::format(path, e.to_string()))?;
        let shell = extract_shell(&normalized, &prep).map_err(|e| CliError::format(path, e.to_string()))?;
        if !accept_mesh(shell.double_sided_fraction, &prep) {
            log::warn!(
                "skipping {}: {:.1}% of triangles are seen from both sides",
                path.display(),
                100.0 * shell.double_sided_fraction
            );
            continue;
        }
        let oracle = ShellOracle::new(shell.points)?;
        let set = generate_samples_with(&normalized, &oracle, &id, &prep, derive_seed(seed, 0, i as u64))?;
        let samples = format!("samples/{id}.sdfs");
        let gt = format!("meshes/{id}.obj");
        runtime::write_samples(&a.out_dir.join(&samples), &set)?;
        runtime::write_mesh(&a.out_dir.join(&gt), &normalized)?;
        manifest.records.push(Record {
            shape_id: id,
            samples,
            n_positive: set.positive.len(),
            n_negative: set.negative.len(),
            source: Source::Mesh {
                path: path.display().to_string(),
            },
            prep_hash: prep_hash(&prep, seed),
            split: Split::Train,
            gt_mesh: Some(gt),
            double_sided_fraction: Some(shell.double_sided_fraction),
        });
    }
    if manifest.records.is_empty() {
        return Err(CliError::Data("every input mesh was rejected".into()));
    }
    let path = a.out_dir.join("manifest.jsonl");
    manifest.save(&path)?;
    println!("{}", path.display());
    Ok(())
}

pub fn depth(a: DepthArgs) -> CliResult<()> {
    let mesh = runtime::read_mesh(&a.mesh)?;
    let map = render_depth(&mesh, &camera(&a.camera)?);
    if map.hit_count() == 0 {
        log::warn!("the mesh is not visible from this camera");
    }
    runtime::write_depth(&a.out, &map)
}
