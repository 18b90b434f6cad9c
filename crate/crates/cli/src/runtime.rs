//! File helpers and the experiment building blocks shared by subcommands.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use sdfforge::geometry::{Aabb, TriangleMesh};
use sdfforge::metrics::{chamfer, sample_points};
use sdfforge::sampling::{generate_samples_with, PrepConfig};
use sdfforge::surfacing::{extract_mesh, IsoMesh};
use sdfforge::{derive_seed, Vec3};

use crate::error::{CliError, CliResult};
use crate::family::Family;
use crate::formats::{self, Checkpoint, FormatError};
use crate::manifest::{prep_hash, Manifest, Record, Source, Split};

/// Extraction bounds for decoded shapes.
pub fn extraction_bounds() -> Aabb {
    Aabb::cube(1.0)
}

fn format_err(path: &Path) -> impl FnOnce(FormatError) -> CliError + '_ {
    move |e| match e {
        FormatError::Io(io) => CliError::io(path, io),
        FormatError::Invalid(msg) => CliError::format(path, msg),
    }
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn read_mesh(path: &Path) -> CliResult<TriangleMesh> {
    formats::read_obj(open(path)?).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn write_iso_mesh(path: &Path, mesh: &IsoMesh) -> CliResult<()> {
    formats::write_obj(create(path)?, &mesh.vertices, Some(&mesh.normals), &mesh.triangles)
        .map_err(|e| CliError::io(path, e))
}

pub fn write_mesh(path: &Path, mesh: &TriangleMesh) -> CliResult<()> {
    formats::write_obj(create(path)?, &mesh.vertices, None, &mesh.triangles).map_err(|e| CliError::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> CliResult<Checkpoint> {
    formats::read_checkpoint(open(path)?).map_err(format_err(path))
}

pub fn write_checkpoint(path: &Path, ckpt: &Checkpoint) -> CliResult<()> {
    formats::write_checkpoint(create(path)?, ckpt).map_err(format_err(path))
}

pub fn read_samples(path: &Path, shape_id: &str) -> CliResult<sdfforge::sampling::SampleSet> {
    formats::read_samples(open(path)?, shape_id).map_err(format_err(path))
}

pub fn write_samples(path: &Path, set: &sdfforge::sampling::SampleSet) -> CliResult<()> {
    formats::write_samples(create(path)?, set).map_err(format_err(path))
}

pub fn read_depth(path: &Path) -> CliResult<sdfforge::sampling::DepthMap> {
    formats::read_depth(open(path)?).map_err(format_err(path))
}

pub fn write_depth(path: &Path, map: &sdfforge::sampling::DepthMap) -> CliResult<()> {
    formats::write_depth(create(path)?, map).map_err(format_err(path))
}

pub fn read_latent(path: &Path) -> CliResult<formats::LatentFile> {
    formats::read_latent(open(path)?).map_err(format_err(path))
}

pub fn write_latent(path: &Path, latent: &formats::LatentFile) -> CliResult<()> {
    formats::write_latent(create(path)?, latent).map_err(format_err(path))
}

pub fn write_loss_csv(path: &Path, record: &sdfforge::training::LossRecord) -> CliResult<()> {
    formats::write_loss_csv(create(path)?, record).map_err(format_err(path))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes sample sets and ground-truth meshes for every family member, plus
/// `manifest.jsonl`, under `out_dir`. Returns the manifest path.
pub fn generate_family(family: &Family, prep: &PrepConfig, seed: u64, out_dir: &Path) -> CliResult<PathBuf> {
    create_dir(&out_dir.join("samples"))?;
    create_dir(&out_dir.join("meshes"))?;
    let hash = prep_hash(prep, seed);
    let mut manifest = Manifest::new(out_dir);
    for (i, member) in family.members().iter().enumerate() {
        let gt = member.gt_mesh()?;
        let set = generate_samples_with(
            &gt,
            &member.shape,
            &member.shape_id,
            prep,
            derive_seed(seed, 0, i as u64),
        )?;
        let samples = format!("samples/{}.sdfs", member.shape_id);
        let mesh = format!("meshes/{}.obj", member.shape_id);
        write_samples(&out_dir.join(&samples), &set)?;
        write_mesh(&out_dir.join(&mesh), &gt)?;
        log::info!(
            "{}: {} samples ({} negative)",
            member.shape_id,
            set.len(),
            set.negative.len()
        );
        manifest.records.push(Record {
            shape_id: member.shape_id.clone(),
            samples,
            n_positive: set.positive.len(),
            n_negative: set.negative.len(),
            source: Source::Analytic {
                descriptor: member.descriptor(),
            },
            prep_hash: hash.clone(),
            split: if member.held_out { Split::Test } else { Split::Train },
            gt_mesh: Some(mesh),
            double_sided_fraction: None,
        });
    }
    let path = out_dir.join("manifest.jsonl");
    manifest.save(&path)?;
    Ok(path)
}

/// Chamfer between point samples of two meshes; an empty generated mesh
/// scores infinity.
pub fn mesh_chamfer(generated: &TriangleMesh, gt: &TriangleMesh, n: usize, seed: u64) -> CliResult<f64> {
    if generated.is_empty() || generated.surface_area() <= 0.0 {
        log::warn!("generated mesh is empty; chamfer is infinite");
        return Ok(f64::INFINITY);
    }
    let a: Vec<Vec3> = sample_points(generated, n, derive_seed(seed, 1, 0))?
        .into_iter()
        .map(|p| p.position)
        .collect();
    let b: Vec<Vec3> = sample_points(gt, n, derive_seed(seed, 1, 1))?
        .into_iter()
        .map(|p| p.position)
        .collect();
    Ok(chamfer(&a, &b)?)
}

/// Marching cubes of the decoded shape over [`extraction_bounds`].
pub fn decode_mesh(params: &sdfforge::decoder::DecoderParams<f32>, z: &[f32], resolution: usize) -> CliResult<IsoMesh> {
    Ok(extract_mesh(params, z, resolution, extraction_bounds())?)
}
