//! JSON-lines manifest: one record per prepared shape.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::formats::read_samples;
use sdfforge::sampling::{PrepConfig, SampleSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Mesh { path: String },
    Analytic { descriptor: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub shape_id: String,
    /// Sample file, relative to the manifest's directory unless absolute.
    pub samples: String,
    pub n_positive: usize,
    pub n_negative: usize,
    pub source: Source,
    pub prep_hash: String,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_mesh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double_sided_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub root: PathBuf,
    pub records: Vec<Record>,
}

impl Manifest {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Manifest {
            root: root.into(),
            records: Vec::new(),
        }
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn get(&self, shape_id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.shape_id == shape_id)
    }

    /// Reads and validates a manifest; relative paths resolve against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut manifest = Manifest::new(root);
        let mut seen = HashSet::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| CliError::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Record =
                serde_json::from_str(&line).map_err(|e| CliError::format(path, format!("line {}: {e}", n + 1)))?;
            if !seen.insert(record.shape_id.clone()) {
                return Err(CliError::format(
                    path,
                    format!("duplicate shape_id {:?}", record.shape_id),
                ));
            }
            let sample_path = manifest.resolve(&record.samples);
            if !sample_path.is_file() {
                return Err(CliError::format(
                    path,
                    format!("missing sample file {}", sample_path.display()),
                ));
            }
            manifest.records.push(record);
        }
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = BufWriter::new(file);
        for r in &self.records {
            let line = serde_json::to_string(r).map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| CliError::io(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn load_samples(&self, record: &Record) -> CliResult<SampleSet> {
        let path = self.resolve(&record.samples);
        let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
        let set =
            read_samples(BufReader::new(file), &record.shape_id).map_err(|e| CliError::format(&path, e.to_string()))?;
        if set.positive.len() != record.n_positive || set.negative.len() != record.n_negative {
            return Err(CliError::format(&path, "sample counts differ from the manifest"));
        }
        Ok(set)
    }
}

/// Stable 64-bit FNV-1a digest of the preparation settings.
pub fn prep_hash(cfg: &PrepConfig, seed: u64) -> String {
    let text = format!("{cfg:?} seed={seed}");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}
