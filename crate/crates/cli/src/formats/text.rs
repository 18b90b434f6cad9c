use std::io::{Read, Write};

use sdfforge::training::LossRecord;
use serde::{Deserialize, Serialize};

use super::FormatError;

/// A single latent code as JSON: `{"shape_id": ..., "latent": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_id: Option<String>,
    pub latent: Vec<f32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
}

pub fn write_latent<W: Write>(mut w: W, latent: &LatentFile) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut w, latent).map_err(|e| FormatError::invalid(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_latent<R: Read>(r: R) -> Result<LatentFile, FormatError> {
    let file: LatentFile = serde_json::from_reader(r).map_err(|e| FormatError::invalid(e.to_string()))?;
    if file.latent.iter().any(|v| !v.is_finite()) {
        return Err(FormatError::invalid("latent has non-finite entries"));
    }
    Ok(file)
}

pub fn write_loss_csv<W: Write>(mut w: W, record: &LossRecord) -> Result<(), FormatError> {
    writeln!(w, "epoch,sdf_loss,reg_loss,seconds")?;
    for e in &record.epochs {
        writeln!(w, "{},{},{},{}", e.epoch, e.sdf_loss, e.reg_loss, e.seconds)?;
    }
    w.flush()?;
    Ok(())
}
