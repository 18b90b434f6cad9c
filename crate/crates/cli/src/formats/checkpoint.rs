use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use sdfforge::decoder::{DecoderParams, LatentCodebook, NetConfig};

use super::{expect_eof, expect_magic, FormatError};

const MAGIC: &[u8; 4] = b"DSDF";
const VERSION: u32 = 1;

/// Decoder weights plus the codebook learned with them (possibly empty).
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub params: DecoderParams<f32>,
    pub codebook: LatentCodebook<f32>,
}

/// Layout after magic and version: `latent_dim, hidden_width, n_layers,
/// n_skip, skip[..]` as u32, the dropout rate as f64 bits, then `v, g, b` of each layer,
/// then `u32 count` and `(u16 len, id, latent_dim f32)` per code.
pub fn write_checkpoint<W: Write>(mut w: W, ckpt: &Checkpoint) -> Result<(), FormatError> {
    let cfg = ckpt.params.config();
    if ckpt.codebook.dim() != cfg.latent_dim {
        return Err(FormatError::invalid(
            "codebook dimension differs from network latent size",
        ));
    }
    let u32_of = |v: usize| u32::try_from(v).map_err(|_| FormatError::invalid("config field exceeds u32"));
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_u32::<LE>(u32_of(cfg.latent_dim)?)?;
    w.write_u32::<LE>(u32_of(cfg.hidden_width)?)?;
    w.write_u32::<LE>(u32_of(cfg.n_layers)?)?;
    w.write_u32::<LE>(u32_of(cfg.skip_layers.len())?)?;
    for &s in &cfg.skip_layers {
        w.write_u32::<LE>(u32_of(s)?)?;
    }
    w.write_u64::<LE>(cfg.dropout_rate.to_bits())?;
    let flat = ckpt.params.as_slice();
    for layer in ckpt.params.layers() {
        for range in [layer.v_range(), layer.g_range(), layer.b_range()] {
            for &v in &flat[range] {
                w.write_f32::<LE>(v)?;
            }
        }
    }
    w.write_u32::<LE>(u32_of(ckpt.codebook.len())?)?;
    for (id, code) in ckpt.codebook.iter() {
        let len = u16::try_from(id.len()).map_err(|_| FormatError::invalid(format!("shape id too long: {id}")))?;
        w.write_u16::<LE>(len)?;
        w.write_all(id.as_bytes())?;
        for &v in code {
            w.write_f32::<LE>(v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint, FormatError> {
    expect_magic(&mut r, MAGIC)?;
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        return Err(FormatError::invalid(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let latent_dim = r.read_u32::<LE>()? as usize;
    let hidden_width = r.read_u32::<LE>()? as usize;
    let n_layers = r.read_u32::<LE>()? as usize;
    let n_skip = r.read_u32::<LE>()? as usize;
    if n_skip > n_layers {
        return Err(FormatError::invalid("more skip layers than layers"));
    }
    let skip_layers = (0..n_skip)
        .map(|_| r.read_u32::<LE>().map(|v| v as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let dropout_rate = f64::from_bits(r.read_u64::<LE>()?);
    let config = NetConfig {
        latent_dim,
        hidden_width,
        n_layers,
        skip_layers,
        dropout_rate,
    };
    let invalid = |e: sdfforge::Error| FormatError::invalid(e.to_string());
    config.validate().map_err(invalid)?;
    let mut flat = vec![0f32; config.param_count()];
    for layer in config.layer_shapes() {
        for range in [layer.v_range(), layer.g_range(), layer.b_range()] {
            r.read_f32_into::<LE>(&mut flat[range])?;
        }
    }
    let params = DecoderParams::from_flat(&config, flat).map_err(invalid)?;
    let count = r.read_u32::<LE>()? as u64;
    let mut codebook = LatentCodebook::new(latent_dim);
    let mut code = vec![0f32; latent_dim];
    for _ in 0..count {
        let len = r.read_u16::<LE>()? as usize;
        let mut id = vec![0u8; len];
        r.read_exact(&mut id)?;
        let id = String::from_utf8(id).map_err(|_| FormatError::invalid("shape id is not UTF-8"))?;
        r.read_f32_into::<LE>(&mut code)?;
        codebook.insert(&id, code.clone()).map_err(invalid)?;
    }
    expect_eof(&mut r)?;
    Ok(Checkpoint { params, codebook })
}
