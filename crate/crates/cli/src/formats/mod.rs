//! On-disk formats. Binary formats are little-endian and start with a
//! four-byte magic.

mod checkpoint;
mod depth;
mod obj;
mod opc;
mod sdfs;
mod text;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use depth::{read_depth, write_depth};
pub use obj::{read_obj, write_obj, ObjError};
pub use opc::{read_opc, write_opc};
pub use sdfs::{read_samples, write_samples};
pub use text::{read_latent, write_latent, write_loss_csv, LatentFile};

use std::io::Read;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

impl FormatError {
    fn invalid(msg: impl Into<String>) -> Self {
        FormatError::Invalid(msg.into())
    }
}

fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<(), FormatError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    if &buf != magic {
        return Err(FormatError::invalid(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&buf),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

fn expect_eof<R: Read>(r: &mut R) -> Result<(), FormatError> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(FormatError::invalid("trailing bytes after last record")),
    }
}

/// Guards `Vec::with_capacity` against corrupt headers.
fn capped(count: u64) -> usize {
    count.min(1 << 20) as usize
}
