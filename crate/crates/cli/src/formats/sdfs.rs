use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use sdfforge::sampling::{SampleSet, SdfSample};

use super::{capped, expect_eof, expect_magic, FormatError};

const MAGIC: &[u8; 4] = b"SDFS";
const VERSION: u32 = 1;

/// Positive samples first, then negative ones.
pub fn write_samples<W: Write>(mut w: W, set: &SampleSet) -> Result<(), FormatError> {
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_u64::<LE>(set.len() as u64)?;
    for s in set.iter() {
        for v in s.position {
            w.write_f32::<LE>(v)?;
        }
        w.write_f32::<LE>(s.sdf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples<R: Read>(mut r: R, shape_id: &str) -> Result<SampleSet, FormatError> {
    expect_magic(&mut r, MAGIC)?;
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        return Err(FormatError::invalid(format!("unsupported SDFS version {version}")));
    }
    let count = r.read_u64::<LE>()?;
    let mut samples = Vec::with_capacity(capped(count));
    for _ in 0..count {
        let mut f = [0f32; 4];
        r.read_f32_into::<LE>(&mut f)?;
        samples.push(SdfSample {
            position: [f[0], f[1], f[2]],
            sdf: f[3],
        });
    }
    expect_eof(&mut r)?;
    SampleSet::new(shape_id, samples).map_err(|e| FormatError::invalid(e.to_string()))
}
