use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use sdfforge::geometry::OrientedPoint;
use sdfforge::Vec3;

use super::{capped, expect_eof, expect_magic, FormatError};

const MAGIC: &[u8; 4] = b"OPC1";

pub fn write_opc<W: Write>(mut w: W, points: &[OrientedPoint]) -> Result<(), FormatError> {
    let count = u32::try_from(points.len()).map_err(|_| FormatError::invalid("too many points for OPC1"))?;
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(count)?;
    for p in points {
        for v in p.position.to_array().into_iter().chain(p.normal.to_array()) {
            w.write_f32::<LE>(v as f32)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_opc<R: Read>(mut r: R) -> Result<Vec<OrientedPoint>, FormatError> {
    expect_magic(&mut r, MAGIC)?;
    let count = r.read_u32::<LE>()? as u64;
    let mut out = Vec::with_capacity(capped(count));
    for _ in 0..count {
        let mut f = [0f32; 6];
        r.read_f32_into::<LE>(&mut f)?;
        if f.iter().any(|v| !v.is_finite()) {
            return Err(FormatError::invalid("non-finite point record"));
        }
        out.push(OrientedPoint {
            position: Vec3::new(f[0] as f64, f[1] as f64, f[2] as f64),
            normal: Vec3::new(f[3] as f64, f[4] as f64, f[5] as f64),
        });
    }
    expect_eof(&mut r)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let pts = vec![
            OrientedPoint {
                position: Vec3::new(0.5, -0.25, 1.0),
                normal: Vec3::Z,
            },
            OrientedPoint {
                position: Vec3::new(0.0, 0.125, 0.0),
                normal: Vec3::X,
            },
        ];
        let mut buf = Vec::new();
        write_opc(&mut buf, &pts).unwrap();
        assert_eq!(&buf[..4], b"OPC1");
        assert_eq!(buf.len(), 8 + 2 * 24);
        assert_eq!(read_opc(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn truncated_and_bad_magic() {
        let mut buf = Vec::new();
        write_opc(
            &mut buf,
            &[OrientedPoint {
                position: Vec3::X,
                normal: Vec3::Y,
            }],
        )
        .unwrap();
        assert!(read_opc(&buf[..buf.len() - 1]).is_err());
        buf[0] = b'X';
        assert!(matches!(read_opc(buf.as_slice()), Err(FormatError::Invalid(_))));
    }
}
