use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use sdfforge::geometry::PinholeCamera;
use sdfforge::sampling::DepthMap;
use sdfforge::Vec3;

use super::{expect_eof, expect_magic, FormatError};

const MAGIC: &[u8; 4] = b"DPTH";
const MAX_PIXELS: u64 = 1 << 26;

/// Pose is stored world-to-camera: rotation rows, then `t = -R * center`.
/// Each pixel record is `(depth, nx, ny, nz)` with depth 0 for a miss.
pub fn write_depth<W: Write>(mut w: W, map: &DepthMap) -> Result<(), FormatError> {
    let cam = &map.camera;
    w.write_all(MAGIC)?;
    for row in cam.rotation {
        for v in row {
            w.write_f32::<LE>(v as f32)?;
        }
    }
    for row in cam.rotation {
        w.write_f32::<LE>(-Vec3::from_array(row).dot(cam.center) as f32)?;
    }
    for v in [cam.fx, cam.fy, cam.cx, cam.cy] {
        w.write_f32::<LE>(v as f32)?;
    }
    w.write_u32::<LE>(cam.width)?;
    w.write_u32::<LE>(cam.height)?;
    for (d, n) in map.depth.iter().zip(&map.normals) {
        for v in [*d, n.x, n.y, n.z] {
            w.write_f32::<LE>(v as f32)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_depth<R: Read>(mut r: R) -> Result<DepthMap, FormatError> {
    expect_magic(&mut r, MAGIC)?;
    let mut pose = [0f32; 12];
    r.read_f32_into::<LE>(&mut pose)?;
    let mut intr = [0f32; 4];
    r.read_f32_into::<LE>(&mut intr)?;
    if pose.iter().chain(&intr).any(|v| !v.is_finite()) {
        return Err(FormatError::invalid("non-finite camera parameters"));
    }
    let width = r.read_u32::<LE>()?;
    let height = r.read_u32::<LE>()?;
    let pixels = width as u64 * height as u64;
    if pixels == 0 || pixels > MAX_PIXELS {
        return Err(FormatError::invalid(format!(
            "unsupported depth resolution {width}x{height}"
        )));
    }
    let rows: [Vec3; 3] =
        std::array::from_fn(|i| Vec3::new(pose[3 * i] as f64, pose[3 * i + 1] as f64, pose[3 * i + 2] as f64));
    let t = Vec3::new(pose[9] as f64, pose[10] as f64, pose[11] as f64);
    let center = -(rows[0] * t.x + rows[1] * t.y + rows[2] * t.z);
    let camera = PinholeCamera {
        rotation: rows.map(|r| r.to_array()),
        center,
        fx: intr[0] as f64,
        fy: intr[1] as f64,
        cx: intr[2] as f64,
        cy: intr[3] as f64,
        width,
        height,
    };
    let mut depth = Vec::with_capacity(pixels as usize);
    let mut normals = Vec::with_capacity(pixels as usize);
    for _ in 0..pixels {
        let mut f = [0f32; 4];
        r.read_f32_into::<LE>(&mut f)?;
        if f.iter().any(|v| !v.is_finite()) || f[0] < 0.0 {
            return Err(FormatError::invalid("invalid depth record"));
        }
        depth.push(f[0] as f64);
        normals.push(Vec3::new(f[1] as f64, f[2] as f64, f[3] as f64));
    }
    expect_eof(&mut r)?;
    Ok(DepthMap { camera, depth, normals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdfforge::geometry::TriangleMesh;
    use sdfforge::sampling::render_depth;

    #[test]
    fn round_trip_preserves_geometry() {
        let mesh = TriangleMesh::icosphere(Vec3::ZERO, 0.5, 3);
        let cam = PinholeCamera::look_at(Vec3::new(1.0, 0.5, 1.5), Vec3::ZERO, 1.0, 16, 12).unwrap();
        let map = render_depth(&mesh, &cam);
        let mut buf = Vec::new();
        write_depth(&mut buf, &map).unwrap();
        assert_eq!(buf.len(), 4 + 64 + 8 + 16 * 12 * 16);
        let back = read_depth(buf.as_slice()).unwrap();
        assert_eq!(back.width(), 16);
        assert!((back.camera.center - cam.center).norm() < 1e-5);
        assert_eq!(back.hit_count(), map.hit_count());
        for i in map.hits() {
            assert!((back.point(i) - map.point(i)).norm() < 1e-5);
        }
    }

    #[test]
    fn rejects_negative_depth() {
        let cam = PinholeCamera::look_at(Vec3::Z * 2.0, Vec3::ZERO, 1.0, 1, 1).unwrap();
        let mut map = DepthMap::empty(cam);
        map.depth[0] = -1.0;
        let mut buf = Vec::new();
        write_depth(&mut buf, &map).unwrap();
        assert!(read_depth(buf.as_slice()).is_err());
    }
}
