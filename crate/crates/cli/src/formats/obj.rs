//! ASCII Wavefront OBJ: `v` and `f` records in, `v`/`vn`/`f` out.

use std::io::{BufRead, Write};

use sdfforge::geometry::TriangleMesh;
use sdfforge::Vec3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex index {index} out of range (have {count} vertices)")]
    Index { line: usize, index: i64, count: usize },
    #[error("read failed: {0}")]
    Read(String),
}

/// Parses `v x y z` and `f a b c ...` records; polygons are fan
/// triangulated, texture/normal references (`a/b/c`) ignored, everything
/// else skipped. Degenerate triangles are dropped.
pub fn read_obj<R: BufRead>(reader: R) -> Result<TriangleMesh, ObjError> {
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| ObjError::Read(e.to_string()))?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .by_ref()
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| ObjError::Parse {
                        line: line_no,
                        message: format!("bad vertex coordinate: {e}"),
                    })?;
                if coords.len() != 3 || coords.iter().any(|c| !c.is_finite()) {
                    return Err(ObjError::Parse {
                        line: line_no,
                        message: "vertex needs three finite coordinates".into(),
                    });
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<i64> = parts
                    .map(|s| s.split('/').next().unwrap_or("").parse::<i64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| ObjError::Parse {
                        line: line_no,
                        message: format!("bad face index: {e}"),
                    })?;
                if idx.len() < 3 {
                    return Err(ObjError::Parse {
                        line: line_no,
                        message: "face needs at least three vertices".into(),
                    });
                }
                faces.push((line_no, idx));
            }
            _ => {}
        }
    }
    let mut triangles = Vec::new();
    for (line, idx) in faces {
        let resolved = idx
            .iter()
            .map(|&i| {
                if i < 1 || i as usize > vertices.len() {
                    Err(ObjError::Index {
                        line,
                        index: i,
                        count: vertices.len(),
                    })
                } else {
                    Ok((i - 1) as u32)
                }
            })
            .collect::<Result<Vec<u32>, _>>()?;
        for k in 1..resolved.len() - 1 {
            triangles.push([resolved[0], resolved[k], resolved[k + 1]]);
        }
    }
    TriangleMesh::new(vertices, triangles).map_err(|e| ObjError::Parse {
        line: 0,
        message: e.to_string(),
    })
}

/// Writes vertices, optional per-vertex normals and 1-based faces.
pub fn write_obj<W: Write>(
    mut w: W,
    vertices: &[Vec3],
    normals: Option<&[Vec3]>,
    triangles: &[[u32; 3]],
) -> std::io::Result<()> {
    for v in vertices {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    if let Some(normals) = normals {
        for n in normals {
            writeln!(w, "vn {} {} {}", n.x, n.y, n.z)?;
        }
        for t in triangles {
            let [a, b, c] = t.map(|i| i + 1);
            writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
        }
    } else {
        for t in triangles {
            let [a, b, c] = t.map(|i| i + 1);
            writeln!(w, "f {a} {b} {c}")?;
        }
    }
    w.flush()
}
