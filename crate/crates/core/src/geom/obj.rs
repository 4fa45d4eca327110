//! Wavefront OBJ import/export for triangle meshes. Positions, triangular
//! faces, optional `vt`/`vn`; vertex order is preserved on round-trip.

use super::TriMesh;
use crate::error::Error;
use crate::math::{Vec2, Vec3};
use crate::Result;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn read_obj(path: impl AsRef<Path>) -> Result<TriMesh> {
    let file = std::fs::File::open(path)?;
    parse_obj(BufReader::new(file))
}

pub fn parse_obj(reader: impl Read) -> Result<TriMesh> {
    let reader = BufReader::new(reader);
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut vts: Vec<Vec2> = Vec::new();
    let mut vns: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut face_uvs: Vec<[Vec2; 3]> = Vec::new();
    let mut normals: Vec<Option<Vec3>> = Vec::new();
    let mut any_uv = false;
    let mut any_vn = false;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let bad = |what: &str| {
            Error::Format(format!("obj line {}: malformed {what}: {line}", lineno + 1))
        };
        match tag {
            "v" => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    *c = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad("vertex"))?;
                }
                vertices.push(Vec3::from_array(coords));
                normals.push(None);
            }
            "vt" => {
                let u: f64 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("vt"))?;
                let v: f64 = parts.next().and_then(|s| s.parse().ok()).unwrap_or(0.0);
                vts.push(Vec2::new(u, v));
            }
            "vn" => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    *c = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad("vn"))?;
                }
                vns.push(Vec3::from_array(coords));
            }
            "f" => {
                let corners: Vec<&str> = parts.collect();
                if corners.len() != 3 {
                    return Err(Error::Format(format!(
                        "obj line {}: only triangular faces are supported (got {} corners)",
                        lineno + 1,
                        corners.len()
                    )));
                }
                let mut vi = [0u32; 3];
                let mut uv = [Vec2::default(); 3];
                let mut has_uv = true;
                for (k, corner) in corners.iter().enumerate() {
                    let mut fields = corner.split('/');
                    let v_idx: i64 = fields
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad("face"))?;
                    vi[k] = resolve_index(v_idx, vertices.len()).ok_or_else(|| bad("face index"))?;
                    match fields.next() {
                        Some(s) if !s.is_empty() => {
                            let t_idx: i64 = s.parse().map_err(|_| bad("face vt index"))?;
                            let ti = resolve_index(t_idx, vts.len())
                                .ok_or_else(|| bad("face vt index"))?;
                            uv[k] = vts[ti as usize];
                            any_uv = true;
                        }
                        _ => has_uv = false,
                    }
                    if let Some(s) = fields.next() {
                        if !s.is_empty() {
                            let n_idx: i64 = s.parse().map_err(|_| bad("face vn index"))?;
                            let ni = resolve_index(n_idx, vns.len())
                                .ok_or_else(|| bad("face vn index"))?;
                            normals[vi[k] as usize] = Some(vns[ni as usize]);
                            any_vn = true;
                        }
                    }
                }
                faces.push(vi);
                face_uvs.push(if has_uv { uv } else { [Vec2::default(); 3] });
            }
            // Groups, materials, smoothing: ignored.
            _ => {}
        }
    }

    let mesh = TriMesh {
        vertices,
        faces,
        uvs: if any_uv { Some(face_uvs) } else { None },
        normals: if any_vn {
            Some(
                normals
                    .into_iter()
                    .map(|n| n.unwrap_or(Vec3::new(0.0, 0.0, 1.0)).normalized())
                    .collect(),
            )
        } else {
            None
        },
    };
    mesh.validate()?;
    Ok(mesh)
}

fn resolve_index(idx: i64, len: usize) -> Option<u32> {
    if idx > 0 && (idx as usize) <= len {
        Some((idx - 1) as u32)
    } else if idx < 0 && (-idx as usize) <= len {
        Some((len as i64 + idx) as u32)
    } else {
        None
    }
}

pub fn write_obj(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    emit_obj(mesh, &mut w)
}

pub fn emit_obj(mesh: &TriMesh, w: &mut impl Write) -> Result<()> {
    for v in &mesh.vertices {
        // Rust's float Display prints the shortest round-trippable form.
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    if let Some(normals) = &mesh.normals {
        for n in normals {
            writeln!(w, "vn {} {} {}", n.x, n.y, n.z)?;
        }
    }
    if let Some(uvs) = &mesh.uvs {
        for corner_uvs in uvs {
            for uv in corner_uvs {
                writeln!(w, "vt {} {}", uv.x, uv.y)?;
            }
        }
        for (i, f) in mesh.faces.iter().enumerate() {
            let t = 3 * i as u64;
            if mesh.normals.is_some() {
                writeln!(
                    w,
                    "f {}/{}/{} {}/{}/{} {}/{}/{}",
                    f[0] + 1,
                    t + 1,
                    f[0] + 1,
                    f[1] + 1,
                    t + 2,
                    f[1] + 1,
                    f[2] + 1,
                    t + 3,
                    f[2] + 1
                )?;
            } else {
                writeln!(
                    w,
                    "f {}/{} {}/{} {}/{}",
                    f[0] + 1,
                    t + 1,
                    f[1] + 1,
                    t + 2,
                    f[2] + 1,
                    t + 3
                )?;
            }
        }
    } else if mesh.normals.is_some() {
        for f in &mesh.faces {
            writeln!(
                w,
                "f {}//{} {}//{} {}//{}",
                f[0] + 1,
                f[0] + 1,
                f[1] + 1,
                f[1] + 1,
                f[2] + 1,
                f[2] + 1
            )?;
        }
    } else {
        for f in &mesh.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
    }
    Ok(())
}
