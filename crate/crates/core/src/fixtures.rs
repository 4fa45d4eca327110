//! Deterministic procedural test meshes used across the pipeline: the six
//! watertight-conversion fixtures (sphere, box, torus, CSG union soup, open
//! cylinder, holed plane) plus the nested-shell cavity fixture and small
//! UV-mapped quads for texture tests.

use crate::geom::TriMesh;
use crate::math::{Vec2, Vec3};

/// UV sphere centered at the origin, outward winding.
pub fn sphere(radius: f64, segments: usize, rings: usize) -> TriMesh {
    assert!(segments >= 3 && rings >= 2);
    let mut vertices = vec![Vec3::new(0.0, 0.0, radius)];
    for ring in 1..rings {
        let polar = std::f64::consts::PI * ring as f64 / rings as f64;
        let (sp, cp) = polar.sin_cos();
        for seg in 0..segments {
            let azim = 2.0 * std::f64::consts::PI * seg as f64 / segments as f64;
            let (sa, ca) = azim.sin_cos();
            vertices.push(Vec3::new(radius * sp * ca, radius * sp * sa, radius * cp));
        }
    }
    vertices.push(Vec3::new(0.0, 0.0, -radius));
    let bottom = vertices.len() as u32 - 1;

    let ring_start = |ring: usize| 1 + (ring - 1) * segments;
    let mut faces = Vec::new();
    for seg in 0..segments {
        let next = (seg + 1) % segments;
        faces.push([
            0,
            (ring_start(1) + seg) as u32,
            (ring_start(1) + next) as u32,
        ]);
    }
    for ring in 1..rings - 1 {
        let a = ring_start(ring);
        let b = ring_start(ring + 1);
        for seg in 0..segments {
            let next = (seg + 1) % segments;
            let (a0, a1) = ((a + seg) as u32, (a + next) as u32);
            let (b0, b1) = ((b + seg) as u32, (b + next) as u32);
            faces.push([a0, b0, b1]);
            faces.push([a0, b1, a1]);
        }
    }
    let last = ring_start(rings - 1);
    for seg in 0..segments {
        let next = (seg + 1) % segments;
        faces.push([(last + seg) as u32, bottom, (last + next) as u32]);
    }
    TriMesh::new(vertices, faces)
}

/// Axis-aligned box centered at `center`, outward winding.
pub fn box_mesh(center: Vec3, half: Vec3) -> TriMesh {
    let corners: Vec<Vec3> = (0..8)
        .map(|i| {
            Vec3::new(
                center.x + if i & 1 != 0 { half.x } else { -half.x },
                center.y + if i & 2 != 0 { half.y } else { -half.y },
                center.z + if i & 4 != 0 { half.z } else { -half.z },
            )
        })
        .collect();
    // Two triangles per face, CCW seen from outside.
    let quads: [[u32; 4]; 6] = [
        [0, 2, 3, 1], // -z
        [4, 5, 7, 6], // +z
        [0, 1, 5, 4], // -y
        [2, 6, 7, 3], // +y
        [0, 4, 6, 2], // -x
        [1, 3, 7, 5], // +x
    ];
    let mut faces = Vec::new();
    for q in quads {
        faces.push([q[0], q[1], q[2]]);
        faces.push([q[0], q[2], q[3]]);
    }
    TriMesh::new(corners, faces)
}

/// Torus around the z-axis: tube radius `minor` around a circle of radius
/// `major` in the xy-plane.
pub fn torus(major: f64, minor: f64, seg_major: usize, seg_minor: usize) -> TriMesh {
    assert!(seg_major >= 3 && seg_minor >= 3);
    let mut vertices = Vec::with_capacity(seg_major * seg_minor);
    for i in 0..seg_major {
        let u = 2.0 * std::f64::consts::PI * i as f64 / seg_major as f64;
        let (su, cu) = u.sin_cos();
        for j in 0..seg_minor {
            let v = 2.0 * std::f64::consts::PI * j as f64 / seg_minor as f64;
            let (sv, cv) = v.sin_cos();
            vertices.push(Vec3::new(
                (major + minor * cv) * cu,
                (major + minor * cv) * su,
                minor * sv,
            ));
        }
    }
    let idx = |i: usize, j: usize| (i % seg_major * seg_minor + j % seg_minor) as u32;
    let mut faces = Vec::new();
    for i in 0..seg_major {
        for j in 0..seg_minor {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh::new(vertices, faces)
}

/// Open cylinder around the z-axis, no caps: a non-watertight input.
pub fn open_cylinder(radius: f64, half_height: f64, segments: usize) -> TriMesh {
    let mut vertices = Vec::with_capacity(segments * 2);
    for ring in 0..2 {
        let z = if ring == 0 { -half_height } else { half_height };
        for seg in 0..segments {
            let a = 2.0 * std::f64::consts::PI * seg as f64 / segments as f64;
            vertices.push(Vec3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    let mut faces = Vec::new();
    for seg in 0..segments {
        let next = (seg + 1) % segments;
        let (b0, b1) = (seg as u32, next as u32);
        let (t0, t1) = ((segments + seg) as u32, (segments + next) as u32);
        faces.push([b0, b1, t1]);
        faces.push([b0, t1, t0]);
    }
    TriMesh::new(vertices, faces)
}

/// Concatenate meshes into one triangle soup.
pub fn merge_soup(meshes: &[TriMesh]) -> TriMesh {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for m in meshes {
        let base = vertices.len() as u32;
        vertices.extend_from_slice(&m.vertices);
        faces.extend(m.faces.iter().map(|f| [f[0] + base, f[1] + base, f[2] + base]));
    }
    TriMesh::new(vertices, faces)
}

/// Two interpenetrating spheres as raw soup: the CSG-union fixture. The
/// surfaces cross each other, so the soup is not a manifold until converted.
pub fn csg_union() -> TriMesh {
    let a = sphere(0.55, 24, 12).translated(Vec3::new(-0.35, 0.0, 0.0));
    let b = sphere(0.45, 24, 12).translated(Vec3::new(0.35, 0.1, 0.05));
    merge_soup(&[a, b])
}

/// Two concentric sphere shells; the gap between them is an internal cavity
/// that watertight conversion must remove.
pub fn nested_shells() -> TriMesh {
    let outer = sphere(0.8, 24, 12);
    let inner = sphere(0.4, 16, 8);
    merge_soup(&[outer, inner])
}

/// Flat plane at z = 0 spanning [-0.8, 0.8]^2 with a square hole in the
/// middle: an open surface with boundary.
pub fn holed_plane() -> TriMesh {
    let n = 8usize; // quads per side
    let lo = -0.8;
    let step = 1.6 / n as f64;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec3::new(lo + i as f64 * step, lo + j as f64 * step, 0.0));
        }
    }
    let idx = |i: usize, j: usize| (j * (n + 1) + i) as u32;
    let hole = (n / 2 - 1)..=(n / 2); // 2x2 quads removed
    let mut faces = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if hole.contains(&i) && hole.contains(&j) {
                continue;
            }
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh::new(vertices, faces)
}

/// Axis-aligned unit quad in the z = `z` plane spanning [-half, half]^2,
/// UV-mapped over the whole [0,1]^2 square, facing +z.
pub fn uv_quad(half: f64, z: f64) -> TriMesh {
    let vertices = vec![
        Vec3::new(-half, -half, z),
        Vec3::new(half, -half, z),
        Vec3::new(half, half, z),
        Vec3::new(-half, half, z),
    ];
    let faces = vec![[0, 1, 2], [0, 2, 3]];
    let uvs = vec![
        [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0)],
        [Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)],
    ];
    let mut m = TriMesh::new(vertices, faces);
    m.uvs = Some(uvs);
    m.normals = Some(vec![Vec3::new(0.0, 0.0, 1.0); 4]);
    m
}

/// Fixture registry used by the `fixtures` CLI subcommand and the test
/// suites. Names are stable identifiers.
pub fn by_name(name: &str) -> Option<TriMesh> {
    match name {
        "sphere" => Some(sphere(0.8, 32, 16)),
        "box" => Some(box_mesh(Vec3::ZERO, Vec3::new(0.7, 0.5, 0.4))),
        "torus" => Some(torus(0.55, 0.22, 32, 16)),
        "csg_union" => Some(csg_union()),
        "open_cylinder" => Some(open_cylinder(0.5, 0.7, 32)),
        "holed_plane" => Some(holed_plane()),
        "nested_shells" => Some(nested_shells()),
        _ => None,
    }
}

pub const FIXTURE_NAMES: [&str; 7] = [
    "sphere",
    "box",
    "torus",
    "csg_union",
    "open_cylinder",
    "holed_plane",
    "nested_shells",
];

/// The six fixtures that must convert to closed manifolds.
pub const CLOSURE_FIXTURES: [&str; 6] = [
    "sphere",
    "box",
    "torus",
    "csg_union",
    "open_cylinder",
    "holed_plane",
];
