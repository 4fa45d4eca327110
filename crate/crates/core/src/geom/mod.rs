//! Core geometric types, mesh normalization, surface sampling, ray queries,
//! and the azimuth-alignment augmentation.

mod bvh;
mod obj;

pub use bvh::Bvh;
pub use obj::{emit_obj, parse_obj, read_obj, write_obj};

use crate::error::Error;
use crate::math::{Vec2, Vec3};
use crate::rng::{rng_from_seed, Rng};
use crate::Result;
use rand::Rng as _;

/// Indexed triangle mesh with optional per-corner UVs and per-vertex normals.
#[derive(Debug, Clone, Default)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
    /// Per-corner UV coordinates in [0,1]^2, aligned with `faces`.
    pub uvs: Option<Vec<[Vec2; 3]>>,
    /// Per-vertex unit normals.
    pub normals: Option<Vec<Vec3>>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[u32; 3]>) -> Self {
        TriMesh {
            vertices,
            faces,
            uvs: None,
            normals: None,
        }
    }

    /// Check the structural invariants: indices in range, no degenerate
    /// index triples, unit normals when present.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len() as u32;
        for (i, f) in self.faces.iter().enumerate() {
            if f[0] >= n || f[1] >= n || f[2] >= n {
                return Err(Error::Format(format!(
                    "face {i} references vertex out of range (mesh has {n} vertices)"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Format(format!("face {i} repeats a vertex index")));
            }
        }
        if let Some(uvs) = &self.uvs {
            if uvs.len() != self.faces.len() {
                return Err(Error::Format("uv count does not match face count".into()));
            }
        }
        if let Some(normals) = &self.normals {
            if normals.len() != self.vertices.len() {
                return Err(Error::Format(
                    "normal count does not match vertex count".into(),
                ));
            }
            for (i, nv) in normals.iter().enumerate() {
                if (nv.length() - 1.0).abs() > 1e-6 {
                    return Err(Error::Format(format!("normal {i} is not unit length")));
                }
            }
        }
        Ok(())
    }

    pub fn face_vertices(&self, face: usize) -> [Vec3; 3] {
        let f = self.faces[face];
        [
            self.vertices[f[0] as usize],
            self.vertices[f[1] as usize],
            self.vertices[f[2] as usize],
        ]
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.face_vertices(face);
        (b - a).cross(c - a).length() * 0.5
    }

    /// Unit face normal (right-handed winding). Zero for degenerate faces.
    pub fn face_normal(&self, face: usize) -> Vec3 {
        let [a, b, c] = self.face_vertices(face);
        (b - a).cross(c - a).normalized()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn aabb(&self) -> Option<Aabb> {
        Aabb::from_points(self.vertices.iter().copied())
    }

    /// Signed volume via the divergence theorem; meaningful for closed
    /// meshes with outward-facing normals.
    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let a = self.vertices[f[0] as usize];
                let b = self.vertices[f[1] as usize];
                let c = self.vertices[f[2] as usize];
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Every edge incident to exactly two faces.
    pub fn is_closed_manifold(&self) -> bool {
        let mut counts = std::collections::HashMap::new();
        for f in &self.faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                let key = (a.min(b), a.max(b));
                *counts.entry(key).or_insert(0u32) += 1;
            }
        }
        !counts.is_empty() && counts.values().all(|&c| c == 2)
    }

    /// V - E + F over the welded connectivity graph.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        let mut used = std::collections::HashSet::new();
        for f in &self.faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
            used.extend(f.iter().copied());
        }
        used.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }

    /// Number of connected components of the face graph (faces joined
    /// through shared vertices).
    pub fn connected_components(&self) -> usize {
        if self.faces.is_empty() {
            return 0;
        }
        let mut parent: Vec<u32> = (0..self.vertices.len() as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for f in &self.faces {
            let r0 = find(&mut parent, f[0]);
            let r1 = find(&mut parent, f[1]);
            let r2 = find(&mut parent, f[2]);
            parent[r1 as usize] = r0;
            parent[r2 as usize] = r0;
        }
        let mut roots = std::collections::HashSet::new();
        for f in &self.faces {
            roots.insert(find(&mut parent, f[0]));
        }
        roots.len()
    }

    pub fn translated(&self, offset: Vec3) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v += offset;
        }
        m
    }

    pub fn rotated_z(&self, angle: f64) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = v.rotate_z(angle);
        }
        if let Some(normals) = &mut m.normals {
            for n in normals {
                *n = n.rotate_z(angle);
            }
        }
        m
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        debug_assert!(min.x <= max.x && min.y <= max.y && min.z <= max.z);
        Aabb { min, max }
    }

    /// The canonical [-1,1]^3 pipeline domain.
    pub fn unit() -> Self {
        Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0))
    }

    pub fn from_points(points: impl IntoIterator<Item = Vec3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        Some(Aabb::new(lo, hi))
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().length()
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb::new(self.min.min(o.min), self.max.max(o.max))
    }

    pub fn grown(&self, pad: f64) -> Aabb {
        Aabb::new(self.min - Vec3::splat(pad), self.max + Vec3::splat(pad))
    }

    /// Squared distance from a point to the box (zero inside).
    pub fn distance_squared(&self, p: Vec3) -> f64 {
        let q = p.clamp(self.min, self.max);
        (p - q).length_squared()
    }
}

/// Ray with unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    /// Normalizes the direction; zero-length directions are rejected.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self> {
        let len = direction.length();
        if len == 0.0 || !direction.is_finite() {
            return Err(Error::DegenerateInput("ray direction has zero length".into()));
        }
        Ok(Ray {
            origin,
            direction: direction / len,
        })
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// Point cloud with optional per-point normals.
#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        PointCloud {
            points,
            normals: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Uniformly rescale and recenter a mesh so its bounding box fits tightly in
/// [-1,1]^3 with the longest axis spanning exactly [-1,1].
///
/// Returns the normalized mesh together with the inverse transform
/// parameters: `original = normalized * scale + center`.
pub fn normalize_mesh(mesh: &TriMesh) -> Result<(TriMesh, f64, Vec3)> {
    let bbox = mesh
        .aabb()
        .ok_or_else(|| Error::DegenerateInput("mesh has no vertices".into()))?;
    let extent = bbox.extent();
    let longest = extent.max_component();
    if longest <= 0.0 || mesh.faces.is_empty() {
        return Err(Error::DegenerateInput(
            "mesh has zero extent on all axes".into(),
        ));
    }
    let center = bbox.center();
    let scale = longest / 2.0;
    let mut out = mesh.clone();
    for v in &mut out.vertices {
        *v = (*v - center) / scale;
    }
    Ok((out, scale, center))
}

/// Apply the inverse of [`normalize_mesh`].
pub fn denormalize_mesh(mesh: &TriMesh, scale: f64, center: Vec3) -> TriMesh {
    let mut out = mesh.clone();
    for v in &mut out.vertices {
        *v = *v * scale + center;
    }
    out
}

/// Area-uniform surface sampling: exactly `n` points, face choice
/// proportional to face area, deterministic for a fixed seed.
pub fn sample_surface(mesh: &TriMesh, n: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = rng_from_seed(seed);
    sample_surface_with(mesh, n, &mut rng)
}

/// Same as [`sample_surface`] but drawing from a caller-owned RNG stream.
pub fn sample_surface_with(mesh: &TriMesh, n: usize, rng: &mut Rng) -> Result<PointCloud> {
    let areas: Vec<f64> = (0..mesh.faces.len()).map(|f| mesh.face_area(f)).collect();
    let mut cumulative = Vec::with_capacity(areas.len());
    let mut acc = 0.0;
    for a in &areas {
        acc += a;
        cumulative.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::DegenerateInput("mesh has zero surface area".into()));
    }
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.gen::<f64>() * acc;
        let face = cumulative.partition_point(|&c| c <= r).min(areas.len() - 1);
        let [a, b, c] = mesh.face_vertices(face);
        // Square-root warp gives uniform density over the triangle.
        let su = rng.gen::<f64>().sqrt();
        let r2 = rng.gen::<f64>();
        let w0 = 1.0 - su;
        let w1 = su * (1.0 - r2);
        let w2 = su * r2;
        points.push(a * w0 + b * w1 + c * w2);
        normals.push(mesh.face_normal(face));
    }
    Ok(PointCloud {
        points,
        normals: Some(normals),
    })
}

/// Slab-method ray/box intersection. A ray starting inside the box reports
/// `t_near = 0`.
pub fn ray_aabb(ray: &Ray, bbox: &Aabb) -> Option<(f64, f64)> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    for axis in 0..3 {
        let o = ray.origin.axis(axis);
        let d = ray.direction.axis(axis);
        let (lo, hi) = (bbox.min.axis(axis), bbox.max.axis(axis));
        if d == 0.0 {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let inv = 1.0 / d;
            let mut t0 = (lo - o) * inv;
            let mut t1 = (hi - o) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_near = t_near.max(t0);
            t_far = t_far.min(t1);
            if t_near > t_far {
                return None;
            }
        }
    }
    if t_far < 0.0 {
        return None;
    }
    Some((t_near.max(0.0), t_far))
}

/// Closest positive-t ray/mesh intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub t: f64,
    pub face: usize,
    /// Barycentric weights of the second and third face vertices.
    pub barycentric: (f64, f64),
}

/// First hit of a ray against a mesh through a freshly built BVH. Callers
/// doing many queries should build the [`Bvh`] once and reuse it.
pub fn ray_mesh_first_hit(ray: &Ray, mesh: &TriMesh) -> Option<RayHit> {
    Bvh::build(mesh).first_hit(ray)
}

/// Rotate a point cloud about the +z up-axis by `-view_azimuth`, aligning
/// the cloud with a view at that azimuth.
pub fn align_azimuth(cloud: &PointCloud, view_azimuth: f64) -> PointCloud {
    let points = cloud.points.iter().map(|p| p.rotate_z(-view_azimuth)).collect();
    let normals = cloud
        .normals
        .as_ref()
        .map(|ns| ns.iter().map(|n| n.rotate_z(-view_azimuth)).collect());
    PointCloud { points, normals }
}

/// Moeller-Trumbore with inclusive barycentric bounds so rays through shared
/// edges register on at least one incident face.
pub fn ray_triangle(ray: &Ray, a: Vec3, b: Vec3, c: Vec3) -> Option<(f64, f64, f64)> {
    let e1 = b - a;
    let e2 = c - a;
    let p = ray.direction.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin - a;
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = ray.direction.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv;
    if t <= 1e-12 {
        return None;
    }
    Some((t, u, v))
}

/// Closest point on a triangle to `p` (Ericson's region test).
pub fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let denom = d1 - d3;
        let v = if denom != 0.0 { d1 / denom } else { 0.0 };
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let denom = d2 - d6;
        let w = if denom != 0.0 { d2 / denom } else { 0.0 };
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let denom = (d4 - d3) + (d5 - d6);
        let w = if denom != 0.0 { (d4 - d3) / denom } else { 0.0 };
        return b + (c - b) * w;
    }
    let denom = va + vb + vc;
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

/// Distance from `p` to the triangle `(a, b, c)`.
pub fn distance_point_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    (p - closest_point_on_triangle(p, a, b, c)).length()
}

#[cfg(test)]
mod tests;
