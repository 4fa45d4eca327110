//! Bounding-volume hierarchy over triangles: median split on the centroid
//! along the widest axis, rebuilt per mesh. Supports nearest ray hits and
//! exact closest-distance queries (a pruning optimization over the per
//! triangle minimum, not an approximation).

use super::{ray_aabb, ray_triangle, Aabb, Ray, RayHit, TriMesh};
use crate::math::Vec3;

const LEAF_SIZE: usize = 8;

#[derive(Debug)]
enum NodeKind {
    Leaf { start: u32, len: u32 },
    Internal { left: u32, right: u32 },
}

#[derive(Debug)]
struct Node {
    bbox: Aabb,
    kind: NodeKind,
}

/// Immutable triangle BVH; queries are read-only and thread-safe.
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
    tris: Vec<[Vec3; 3]>,
}

impl Bvh {
    pub fn build(mesh: &TriMesh) -> Bvh {
        let tris: Vec<[Vec3; 3]> = (0..mesh.faces.len())
            .map(|f| mesh.face_vertices(f))
            .collect();
        Bvh::from_triangles(tris)
    }

    pub fn from_triangles(tris: Vec<[Vec3; 3]>) -> Bvh {
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::new();
        if !tris.is_empty() {
            build_node(&tris, &mut order, 0, tris.len(), &mut nodes);
        }
        Bvh { nodes, order, tris }
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    /// Nearest positive-t intersection, identical to the brute-force minimum
    /// over per-triangle hits.
    pub fn first_hit(&self, ray: &Ray) -> Option<RayHit> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<RayHit> = None;
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            match ray_aabb(ray, &node.bbox) {
                None => continue,
                Some((t_near, _)) => {
                    if let Some(b) = &best {
                        if t_near > b.t {
                            continue;
                        }
                    }
                }
            }
            match node.kind {
                NodeKind::Leaf { start, len } => {
                    for &tri_idx in &self.order[start as usize..(start + len) as usize] {
                        let [a, b, c] = self.tris[tri_idx as usize];
                        if let Some((t, u, v)) = ray_triangle(ray, a, b, c) {
                            if best.map_or(true, |h| t < h.t) {
                                best = Some(RayHit {
                                    t,
                                    face: tri_idx as usize,
                                    barycentric: (u, v),
                                });
                            }
                        }
                    }
                }
                NodeKind::Internal { left, right } => {
                    stack.push(left as usize);
                    stack.push(right as usize);
                }
            }
        }
        best
    }

    /// Exact minimum distance from `p` to the mesh surface, with the face
    /// realizing it.
    pub fn closest_distance(&self, p: Vec3) -> Option<(f64, usize)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = f64::INFINITY;
        let mut best_face = 0usize;
        self.closest_rec(0, p, &mut best, &mut best_face);
        Some((best, best_face))
    }

    fn closest_rec(&self, idx: usize, p: Vec3, best: &mut f64, best_face: &mut usize) {
        let node = &self.nodes[idx];
        if node.bbox.distance_squared(p) > *best * *best {
            return;
        }
        match node.kind {
            NodeKind::Leaf { start, len } => {
                for &tri_idx in &self.order[start as usize..(start + len) as usize] {
                    let [a, b, c] = self.tris[tri_idx as usize];
                    let d = super::distance_point_triangle(p, a, b, c);
                    if d < *best {
                        *best = d;
                        *best_face = tri_idx as usize;
                    }
                }
            }
            NodeKind::Internal { left, right } => {
                // Visit the nearer child first for tighter pruning.
                let dl = self.nodes[left as usize].bbox.distance_squared(p);
                let dr = self.nodes[right as usize].bbox.distance_squared(p);
                let (first, second) = if dl <= dr { (left, right) } else { (right, left) };
                self.closest_rec(first as usize, p, best, best_face);
                self.closest_rec(second as usize, p, best, best_face);
            }
        }
    }
}

fn tri_bbox(tri: &[Vec3; 3]) -> Aabb {
    Aabb::new(
        tri[0].min(tri[1]).min(tri[2]),
        tri[0].max(tri[1]).max(tri[2]),
    )
}

fn build_node(
    tris: &[[Vec3; 3]],
    order: &mut Vec<u32>,
    start: usize,
    len: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let mut bbox = tri_bbox(&tris[order[start] as usize]);
    for &i in &order[start..start + len] {
        bbox = bbox.union(&tri_bbox(&tris[i as usize]));
    }
    let idx = nodes.len();
    nodes.push(Node {
        bbox,
        kind: NodeKind::Leaf {
            start: start as u32,
            len: len as u32,
        },
    });
    if len <= LEAF_SIZE {
        return idx;
    }
    let centroid = |t: &[Vec3; 3]| (t[0] + t[1] + t[2]) / 3.0;
    let ext = bbox.extent();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = len / 2;
    order[start..start + len].select_nth_unstable_by(mid, |&a, &b| {
        let ca = centroid(&tris[a as usize]).axis(axis);
        let cb = centroid(&tris[b as usize]).axis(axis);
        ca.partial_cmp(&cb).unwrap_or(std::cmp::Ordering::Equal)
    });
    let left = build_node(tris, order, start, mid, nodes);
    let right = build_node(tris, order, start + mid, len - mid, nodes);
    nodes[idx].kind = NodeKind::Internal {
        left: left as u32,
        right: right as u32,
    };
    idx
}
