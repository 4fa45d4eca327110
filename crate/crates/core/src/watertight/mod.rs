//! Watertight conversion of arbitrary triangle soups: unsigned distance
//! field on a regular grid, flood-fill cavity removal, and thresholded
//! marching cubes with welded vertices.

pub mod mc_tables;

use crate::error::Error;
use crate::geom::{Aabb, Bvh, TriMesh};
use crate::math::Vec3;
use crate::Result;
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{Read, Write};

/// Dense scalar field sampled at cell centers, x-fastest storage order.
#[derive(Debug, Clone)]
pub struct ScalarGrid {
    pub resolution: [usize; 3],
    pub domain: Aabb,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(resolution: [usize; 3], domain: Aabb, values: Vec<f64>) -> Result<Self> {
        let expected = resolution[0] * resolution[1] * resolution[2];
        if values.len() != expected {
            return Err(Error::shape(
                "scalar grid values",
                &[values.len()],
                &resolution,
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("scalar grid contains non-finite values".into()));
        }
        Ok(ScalarGrid {
            resolution,
            domain,
            values,
        })
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.resolution[1] + y) * self.resolution[0] + x
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[self.index(x, y, z)]
    }

    /// Size of one cell along each axis.
    pub fn cell_size(&self) -> Vec3 {
        let e = self.domain.extent();
        Vec3::new(
            e.x / self.resolution[0] as f64,
            e.y / self.resolution[1] as f64,
            e.z / self.resolution[2] as f64,
        )
    }

    /// World-space center of cell (x, y, z).
    pub fn cell_center(&self, x: usize, y: usize, z: usize) -> Vec3 {
        let cs = self.cell_size();
        Vec3::new(
            self.domain.min.x + (x as f64 + 0.5) * cs.x,
            self.domain.min.y + (y as f64 + 0.5) * cs.y,
            self.domain.min.z + (z as f64 + 0.5) * cs.z,
        )
    }

    /// Binary format: magic "MGSG", 3 x u32 little-endian resolution, then
    /// f32 values x-fastest.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(b"MGSG")?;
        for r in self.resolution {
            w.write_all(&(r as u32).to_le_bytes())?;
        }
        for axis in 0..3 {
            w.write_all(&(self.domain.min.axis(axis) as f32).to_le_bytes())?;
        }
        for axis in 0..3 {
            w.write_all(&(self.domain.max.axis(axis) as f32).to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&(*v as f32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"MGSG" {
            return Err(Error::Format("bad scalar grid magic".into()));
        }
        let mut u32buf = [0u8; 4];
        let mut resolution = [0usize; 3];
        for res in resolution.iter_mut() {
            r.read_exact(&mut u32buf)?;
            *res = u32::from_le_bytes(u32buf) as usize;
        }
        let mut bounds = [0f64; 6];
        for b in bounds.iter_mut() {
            r.read_exact(&mut u32buf)?;
            *b = f32::from_le_bytes(u32buf) as f64;
        }
        let count = resolution[0] * resolution[1] * resolution[2];
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut u32buf)?;
            values.push(f32::from_le_bytes(u32buf) as f64);
        }
        ScalarGrid::new(
            resolution,
            Aabb::new(
                Vec3::new(bounds[0], bounds[1], bounds[2]),
                Vec3::new(bounds[3], bounds[4], bounds[5]),
            ),
            values,
        )
    }
}

/// Connected-component labels over grid cells; 0 is reserved for the
/// outside-connected empty region.
#[derive(Debug, Clone)]
pub struct LabelGrid {
    pub resolution: [usize; 3],
    pub labels: Vec<u32>,
}

/// Sentinel for occupied cells, which belong to no empty component.
pub const OCCUPIED: u32 = u32::MAX;

impl LabelGrid {
    /// Number of empty components (labels are contiguous from 0).
    pub fn component_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|&&l| l != OCCUPIED)
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

/// Unsigned distance from every cell center to the mesh surface. Matches
/// the brute-force per-triangle minimum exactly.
pub fn udf_grid(mesh: &TriMesh, resolution: [usize; 3], domain: Aabb) -> Result<ScalarGrid> {
    if mesh.faces.is_empty() {
        return Err(Error::DegenerateInput("mesh has no faces".into()));
    }
    let bvh = Bvh::build(mesh);
    let count = resolution[0] * resolution[1] * resolution[2];
    let grid = ScalarGrid {
        resolution,
        domain,
        values: vec![0.0; count],
    };
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let x = i % resolution[0];
            let y = (i / resolution[0]) % resolution[1];
            let z = i / (resolution[0] * resolution[1]);
            let p = grid.cell_center(x, y, z);
            bvh.closest_distance(p).map(|(d, _)| d).unwrap_or(f64::INFINITY)
        })
        .collect();
    ScalarGrid::new(resolution, domain, values)
}

/// Empty/occupied classification used by both cavity filling and the
/// flood-fill oracle: a cell is empty iff its value exceeds the threshold.
fn is_empty(v: f64, threshold: f64) -> bool {
    v > threshold
}

/// Label the empty cells of `grid` into 6-connected components. Component 0
/// is the one touching the domain boundary (the outside); occupied cells get
/// the sentinel `u32::MAX`.
pub fn label_empty_components(grid: &ScalarGrid, threshold: f64) -> LabelGrid {
    let [nx, ny, nz] = grid.resolution;
    let mut labels = vec![OCCUPIED; grid.values.len()];
    let mut next_label = 0u32;

    let mut stack = Vec::new();
    let flood = |labels: &mut Vec<u32>, seed: usize, label: u32, stack: &mut Vec<usize>| {
        stack.push(seed);
        labels[seed] = label;
        while let Some(i) = stack.pop() {
            let x = i % nx;
            let y = (i / nx) % ny;
            let z = i / (nx * ny);
            let mut visit = |j: usize| {
                if labels[j] == OCCUPIED && is_empty(grid.values[j], threshold) {
                    labels[j] = label;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < nx {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - nx);
            }
            if y + 1 < ny {
                visit(i + nx);
            }
            if z > 0 {
                visit(i - nx * ny);
            }
            if z + 1 < nz {
                visit(i + nx * ny);
            }
        }
    };

    // All boundary-touching empty cells belong to component 0.
    let mut seeded_outside = false;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                if x != 0 && x != nx - 1 && y != 0 && y != ny - 1 && z != 0 && z != nz - 1 {
                    continue;
                }
                let i = (z * ny + y) * nx + x;
                if labels[i] == OCCUPIED && is_empty(grid.values[i], threshold) {
                    flood(&mut labels, i, 0, &mut stack);
                    seeded_outside = true;
                }
            }
        }
    }
    if seeded_outside {
        next_label = 1;
    }
    for i in 0..labels.len() {
        if labels[i] == OCCUPIED && is_empty(grid.values[i], threshold) {
            flood(&mut labels, i, next_label, &mut stack);
            next_label += 1;
        }
    }
    LabelGrid {
        resolution: grid.resolution,
        labels,
    }
}

/// Relabel every empty cell that is not 6-connected to the domain boundary
/// as occupied (value 0), leaving exactly one empty component.
pub fn fill_internal_cavities(grid: &ScalarGrid, threshold: f64) -> ScalarGrid {
    let labels = label_empty_components(grid, threshold);
    let mut out = grid.clone();
    for (i, &label) in labels.labels.iter().enumerate() {
        if label != OCCUPIED && label != 0 {
            out.values[i] = 0.0;
        }
    }
    out
}

/// Marching cubes over the dual grid of cell centers. A corner is inside
/// iff its value is below `threshold`; vertices are placed at the linear
/// interpolation crossing and welded by grid-edge key so shared edges map
/// to shared vertices.
pub fn marching_cubes(grid: &ScalarGrid, threshold: f64) -> Result<TriMesh> {
    let [nx, ny, nz] = grid.resolution;
    if nx < 2 || ny < 2 || nz < 2 {
        return Err(Error::DegenerateInput(
            "marching cubes needs at least 2 cells per axis".into(),
        ));
    }
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    // Key: (point index a, point index b) with a < b, over grid points.
    let mut edge_vertex: HashMap<(u32, u32), u32> = HashMap::new();

    let point_index = |x: usize, y: usize, z: usize| -> u32 {
        ((z * ny + y) * nx + x) as u32
    };

    let corner_offsets: [[usize; 3]; 8] = [
        [0, 0, 0],
        [1, 0, 0],
        [1, 1, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, 0, 1],
        [1, 1, 1],
        [0, 1, 1],
    ];

    for z in 0..nz - 1 {
        for y in 0..ny - 1 {
            for x in 0..nx - 1 {
                let mut corner_vals = [0.0f64; 8];
                let mut corner_ids = [0u32; 8];
                let mut corner_pos = [Vec3::ZERO; 8];
                for (c, off) in corner_offsets.iter().enumerate() {
                    let (cx, cy, cz) = (x + off[0], y + off[1], z + off[2]);
                    corner_vals[c] = grid.value(cx, cy, cz);
                    corner_ids[c] = point_index(cx, cy, cz);
                    corner_pos[c] = grid.cell_center(cx, cy, cz);
                }
                let mut case = 0usize;
                for (c, &v) in corner_vals.iter().enumerate() {
                    if v < threshold {
                        case |= 1 << c;
                    }
                }
                if case == 0 || case == 255 {
                    continue;
                }
                let tri_row = &mc_tables::TRIANGLE_TABLE[case];
                let mut i = 0;
                while tri_row[i] >= 0 {
                    let mut tri = [0u32; 3];
                    // Table order is inward for this corner layout; swap two
                    // edges so face normals point out of the occupied region.
                    let edge_order = [tri_row[i], tri_row[i + 2], tri_row[i + 1]];
                    for (k, t) in tri.iter_mut().enumerate() {
                        let edge = edge_order[k] as usize;
                        let [ca, cb] = mc_tables::EDGE_CORNERS[edge];
                        let (ia, ib) = (corner_ids[ca], corner_ids[cb]);
                        let key = (ia.min(ib), ia.max(ib));
                        *t = *edge_vertex.entry(key).or_insert_with(|| {
                            let (va, vb) = (corner_vals[ca], corner_vals[cb]);
                            let frac = if (vb - va).abs() < 1e-300 {
                                0.5
                            } else {
                                ((threshold - va) / (vb - va)).clamp(0.0, 1.0)
                            };
                            let p = corner_pos[ca].lerp(corner_pos[cb], frac);
                            let idx = vertices.len() as u32;
                            vertices.push(p);
                            idx
                        });
                    }
                    if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
                        faces.push(tri);
                    }
                    i += 3;
                }
            }
        }
    }
    if faces.is_empty() {
        return Err(Error::EmptySurface(
            "no iso-level crossing anywhere in the grid".into(),
        ));
    }
    Ok(TriMesh::new(vertices, faces))
}

/// Number of padding cells added around the [-1,1]^3 mesh domain so the
/// inflated shell never touches the grid boundary.
const PAD_CELLS: usize = 4;

/// Full conversion recipe: distance field, cavity fill at threshold
/// 2/resolution, then marching cubes at the same threshold.
///
/// `resolution` counts cells across the [-1,1] mesh domain; the grid is
/// padded by [`PAD_CELLS`] on every side at the same cell size.
pub fn watertight_convert(mesh: &TriMesh, resolution: usize) -> Result<TriMesh> {
    let threshold = 2.0 / resolution as f64;
    let h = 2.0 / resolution as f64;
    let pad = PAD_CELLS as f64 * h;
    let n = resolution + 2 * PAD_CELLS;
    let domain = Aabb::new(Vec3::splat(-1.0 - pad), Vec3::splat(1.0 + pad));
    let grid = udf_grid(mesh, [n, n, n], domain)?;
    let filled = fill_internal_cavities(&grid, threshold);
    marching_cubes(&filled, threshold)
}

#[cfg(test)]
mod tests;
