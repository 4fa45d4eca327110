//! Auto-encoder training data: occupancy labeling through generalized
//! winding numbers, near-surface and stratified spatial sampling, Fourier
//! positional encoding, and the sample-set binary format.

use crate::error::Error;
use crate::geom::{sample_surface_with, Bvh, PointCloud, TriMesh};
use crate::math::Vec3;
use crate::rng::{rng_from_seed, stage_seed};
use crate::Result;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::io::{Read, Write};

/// Points closer to the surface than this are occupied by the tie rule.
const SURFACE_TIE_EPS: f64 = 1e-9;
/// Slack on the winding threshold so exact-arithmetic ties stay occupied.
const WINDING_TOL: f64 = 1e-6;

/// Prepared occupancy test for one watertight mesh. Construction is O(T);
/// each query sums solid angles over all triangles, which is exact and
/// robust on the fixture sizes this pipeline targets.
pub struct MeshOccupancy {
    tris: Vec<[Vec3; 3]>,
    bvh: Bvh,
}

impl MeshOccupancy {
    pub fn new(mesh: &TriMesh) -> Self {
        let tris = (0..mesh.faces.len())
            .map(|f| mesh.face_vertices(f))
            .collect::<Vec<_>>();
        MeshOccupancy {
            bvh: Bvh::build(mesh),
            tris,
        }
    }

    /// Generalized winding number of `p`: 1 inside, 0 outside, fractional
    /// near open boundaries.
    pub fn winding(&self, p: Vec3) -> f64 {
        let mut total = 0.0;
        for t in &self.tris {
            total += solid_angle(p, t[0], t[1], t[2]);
        }
        total / (4.0 * std::f64::consts::PI)
    }

    /// Occupancy bit: winding >= 1/2, with points exactly on the surface
    /// counted as occupied.
    pub fn contains(&self, p: Vec3) -> bool {
        if let Some((d, _)) = self.bvh.closest_distance(p) {
            if d <= SURFACE_TIE_EPS {
                return true;
            }
        }
        self.winding(p) >= 0.5 - WINDING_TOL
    }

    /// Parallel batch labeling.
    pub fn contains_batch(&self, points: &[Vec3]) -> Vec<bool> {
        points.par_iter().map(|&p| self.contains(p)).collect()
    }

    pub fn distance_to_surface(&self, p: Vec3) -> f64 {
        self.bvh.closest_distance(p).map(|(d, _)| d).unwrap_or(f64::INFINITY)
    }
}

/// Signed solid angle of triangle (a, b, c) seen from `p`
/// (Van Oosterom-Strackee).
fn solid_angle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ra = a - p;
    let rb = b - p;
    let rc = c - p;
    let la = ra.length();
    let lb = rb.length();
    let lc = rc.length();
    let num = ra.dot(rb.cross(rc));
    let den = la * lb * lc + ra.dot(rb) * lc + rb.dot(rc) * la + rc.dot(ra) * lb;
    2.0 * num.atan2(den)
}

/// Occupancy of a single point against a watertight mesh. Builds the
/// acceleration structure per call; batch work should go through
/// [`MeshOccupancy`].
pub fn point_in_mesh(p: Vec3, mesh: &TriMesh) -> bool {
    MeshOccupancy::new(mesh).contains(p)
}

/// Surface samples displaced by isotropic Gaussian noise (sigma per axis),
/// clamped to [-1,1]^3 and labeled. Offsets are redrawn past 6 sigma so
/// every point stays within 6 sigma of its base surface point.
pub fn sample_near_surface(
    mesh: &TriMesh,
    n: usize,
    sigma: f64,
    seed: u64,
) -> Result<Vec<(Vec3, bool)>> {
    if sigma < 0.0 {
        return Err(Error::DegenerateInput("sigma must be non-negative".into()));
    }
    let mut rng = rng_from_seed(seed);
    let base = sample_surface_with(mesh, n, &mut rng)?;
    let draw = |rng: &mut crate::rng::Rng| -> f64 {
        loop {
            let g: f64 = StandardNormal.sample(rng);
            if g.abs() <= 6.0 {
                return g;
            }
        }
    };
    let lo = Vec3::splat(-1.0);
    let hi = Vec3::splat(1.0);
    let points: Vec<Vec3> = base
        .points
        .iter()
        .map(|&p| {
            let offset = Vec3::new(draw(&mut rng), draw(&mut rng), draw(&mut rng)) * sigma;
            (p + offset).clamp(lo, hi)
        })
        .collect();
    let occ = MeshOccupancy::new(mesh);
    let labels = occ.contains_batch(&points);
    Ok(points.into_iter().zip(labels).collect())
}

/// One uniform point per cell of the cells^3 partition of [-1,1]^3,
/// labeled, x-fastest cell order.
pub fn sample_stratified_grid(
    mesh: &TriMesh,
    cells_per_axis: usize,
    seed: u64,
) -> Result<Vec<(Vec3, bool)>> {
    let points = stratified_points(cells_per_axis, seed);
    let occ = MeshOccupancy::new(mesh);
    let labels = occ.contains_batch(&points);
    Ok(points.into_iter().zip(labels).collect())
}

/// The jittered cell centers used by stratified sampling, exposed so
/// independent oracles can relabel the identical point set.
pub fn stratified_points(cells_per_axis: usize, seed: u64) -> Vec<Vec3> {
    stratified_points_in(&crate::geom::Aabb::unit(), cells_per_axis, seed)
}

/// Stratified points over an arbitrary box, one per cell, x-fastest.
pub fn stratified_points_in(
    domain: &crate::geom::Aabb,
    cells_per_axis: usize,
    seed: u64,
) -> Vec<Vec3> {
    let mut rng = rng_from_seed(seed);
    let n = cells_per_axis;
    let ext = domain.extent();
    let cell = ext / n as f64;
    let mut points = Vec::with_capacity(n * n * n);
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                points.push(Vec3::new(
                    domain.min.x + (x as f64 + rng.gen::<f64>()) * cell.x,
                    domain.min.y + (y as f64 + rng.gen::<f64>()) * cell.y,
                    domain.min.z + (z as f64 + rng.gen::<f64>()) * cell.z,
                ));
            }
        }
    }
    points
}

/// Fourier positional encoding configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierEncoding {
    pub bands: usize,
    pub include_input: bool,
}

impl FourierEncoding {
    pub fn new(bands: usize) -> Self {
        assert!(bands >= 1);
        FourierEncoding {
            bands,
            include_input: true,
        }
    }

    /// Feature width per 3D point: 3(1 + 2L) with the input included.
    pub fn width(&self) -> usize {
        let base = if self.include_input { 1 } else { 0 };
        3 * (base + 2 * self.bands)
    }
}

/// Per point: [x, y, z] then per coordinate sin(2^k pi x), cos(2^k pi x)
/// for k = 0..L-1. Row-major output of shape (points.len(), width).
pub fn fourier_encode(points: &[Vec3], enc: &FourierEncoding) -> Vec<f64> {
    let width = enc.width();
    let mut out = Vec::with_capacity(points.len() * width);
    for p in points {
        let coords = [p.x, p.y, p.z];
        if enc.include_input {
            out.extend_from_slice(&coords);
        }
        for c in coords {
            for k in 0..enc.bands {
                let arg = (1u64 << k) as f64 * std::f64::consts::PI * c;
                out.push(arg.sin());
                out.push(arg.cos());
            }
        }
    }
    out
}

/// Defaults for one shape's training data.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SampleConfig {
    pub n_surface: usize,
    pub n_near: usize,
    pub sigma: f64,
    pub grid_cells: usize,
    pub fourier_bands: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            n_surface: 65536,
            n_near: 100_000,
            sigma: 0.01,
            grid_cells: 64,
            fourier_bands: 8,
            seed: 0,
        }
    }
}

/// Pre-computed training data for one shape: encoder input points plus
/// labeled near-surface and stratified spatial points.
#[derive(Debug, Clone)]
pub struct OccupancySampleSet {
    pub surface: PointCloud,
    pub near: Vec<(Vec3, bool)>,
    pub grid: Vec<(Vec3, bool)>,
    pub sigma: f64,
    pub grid_cells: usize,
    pub fourier_bands: usize,
    pub seed: u64,
}

/// Assemble the full sample set for a watertight, normalized mesh.
pub fn build_sample_set(mesh: &TriMesh, config: &SampleConfig) -> Result<OccupancySampleSet> {
    let surface = crate::geom::sample_surface(mesh, config.n_surface, stage_seed(config.seed, "surface"))?;
    let near = sample_near_surface(mesh, config.n_near, config.sigma, stage_seed(config.seed, "near"))?;
    let grid = sample_stratified_grid(mesh, config.grid_cells, stage_seed(config.seed, "grid"))?;
    Ok(OccupancySampleSet {
        surface: PointCloud::new(surface.points),
        near,
        grid,
        sigma: config.sigma,
        grid_cells: config.grid_cells,
        fourier_bands: config.fourier_bands,
        seed: config.seed,
    })
}

const SAMPLE_SET_MAGIC: &[u8; 4] = b"MGOS";
const SAMPLE_SET_VERSION: u32 = 1;
/// Positional-encoding base marker: frequencies are 2^k * pi.
const PE_BASE_HALF_TURNS: u8 = 1;

impl OccupancySampleSet {
    /// Binary layout: magic, version, counts, sigma (f32), grid cells,
    /// fourier bands, PE base marker, seed, then f32 coordinates x-fastest
    /// per point and u8 labels per labeled section.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(SAMPLE_SET_MAGIC)?;
        w.write_all(&SAMPLE_SET_VERSION.to_le_bytes())?;
        w.write_all(&(self.surface.len() as u32).to_le_bytes())?;
        w.write_all(&(self.near.len() as u32).to_le_bytes())?;
        w.write_all(&(self.grid.len() as u32).to_le_bytes())?;
        w.write_all(&(self.sigma as f32).to_le_bytes())?;
        w.write_all(&(self.grid_cells as u32).to_le_bytes())?;
        w.write_all(&(self.fourier_bands as u32).to_le_bytes())?;
        w.write_all(&[PE_BASE_HALF_TURNS, 0, 0, 0])?;
        w.write_all(&self.seed.to_le_bytes())?;
        let write_point = |w: &mut dyn Write, p: &Vec3| -> std::io::Result<()> {
            w.write_all(&(p.x as f32).to_le_bytes())?;
            w.write_all(&(p.y as f32).to_le_bytes())?;
            w.write_all(&(p.z as f32).to_le_bytes())
        };
        for p in &self.surface.points {
            write_point(w, p)?;
        }
        for (p, _) in &self.near {
            write_point(w, p)?;
        }
        for (_, l) in &self.near {
            w.write_all(&[*l as u8])?;
        }
        for (p, _) in &self.grid {
            write_point(w, p)?;
        }
        for (_, l) in &self.grid {
            w.write_all(&[*l as u8])?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SAMPLE_SET_MAGIC {
            return Err(Error::Format("bad sample set magic".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        if u32::from_le_bytes(b4) != SAMPLE_SET_VERSION {
            return Err(Error::Format("unsupported sample set version".into()));
        }
        let read_u32 = |r: &mut dyn Read| -> Result<u32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        };
        let n_surface = read_u32(r)? as usize;
        let n_near = read_u32(r)? as usize;
        let n_grid = read_u32(r)? as usize;
        let sigma = f32::from_le_bytes({
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            b
        }) as f64;
        let grid_cells = read_u32(r)? as usize;
        let fourier_bands = read_u32(r)? as usize;
        let mut flags = [0u8; 4];
        r.read_exact(&mut flags)?;
        if flags[0] != PE_BASE_HALF_TURNS {
            return Err(Error::Format("unknown positional encoding base".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let seed = u64::from_le_bytes(b8);

        let read_points = |r: &mut dyn Read, n: usize| -> Result<Vec<Vec3>> {
            let mut out = Vec::with_capacity(n);
            let mut b = [0u8; 4];
            for _ in 0..n {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    r.read_exact(&mut b)?;
                    *c = f32::from_le_bytes(b) as f64;
                }
                out.push(Vec3::from_array(coords));
            }
            Ok(out)
        };
        let read_labels = |r: &mut dyn Read, n: usize| -> Result<Vec<bool>> {
            let mut buf = vec![0u8; n];
            r.read_exact(&mut buf)?;
            Ok(buf.into_iter().map(|b| b != 0).collect())
        };
        let surface = read_points(r, n_surface)?;
        let near_points = read_points(r, n_near)?;
        let near_labels = read_labels(r, n_near)?;
        let grid_points = read_points(r, n_grid)?;
        let grid_labels = read_labels(r, n_grid)?;
        Ok(OccupancySampleSet {
            surface: PointCloud::new(surface),
            near: near_points.into_iter().zip(near_labels).collect(),
            grid: grid_points.into_iter().zip(grid_labels).collect(),
            sigma,
            grid_cells,
            fourier_bands,
            seed,
        })
    }
}
