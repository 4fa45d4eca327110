use super::*;
use crate::fixtures;

fn unit_cube_at(origin: Vec3, size: f64) -> TriMesh {
    fixtures::box_mesh(
        origin + Vec3::splat(size / 2.0),
        Vec3::splat(size / 2.0),
    )
}

// -------- normalize_mesh --------

#[test]
fn normalize_cube_to_unit() {
    let mesh = unit_cube_at(Vec3::ZERO, 2.0);
    let (out, scale, center) = normalize_mesh(&mesh).unwrap();
    let bb = out.aabb().unwrap();
    assert_eq!(bb.min, Vec3::splat(-1.0));
    assert_eq!(bb.max, Vec3::splat(1.0));
    assert_eq!(scale, 1.0);
    assert_eq!(center, Vec3::splat(1.0));
}

#[test]
fn normalize_identity_when_already_unit() {
    let mesh = unit_cube_at(Vec3::splat(-1.0), 2.0);
    let (out, scale, center) = normalize_mesh(&mesh).unwrap();
    assert_eq!(scale, 1.0);
    assert_eq!(center, Vec3::ZERO);
    for (a, b) in out.vertices.iter().zip(&mesh.vertices) {
        assert_eq!(a, b);
    }
}

#[test]
fn normalize_degenerate_point_mesh() {
    let mesh = TriMesh::new(vec![Vec3::ZERO, Vec3::ZERO, Vec3::ZERO], vec![[0, 1, 2]]);
    assert!(matches!(
        normalize_mesh(&mesh),
        Err(crate::Error::DegenerateInput(_))
    ));
}

#[test]
fn normalize_roundtrip_within_1e7() {
    let mesh = fixtures::torus(0.9, 0.3, 16, 8).translated(Vec3::new(3.0, -2.0, 0.5));
    let (norm, scale, center) = normalize_mesh(&mesh).unwrap();
    let back = denormalize_mesh(&norm, scale, center);
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        assert!(a.distance(*b) < 1e-7);
    }
}

// -------- sample_surface --------

#[test]
fn samples_lie_on_single_triangle() {
    let tri = TriMesh::new(
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ],
        vec![[0, 1, 2]],
    );
    let cloud = sample_surface(&tri, 1000, 1).unwrap();
    assert_eq!(cloud.len(), 1000);
    for p in &cloud.points {
        // Barycentric coordinates in the triangle's plane.
        assert!(p.z.abs() < 1e-12);
        assert!(p.x >= 0.0 && p.y >= 0.0 && p.x + p.y <= 1.0 + 1e-12);
    }
}

#[test]
fn face_counts_follow_area_ratio() {
    // Two triangles with area ratio 9:1.
    let mesh = TriMesh::new(
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(9.0, 0.0, 0.0),
            Vec3::new(0.0, 2.0, 0.0),
            Vec3::new(10.0, 0.0, 0.0),
            Vec3::new(9.0, 2.0, 0.0), // area 1 triangle: base 1, height 2
        ],
        vec![[0, 1, 2], [1, 3, 4]],
    );
    let a0 = mesh.face_area(0);
    let a1 = mesh.face_area(1);
    assert!((a0 / a1 - 9.0).abs() < 1e-12);
    let n = 10_000usize;
    let cloud = sample_surface(&mesh, n, 42).unwrap();
    // Classify samples by which face they landed on (x + y/... use plane split).
    let on_first = cloud
        .points
        .iter()
        .filter(|p| {
            distance_point_triangle(**p, mesh.vertices[0], mesh.vertices[1], mesh.vertices[2])
                < 1e-9
        })
        .count();
    // Binomial 3-sigma bound around n * 0.9.
    let expected = 0.9 * n as f64;
    let sigma = (n as f64 * 0.9 * 0.1).sqrt();
    assert!(
        (on_first as f64 - expected).abs() <= 3.0 * sigma,
        "on_first = {on_first}, expected {expected} +- {}",
        3.0 * sigma
    );
}

#[test]
fn sphere_sample_mean_radius() {
    // Table-scale sample count; fine tessellation keeps chord sag below the
    // 1e-3 tolerance.
    let radius = 0.8;
    let mesh = fixtures::sphere(radius, 128, 64);
    let cloud = sample_surface(&mesh, 65536, 7).unwrap();
    let mean: f64 =
        cloud.points.iter().map(|p| p.length()).sum::<f64>() / cloud.len() as f64;
    assert!((mean - radius).abs() < 1e-3, "mean {mean}");
}

#[test]
fn sample_surface_deterministic() {
    let mesh = fixtures::sphere(0.8, 16, 8);
    let a = sample_surface(&mesh, 512, 9).unwrap();
    let b = sample_surface(&mesh, 512, 9).unwrap();
    assert_eq!(a.points, b.points);
}

#[test]
fn per_face_frequency_chi_square() {
    use rand::Rng as _;
    // 10 triangles with distinct areas in one soup.
    let mut rng = crate::rng::rng_from_seed(3);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for k in 0..10u32 {
        let base = Vec3::new(rng.gen::<f64>() * 4.0, rng.gen::<f64>() * 4.0, k as f64);
        let b = base + Vec3::new(1.0 + k as f64 * 0.5, 0.0, 0.0);
        let c = base + Vec3::new(0.0, 1.0 + k as f64 * 0.3, 0.0);
        let i = vertices.len() as u32;
        vertices.extend([base, b, c]);
        faces.push([i, i + 1, i + 2]);
    }
    let mesh = TriMesh::new(vertices, faces);
    let total: f64 = mesh.total_area();
    let n = 100_000usize;
    let cloud = sample_surface(&mesh, n, 11).unwrap();
    let mut counts = [0usize; 10];
    'outer: for p in &cloud.points {
        for f in 0..10 {
            let [a, b, c] = mesh.face_vertices(f);
            if distance_point_triangle(*p, a, b, c) < 1e-9 {
                counts[f] += 1;
                continue 'outer;
            }
        }
        panic!("sample not on any face");
    }
    let mut stat = 0.0;
    for f in 0..10 {
        let expected = n as f64 * mesh.face_area(f) / total;
        let diff = counts[f] as f64 - expected;
        stat += diff * diff / expected;
    }
    // chi-square with 9 degrees of freedom; p > 0.01 <=> stat below the
    // 0.99 quantile.
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let q99 = ChiSquared::new(9.0).unwrap().inverse_cdf(0.99);
    assert!(stat < q99, "chi-square stat {stat} >= {q99}");
}

// -------- ray_aabb --------

#[test]
fn ray_aabb_hit_from_outside() {
    let ray = Ray::new(Vec3::new(-2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
    let (t0, t1) = ray_aabb(&ray, &Aabb::unit()).unwrap();
    assert!((t0 - 1.0).abs() < 1e-12 && (t1 - 3.0).abs() < 1e-12);
}

#[test]
fn ray_aabb_origin_inside_clamps_entry() {
    let ray = Ray::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)).unwrap();
    let (t0, t1) = ray_aabb(&ray, &Aabb::unit()).unwrap();
    assert_eq!(t0, 0.0);
    assert!((t1 - 1.0).abs() < 1e-12);
}

#[test]
fn ray_aabb_miss() {
    let ray = Ray::new(Vec3::new(-2.0, 5.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
    assert!(ray_aabb(&ray, &Aabb::unit()).is_none());
}

#[test]
fn ray_aabb_endpoints_on_boundary() {
    let ray = Ray::new(
        Vec3::new(-3.0, 0.2, -0.4),
        Vec3::new(1.0, 0.1, 0.2).normalized(),
    )
    .unwrap();
    if let Some((t0, t1)) = ray_aabb(&ray, &Aabb::unit()) {
        for t in [t0, t1] {
            let p = ray.at(t);
            let on_face = [p.x, p.y, p.z]
                .iter()
                .any(|c| (c.abs() - 1.0).abs() < 1e-9);
            assert!(on_face, "point {p:?} not on box boundary");
        }
    }
}

// -------- ray_mesh_first_hit --------

/// Independent triangle intersection for the oracle: plane hit plus
/// same-side edge tests, no shared code with Moeller-Trumbore.
fn oracle_hit(ray: &Ray, a: Vec3, b: Vec3, c: Vec3) -> Option<f64> {
    let n = (b - a).cross(c - a);
    let denom = n.dot(ray.direction);
    if denom.abs() < 1e-14 {
        return None;
    }
    let t = n.dot(a - ray.origin) / denom;
    if t <= 1e-12 {
        return None;
    }
    let p = ray.at(t);
    let inside = (b - a).cross(p - a).dot(n) >= -1e-12
        && (c - b).cross(p - b).dot(n) >= -1e-12
        && (a - c).cross(p - c).dot(n) >= -1e-12;
    inside.then_some(t)
}

fn oracle_first_hit(ray: &Ray, mesh: &TriMesh) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for f in 0..mesh.faces.len() {
        let [a, b, c] = mesh.face_vertices(f);
        if let Some(t) = oracle_hit(ray, a, b, c) {
            if best.map_or(true, |(bt, _)| t < bt) {
                best = Some((t, f));
            }
        }
    }
    best
}

#[test]
fn first_hit_on_unit_sphere() {
    let mesh = fixtures::sphere(1.0, 48, 24);
    let ray = Ray::new(Vec3::new(-2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
    let hit = ray_mesh_first_hit(&ray, &mesh).unwrap();
    // One tessellation chord of error allowed.
    let chord = 1.0 - (std::f64::consts::PI / 24.0).cos();
    assert!((hit.t - 1.0).abs() <= chord + 1e-9, "t = {}", hit.t);
}

#[test]
fn first_hit_miss_pointing_away() {
    let mesh = fixtures::sphere(1.0, 16, 8);
    let ray = Ray::new(Vec3::new(-2.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)).unwrap();
    assert!(ray_mesh_first_hit(&ray, &mesh).is_none());
}

#[test]
fn shared_edge_reports_one_hit() {
    // Two triangles sharing the edge x=0..1 at y=0; ray passes exactly
    // through the shared edge.
    let mesh = TriMesh::new(
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 1.0, 0.0),
            Vec3::new(0.5, -1.0, 0.0),
        ],
        vec![[0, 1, 2], [0, 3, 1]],
    );
    let ray = Ray::new(Vec3::new(0.5, 0.0, 2.0), Vec3::new(0.0, 0.0, -1.0)).unwrap();
    let hit = ray_mesh_first_hit(&ray, &mesh).expect("edge ray must hit");
    assert!((hit.t - 2.0).abs() < 1e-12);
}

#[test]
fn bvh_matches_bruteforce_on_random_rays() {
    use rand::Rng as _;
    let fixture_meshes = [
        fixtures::sphere(0.8, 20, 10),
        fixtures::torus(0.55, 0.22, 20, 10),
        fixtures::box_mesh(Vec3::ZERO, Vec3::new(0.7, 0.5, 0.4)),
        fixtures::csg_union(),
    ];
    let mut rng = crate::rng::rng_from_seed(17);
    for mesh in &fixture_meshes {
        let bvh = Bvh::build(mesh);
        for _ in 0..1000 {
            let origin = Vec3::new(
                rng.gen::<f64>() * 4.0 - 2.0,
                rng.gen::<f64>() * 4.0 - 2.0,
                rng.gen::<f64>() * 4.0 - 2.0,
            );
            let dir = Vec3::new(
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            );
            if dir.length() < 1e-6 {
                continue;
            }
            let ray = Ray::new(origin, dir).unwrap();
            let fast = bvh.first_hit(&ray);
            let slow = oracle_first_hit(&ray, mesh);
            match (fast, slow) {
                (None, None) => {}
                (Some(h), Some((t, _))) => {
                    assert!((h.t - t).abs() < 1e-7, "t mismatch {} vs {}", h.t, t);
                }
                (f, s) => panic!("hit disagreement: bvh={f:?} oracle={s:?}"),
            }
        }
    }
}

// -------- align_azimuth --------

#[test]
fn azimuth_zero_is_identity() {
    let cloud = PointCloud::new(vec![Vec3::new(0.3, -0.2, 0.9)]);
    let out = align_azimuth(&cloud, 0.0);
    assert_eq!(out.points, cloud.points);
}

#[test]
fn azimuth_quarter_turn_convention() {
    let cloud = PointCloud::new(vec![Vec3::new(1.0, 0.0, 0.0)]);
    let out = align_azimuth(&cloud, std::f64::consts::FRAC_PI_2);
    let p = out.points[0];
    assert!(p.x.abs() < 1e-12 && (p.y + 1.0).abs() < 1e-12 && p.z.abs() < 1e-12);
}

#[test]
fn azimuth_inverse_composition() {
    use rand::Rng as _;
    let mut rng = crate::rng::rng_from_seed(5);
    let points: Vec<Vec3> = (0..64)
        .map(|_| {
            Vec3::new(
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
            )
        })
        .collect();
    let cloud = PointCloud::new(points.clone());
    let theta = 1.234;
    let back = align_azimuth(&align_azimuth(&cloud, theta), -theta);
    for (a, b) in back.points.iter().zip(&points) {
        assert!(a.distance(*b) < 1e-9);
    }
}

#[test]
fn azimuth_preserves_pairwise_distances() {
    use rand::Rng as _;
    let mut rng = crate::rng::rng_from_seed(6);
    let points: Vec<Vec3> = (0..32)
        .map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen()))
        .collect();
    let cloud = PointCloud::new(points.clone());
    let rotated = align_azimuth(&cloud, 0.777);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let before = points[i].distance(points[j]);
            let after = rotated.points[i].distance(rotated.points[j]);
            assert!((before - after).abs() < 1e-9);
        }
    }
}

// -------- OBJ round-trip --------

#[test]
fn obj_roundtrip_preserves_vertices_and_order() {
    let mesh = fixtures::torus(0.55, 0.22, 12, 6);
    let mut buf = Vec::new();
    emit_obj(&mesh, &mut buf).unwrap();
    let back = parse_obj(buf.as_slice()).unwrap();
    assert_eq!(back.vertices.len(), mesh.vertices.len());
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        assert_eq!(a, b, "float text round-trip must be exact");
    }
    assert_eq!(back.faces, mesh.faces);
}

#[test]
fn obj_roundtrip_with_uvs_and_normals() {
    let mesh = fixtures::uv_quad(0.5, 0.0);
    let mut buf = Vec::new();
    emit_obj(&mesh, &mut buf).unwrap();
    let back = parse_obj(buf.as_slice()).unwrap();
    assert_eq!(back.faces, mesh.faces);
    let uvs = back.uvs.expect("uvs preserved");
    assert_eq!(uvs, mesh.uvs.unwrap());
    let normals = back.normals.expect("normals preserved");
    assert_eq!(normals, mesh.normals.unwrap());
}

#[test]
fn obj_rejects_polygon_faces() {
    let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
    assert!(parse_obj(text.as_bytes()).is_err());
}
