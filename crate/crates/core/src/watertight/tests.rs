use super::*;
use crate::fixtures;
use crate::geom::distance_point_triangle;

fn analytic_sphere_udf(radius: f64, n: usize) -> ScalarGrid {
    let domain = Aabb::unit();
    let mut values = Vec::with_capacity(n * n * n);
    let grid = ScalarGrid {
        resolution: [n, n, n],
        domain,
        values: vec![],
    };
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let p = grid.cell_center(x, y, z);
                values.push((p.length() - radius).abs());
            }
        }
    }
    ScalarGrid::new([n, n, n], domain, values).unwrap()
}

// -------- lookup table self-consistency --------

#[test]
fn mc_tables_are_internally_consistent() {
    for case in 0..256usize {
        let row = &mc_tables::TRIANGLE_TABLE[case];
        let mut used_edges = 0u16;
        let mut i = 0;
        while i < 16 && row[i] >= 0 {
            let edge = row[i] as usize;
            assert!(edge < 12);
            used_edges |= 1 << edge;
            // Edge corners must straddle the surface for this case.
            let [a, b] = mc_tables::EDGE_CORNERS[edge];
            let inside_a = case & (1 << a) != 0;
            let inside_b = case & (1 << b) != 0;
            assert_ne!(inside_a, inside_b, "case {case} edge {edge} does not cross");
            i += 1;
        }
        assert_eq!(i % 3, 0, "case {case} has a partial triangle");
        assert_eq!(
            used_edges,
            mc_tables::EDGE_TABLE[case],
            "edge table mismatch for case {case}"
        );
    }
}

// -------- udf_grid --------

#[test]
fn udf_center_over_sphere_is_radius() {
    let mesh = fixtures::sphere(0.8, 32, 16);
    // Odd resolution puts one cell center exactly at the origin.
    let n = 9;
    let domain = Aabb::unit();
    let grid = udf_grid(&mesh, [n, n, n], domain).unwrap();
    let mid = n / 2;
    let chord_sag = 0.8 * (1.0 - (std::f64::consts::PI / 16.0).cos());
    assert!((grid.value(mid, mid, mid) - 0.8).abs() <= chord_sag + 1e-9);
}

#[test]
fn udf_zero_at_vertex() {
    // Place a triangle vertex exactly on a cell center.
    let n = 4usize;
    let domain = Aabb::unit();
    let probe = ScalarGrid {
        resolution: [n, n, n],
        domain,
        values: vec![],
    };
    let v0 = probe.cell_center(1, 1, 1);
    let mesh = crate::geom::TriMesh::new(
        vec![v0, v0 + crate::Vec3::new(0.3, 0.0, 0.0), v0 + crate::Vec3::new(0.0, 0.3, 0.0)],
        vec![[0, 1, 2]],
    );
    let grid = udf_grid(&mesh, [n, n, n], domain).unwrap();
    assert_eq!(grid.value(1, 1, 1), 0.0);
}

#[test]
fn udf_matches_bruteforce_scan_exactly() {
    let mesh = crate::geom::TriMesh::new(
        vec![
            crate::Vec3::new(-0.4, -0.2, 0.1),
            crate::Vec3::new(0.5, -0.1, -0.3),
            crate::Vec3::new(0.0, 0.6, 0.4),
        ],
        vec![[0, 1, 2]],
    );
    let n = 16;
    let grid = udf_grid(&mesh, [n, n, n], Aabb::unit()).unwrap();
    let [a, b, c] = mesh.face_vertices(0);
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let p = grid.cell_center(x, y, z);
                let brute = distance_point_triangle(p, a, b, c);
                assert_eq!(grid.value(x, y, z), brute, "mismatch at ({x},{y},{z})");
            }
        }
    }
}

#[test]
fn udf_multi_triangle_equals_per_triangle_minimum() {
    let mesh = fixtures::csg_union();
    let n = 12;
    let grid = udf_grid(&mesh, [n, n, n], Aabb::unit()).unwrap();
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let p = grid.cell_center(x, y, z);
                let brute = (0..mesh.faces.len())
                    .map(|f| {
                        let [a, b, c] = mesh.face_vertices(f);
                        distance_point_triangle(p, a, b, c)
                    })
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(grid.value(x, y, z), brute);
            }
        }
    }
}

#[test]
fn udf_empty_mesh_rejected() {
    let mesh = crate::geom::TriMesh::default();
    assert!(matches!(
        udf_grid(&mesh, [4, 4, 4], Aabb::unit()),
        Err(crate::Error::DegenerateInput(_))
    ));
}

// -------- marching_cubes --------

#[test]
fn mc_on_analytic_sphere_field() {
    let n = 32;
    let grid = analytic_sphere_udf(0.8, n);
    let threshold = 2.0 / n as f64;
    let mesh = marching_cubes(&grid, threshold).unwrap();
    assert!(mesh.is_closed_manifold(), "offset shell must be closed");
    let cell_diag = grid.cell_size().length();
    for v in &mesh.vertices {
        // Distance to the nearer of the two offset spheres.
        let d = (v.length() - 0.8).abs();
        assert!(
            (d - threshold).abs() <= cell_diag,
            "vertex {v:?} off the offset surface"
        );
    }
}

#[test]
fn mc_constant_grid_is_empty_surface() {
    let grid = ScalarGrid::new([4, 4, 4], Aabb::unit(), vec![0.0; 64]).unwrap();
    assert!(matches!(
        marching_cubes(&grid, 0.5),
        Err(crate::Error::EmptySurface(_))
    ));
}

#[test]
fn mc_single_corner_case_yields_one_triangle() {
    // 2x2x2 cells = a single marching cube; one corner above threshold.
    let mut values = vec![0.0; 8];
    values[0] = 1.0;
    let grid = ScalarGrid::new([2, 2, 2], Aabb::unit(), values).unwrap();
    let mesh = marching_cubes(&grid, 0.5).unwrap();
    assert_eq!(mesh.faces.len(), 1);
    // Each vertex on a cell edge at the interpolated crossing.
    for v in &mesh.vertices {
        let on_axis_mid = [v.x, v.y, v.z]
            .iter()
            .filter(|c| (c.abs() - 0.0).abs() < 1e-12)
            .count();
        assert!(on_axis_mid >= 1, "vertex {v:?} not on an edge midpoint");
    }
}

// -------- fill_internal_cavities --------

fn nested_shell_grid(n: usize) -> ScalarGrid {
    let domain = Aabb::unit();
    let probe = ScalarGrid {
        resolution: [n, n, n],
        domain,
        values: vec![],
    };
    let mut values = Vec::with_capacity(n * n * n);
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let d = probe.cell_center(x, y, z).length();
                values.push(((d - 0.8).abs()).min((d - 0.4).abs()));
            }
        }
    }
    ScalarGrid::new([n, n, n], domain, values).unwrap()
}

#[test]
fn fill_removes_nested_shell_cavities() {
    let n = 48;
    let grid = nested_shell_grid(n);
    let threshold = 2.0 / n as f64;
    // Before filling: outside, inter-shell gap, and inner core are separate
    // empty components.
    let before = label_empty_components(&grid, threshold);
    assert!(before.component_count() >= 3, "expected ≥3 empty components");
    let filled = fill_internal_cavities(&grid, threshold);
    let after = label_empty_components(&filled, threshold);
    assert_eq!(after.component_count(), 1, "only the outside should remain");
    // The extracted surface is the outer shell only.
    let mesh = marching_cubes(&filled, threshold).unwrap();
    assert!(mesh.is_closed_manifold());
    for v in &mesh.vertices {
        assert!(v.length() > 0.8 - 2.0 * threshold, "inner shell survived at {v:?}");
    }
}

#[test]
fn fill_solid_grid_unchanged() {
    let grid = ScalarGrid::new([4, 4, 4], Aabb::unit(), vec![0.0; 64]).unwrap();
    let filled = fill_internal_cavities(&grid, 0.5);
    assert_eq!(filled.values, grid.values);
}

#[test]
fn fill_empty_grid_unchanged_one_component() {
    let grid = ScalarGrid::new([4, 4, 4], Aabb::unit(), vec![10.0; 64]).unwrap();
    let filled = fill_internal_cavities(&grid, 0.5);
    assert_eq!(filled.values, grid.values);
    assert_eq!(label_empty_components(&filled, 0.5).component_count(), 1);
}

#[test]
fn fill_is_idempotent() {
    let grid = nested_shell_grid(32);
    let threshold = 2.0 / 32.0;
    let once = fill_internal_cavities(&grid, threshold);
    let twice = fill_internal_cavities(&once, threshold);
    assert_eq!(once.values, twice.values);
}

// -------- watertight_convert --------

#[test]
fn convert_open_cylinder_is_closed() {
    let mesh = fixtures::open_cylinder(0.5, 0.7, 32);
    let out = watertight_convert(&mesh, 128).unwrap();
    assert!(out.is_closed_manifold());
    let euler = out.euler_characteristic();
    assert_eq!(euler % 2, 0);
    // Thickened open tube: sphere-like (genus 0) or torus-like (genus 1).
    assert!(euler == 2 || euler == 0, "euler {euler}");
}

#[test]
fn convert_sphere_volume_within_5_percent() {
    // Radius 1.0 keeps the threshold-inflation below the 5% budget.
    let mesh = fixtures::sphere(1.0, 48, 24);
    let out = watertight_convert(&mesh, 128).unwrap();
    assert!(out.is_closed_manifold());
    let vin = mesh.signed_volume();
    let vout = out.signed_volume();
    assert!(
        (vout - vin).abs() / vin < 0.05,
        "volume drift {} vs {}",
        vout,
        vin
    );
}

#[test]
fn convert_holed_plane_is_thin_slab() {
    let mesh = fixtures::holed_plane();
    let res = 128usize;
    let out = watertight_convert(&mesh, res).unwrap();
    assert!(out.is_closed_manifold());
    let bb = out.aabb().unwrap();
    let thickness = bb.extent().z;
    let expected = 2.0 * (2.0 / res as f64);
    let h = 2.0 / res as f64;
    assert!(
        (thickness - expected).abs() <= 0.5 * h,
        "thickness {thickness} vs {expected}"
    );
}

#[test]
fn convert_error_shrinks_with_resolution() {
    let radius = 0.8;
    let mesh = fixtures::sphere(radius, 48, 24);
    let hausdorff = |m: &crate::geom::TriMesh| -> f64 {
        m.vertices
            .iter()
            .map(|v| (v.length() - radius).abs())
            .fold(0.0, f64::max)
    };
    let coarse = hausdorff(&watertight_convert(&mesh, 64).unwrap());
    let fine = hausdorff(&watertight_convert(&mesh, 128).unwrap());
    assert!(
        coarse >= fine,
        "error must shrink with resolution: {coarse} < {fine}"
    );
}

// -------- scalar grid format --------

#[test]
fn scalar_grid_roundtrip() {
    let grid = nested_shell_grid(8);
    let mut buf = Vec::new();
    grid.write_to(&mut buf).unwrap();
    let back = ScalarGrid::read_from(&mut buf.as_slice()).unwrap();
    assert_eq!(back.resolution, grid.resolution);
    for (a, b) in back.values.iter().zip(&grid.values) {
        assert_eq!(*a, *b as f32 as f64, "storage is f32");
    }
}
