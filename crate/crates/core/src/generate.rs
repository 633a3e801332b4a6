//! Procedural test meshes: grids, tori, spheres, cylinder bands, caps, cubes.
//!
//! These back the `bench` command and the test suites so that every
//! experiment can be reproduced without external model files.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use crate::geom::Vec3;
use crate::mesh::{Face, Mesh};

fn build(vertices: Vec<Vec3>, faces: Vec<Face>) -> Mesh {
    Mesh::new(vertices, faces).expect("generated mesh is well formed")
}

/// Flat `n × n` grid of unit-spaced quads in the z = 0 plane, split into
/// `2n²` triangles with normals along +z.
pub fn grid(n: usize, spacing: f64) -> Mesh {
    assert!(n >= 1);
    let stride = n + 1;
    let mut vertices = Vec::with_capacity(stride * stride);
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec3::new(i as f64 * spacing, j as f64 * spacing, 0.0));
        }
    }
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = (j * stride + i) as u32;
            let b = a + 1;
            let c = a + stride as u32;
            let d = c + 1;
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    build(vertices, faces)
}

/// Closed torus around the z axis with `major × minor` quads (`2·major·minor`
/// triangles), outward normals.
pub fn torus(major_radius: f64, minor_radius: f64, major: usize, minor: usize) -> Mesh {
    assert!(major >= 3 && minor >= 3);
    let mut vertices = Vec::with_capacity(major * minor);
    for i in 0..major {
        let u = TAU * i as f64 / major as f64;
        let (su, cu) = u.sin_cos();
        for j in 0..minor {
            let v = TAU * j as f64 / minor as f64;
            let (sv, cv) = v.sin_cos();
            let ring = major_radius + minor_radius * cv;
            vertices.push(Vec3::new(ring * cu, ring * su, minor_radius * sv));
        }
    }
    let idx = |i: usize, j: usize| ((i % major) * minor + (j % minor)) as u32;
    let mut faces = Vec::with_capacity(2 * major * minor);
    for i in 0..major {
        for j in 0..minor {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    build(vertices, faces)
}

/// Torus with approximately `faces` triangles and a 4:1 segment ratio
/// (major radius 1, minor radius 0.4).
pub fn torus_with_face_count(faces: usize) -> Mesh {
    let minor = ((faces as f64 / 8.0).sqrt().round() as usize).max(3);
    let major = ((faces as f64 / (2.0 * minor as f64)).round() as usize).max(3);
    torus(1.0, 0.4, major, minor)
}

/// Subdivided icosahedron projected onto a sphere; `20·4^subdivisions` faces.
pub fn icosphere(center: Vec3, radius: f64, subdivisions: u32) -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut unit: Vec<Vec3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|&p| Vec3::from_array(p).try_normalize().unwrap())
    .collect();
    let mut faces: Vec<Face> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut mid = |a: u32, b: u32, verts: &mut Vec<Vec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let p = ((verts[a as usize] + verts[b as usize]) * 0.5)
                    .try_normalize()
                    .unwrap();
                verts.push(p);
                verts.len() as u32 - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut unit);
            let bc = mid(b, c, &mut unit);
            let ca = mid(c, a, &mut unit);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let vertices = unit.into_iter().map(|p| center + p * radius).collect();
    build(vertices, faces)
}

/// Open cylinder band around the z axis covering `arc` radians of angle
/// (centred on +x), `segments` quads around and `rings` quads along z.
pub fn cylinder_band(radius: f64, height: f64, arc: f64, segments: usize, rings: usize) -> Mesh {
    let closed = (arc - TAU).abs() < 1e-12;
    let columns = if closed { segments } else { segments + 1 };
    let mut vertices = Vec::with_capacity(columns * (rings + 1));
    for r in 0..=rings {
        let z = height * r as f64 / rings as f64;
        for s in 0..columns {
            let a = -arc / 2.0 + arc * s as f64 / segments as f64;
            vertices.push(Vec3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    let idx = |r: usize, s: usize| (r * columns + s % columns) as u32;
    let mut faces = Vec::with_capacity(2 * segments * rings);
    for r in 0..rings {
        for s in 0..segments {
            let a = idx(r, s);
            let b = idx(r, s + 1);
            let c = idx(r + 1, s + 1);
            let d = idx(r + 1, s);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    build(vertices, faces)
}

/// Spherical cap (dome) around +z with the given polar half-angle, built from
/// `rings` latitude bands and `segments` longitude slices.
pub fn spherical_cap(radius: f64, half_angle: f64, rings: usize, segments: usize) -> Mesh {
    assert!(half_angle > 0.0 && half_angle <= PI);
    let mut vertices = vec![Vec3::new(0.0, 0.0, radius)];
    for r in 1..=rings {
        let phi = half_angle * r as f64 / rings as f64;
        let (sp, cp) = phi.sin_cos();
        for s in 0..segments {
            let theta = TAU * s as f64 / segments as f64;
            vertices.push(Vec3::new(radius * sp * theta.cos(), radius * sp * theta.sin(), radius * cp));
        }
    }
    let ring = |r: usize, s: usize| (1 + (r - 1) * segments + s % segments) as u32;
    let mut faces = Vec::new();
    for s in 0..segments {
        faces.push([0, ring(1, s), ring(1, s + 1)]);
    }
    for r in 1..rings {
        for s in 0..segments {
            let a = ring(r, s);
            let b = ring(r + 1, s);
            let c = ring(r + 1, s + 1);
            let d = ring(r, s + 1);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    build(vertices, faces)
}

/// Axis-aligned cube with 8 vertices and 12 outward-facing triangles.
pub fn cube(min: Vec3, size: f64) -> Mesh {
    let mut vertices = Vec::with_capacity(8);
    for i in 0..8u32 {
        let o = Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64);
        vertices.push(min + o * size);
    }
    let faces = vec![
        [0, 2, 3],
        [0, 3, 1], // z = 0
        [4, 5, 7],
        [4, 7, 6], // z = 1
        [0, 1, 5],
        [0, 5, 4], // y = 0
        [2, 6, 7],
        [2, 7, 3], // y = 1
        [0, 4, 6],
        [0, 6, 2], // x = 0
        [1, 3, 7],
        [1, 7, 5], // x = 1
    ];
    build(vertices, faces)
}

/// Concatenates meshes into one, offsetting indices.
pub fn merge(meshes: &[Mesh]) -> Mesh {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for m in meshes {
        let base = vertices.len() as u32;
        vertices.extend_from_slice(m.vertices());
        faces.extend(m.faces().iter().map(|f| f.map(|i| i + base)));
    }
    build(vertices, faces)
}

/// Applies `f` to every vertex position, keeping connectivity.
pub fn transform(mesh: &Mesh, f: impl Fn(Vec3) -> Vec3) -> Mesh {
    build(mesh.vertices().iter().map(|&p| f(p)).collect(), mesh.faces().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate;

    #[test]
    fn sizes() {
        assert_eq!(grid(20, 1.0).face_count(), 800);
        assert_eq!(grid(20, 1.0).vertex_count(), 441);
        assert_eq!(torus_with_face_count(20_000).face_count(), 20_000);
        assert_eq!(torus_with_face_count(5_000).face_count(), 5_000);
        assert_eq!(icosphere(Vec3::ZERO, 1.0, 2).face_count(), 320);
        assert_eq!(cube(Vec3::ZERO, 1.0).face_count(), 12);
    }

    #[test]
    fn closed_surfaces_are_single_components() {
        for m in [torus(1.0, 0.3, 12, 6), icosphere(Vec3::ZERO, 1.0, 2), cube(Vec3::ZERO, 1.0)] {
            let r = validate(&m);
            assert_eq!(r.connected_components, 1);
            assert_eq!(r.degenerate_faces, 0);
            assert_eq!(r.duplicate_faces, 0);
            assert_eq!(r.unreferenced_vertices, 0);
        }
    }

    #[test]
    fn outward_orientation() {
        let c = cube(Vec3::ZERO, 1.0);
        let center = Vec3::splat(0.5);
        for f in 0..c.face_count() as u32 {
            assert!(c.face_normal(f).dot(c.face_midpoint(f) - center) > 0.0);
        }
        let s = icosphere(Vec3::ZERO, 1.0, 1);
        for f in 0..s.face_count() as u32 {
            assert!(s.face_normal(f).dot(s.face_midpoint(f)) > 0.0);
        }
        let t = torus(1.0, 0.3, 12, 6);
        for f in 0..t.face_count() as u32 {
            let m = t.face_midpoint(f);
            let ring = Vec3::new(m.x, m.y, 0.0).try_normalize().unwrap();
            assert!(t.face_normal(f).dot(m - ring) > 0.0);
        }
    }
}
