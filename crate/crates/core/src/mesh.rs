//! Indexed triangle mesh with per-face derived data and vertex adjacency.
//!
//! A [`Mesh`] is immutable once built. Faces whose cross product vanishes are
//! kept (so face indices stay aligned with the input) but flagged as
//! degenerate, carry a zero normal and zero area, and are skipped by every
//! normal or area accumulation downstream.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::Vec3;

pub type Face = [u32; 3];

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    /// Box around a non-empty point set. Returns `None` when `points` is empty.
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Option<Aabb> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), p| (lo.min(*p), hi.max(*p)));
        Some(Aabb { min, max })
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().length()
    }

    pub fn longest_axis_length(&self) -> f64 {
        let e = self.extent();
        e.x.max(e.y).max(e.z)
    }

    pub fn contains(&self, p: Vec3, eps: f64) -> bool {
        p.x >= self.min.x - eps
            && p.y >= self.min.y - eps
            && p.z >= self.min.z - eps
            && p.x <= self.max.x + eps
            && p.y <= self.max.y + eps
            && p.z <= self.max.z + eps
    }
}

/// Compressed adjacency lists: `items[offsets[v]..offsets[v + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Csr {
    fn from_lists(lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut items = Vec::with_capacity(total);
        offsets.push(0);
        for list in lists {
            items.extend_from_slice(&list);
            offsets.push(items.len() as u32);
        }
        Csr { offsets, items }
    }

    #[inline]
    fn get(&self, v: usize) -> &[u32] {
        &self.items[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    faces: Vec<Face>,
    face_normal: Vec<Vec3>,
    face_area: Vec<f64>,
    face_midpoint: Vec<Vec3>,
    degenerate: Vec<bool>,
    vertex_vertices: Csr,
    vertex_faces: Csr,
    total_area: f64,
}

impl Mesh {
    /// Builds a mesh from positions and triangle index triples, computing
    /// face normals, areas, midpoints and both adjacency relations.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Face>) -> Result<Mesh> {
        if faces.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i as usize >= n) {
                return Err(Error::IndexOutOfRange {
                    face: fi,
                    index: bad as u64,
                    vertex_count: n,
                });
            }
        }

        let mut face_normal = Vec::with_capacity(faces.len());
        let mut face_area = Vec::with_capacity(faces.len());
        let mut face_midpoint = Vec::with_capacity(faces.len());
        let mut degenerate = Vec::with_capacity(faces.len());
        let mut total_area = 0.0;
        for f in &faces {
            let [a, b, c] = f.map(|i| vertices[i as usize]);
            face_midpoint.push((a + b + c) / 3.0);
            let cross = (b - a).cross(c - a);
            match cross.try_normalize() {
                Some(normal) => {
                    let area = 0.5 * cross.length();
                    face_normal.push(normal);
                    face_area.push(area);
                    degenerate.push(false);
                    total_area += area;
                }
                None => {
                    face_normal.push(Vec3::ZERO);
                    face_area.push(0.0);
                    degenerate.push(true);
                }
            }
        }

        let (vertex_vertices, vertex_faces) = build_adjacency(n, &faces);

        Ok(Mesh {
            vertices,
            faces,
            face_normal,
            face_area,
            face_midpoint,
            degenerate,
            vertex_vertices,
            vertex_faces,
            total_area,
        })
    }

    /// Builds a mesh from arbitrary polygons, fan-triangulating each polygon
    /// around its first vertex. Polygons with fewer than three indices are
    /// rejected.
    pub fn from_polygons(vertices: Vec<Vec3>, polygons: &[Vec<u32>]) -> Result<Mesh> {
        let mut faces = Vec::with_capacity(polygons.len());
        for (pi, poly) in polygons.iter().enumerate() {
            if poly.len() < 3 {
                return Err(Error::Structure(format!(
                    "polygon {pi} has {} vertices",
                    poly.len()
                )));
            }
            fan_triangulate(poly, &mut faces);
        }
        Mesh::new(vertices, faces)
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    #[inline]
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    #[inline]
    pub fn vertex(&self, v: u32) -> Vec3 {
        self.vertices[v as usize]
    }

    #[inline]
    pub fn face(&self, f: u32) -> Face {
        self.faces[f as usize]
    }

    /// Unit normal, or the zero vector for a degenerate face.
    #[inline]
    pub fn face_normal(&self, f: u32) -> Vec3 {
        self.face_normal[f as usize]
    }

    #[inline]
    pub fn face_area(&self, f: u32) -> f64 {
        self.face_area[f as usize]
    }

    #[inline]
    pub fn face_midpoint(&self, f: u32) -> Vec3 {
        self.face_midpoint[f as usize]
    }

    #[inline]
    pub fn is_degenerate(&self, f: u32) -> bool {
        self.degenerate[f as usize]
    }

    pub fn degenerate_face_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }

    /// Sum of all non-degenerate face areas.
    #[inline]
    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    /// Distinct neighbours of `v`, ascending.
    #[inline]
    pub fn adjacent_vertices(&self, v: u32) -> &[u32] {
        self.vertex_vertices.get(v as usize)
    }

    /// Faces incident to `v`, ascending.
    #[inline]
    pub fn incident_faces(&self, v: u32) -> &[u32] {
        self.vertex_faces.get(v as usize)
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::from_points(&self.vertices).unwrap_or(Aabb {
            min: Vec3::ZERO,
            max: Vec3::ZERO,
        })
    }

    /// SHA-256 over the vertex coordinate bits and face indices.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update((self.vertices.len() as u64).to_le_bytes());
        h.update((self.faces.len() as u64).to_le_bytes());
        for v in &self.vertices {
            for c in v.to_array() {
                h.update(c.to_bits().to_le_bytes());
            }
        }
        for f in &self.faces {
            for i in f {
                h.update(i.to_le_bytes());
            }
        }
        h.finalize().into()
    }

    /// Recomputes the adjacency relations from the face list. Used to check
    /// that construction is idempotent.
    pub fn rebuild_adjacency(&self) -> Mesh {
        let (vertex_vertices, vertex_faces) = build_adjacency(self.vertices.len(), &self.faces);
        Mesh {
            vertex_vertices,
            vertex_faces,
            ..self.clone()
        }
    }

    pub fn same_adjacency(&self, other: &Mesh) -> bool {
        self.vertex_vertices == other.vertex_vertices && self.vertex_faces == other.vertex_faces
    }
}

pub(crate) fn fan_triangulate(poly: &[u32], out: &mut Vec<Face>) {
    for k in 1..poly.len() - 1 {
        out.push([poly[0], poly[k], poly[k + 1]]);
    }
}

fn build_adjacency(vertex_count: usize, faces: &[Face]) -> (Csr, Csr) {
    let mut vv: Vec<Vec<u32>> = vec![Vec::new(); vertex_count];
    let mut vf: Vec<Vec<u32>> = vec![Vec::new(); vertex_count];
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let a = f[k];
            let b = f[(k + 1) % 3];
            if a != b {
                vv[a as usize].push(b);
                vv[b as usize].push(a);
            }
            // a face with a repeated index is listed once per distinct vertex
            if !f[..k].contains(&a) {
                vf[a as usize].push(fi as u32);
            }
        }
    }
    for list in &mut vv {
        list.sort_unstable();
        list.dedup();
    }
    (Csr::from_lists(vv), Csr::from_lists(vf))
}

/// Summary of structural properties; produced by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub face_count: usize,
    pub degenerate_faces: usize,
    pub duplicate_faces: usize,
    pub unreferenced_vertices: usize,
    pub non_finite_vertices: usize,
    /// Connected components among referenced vertices.
    pub connected_components: usize,
}

impl ValidationReport {
    /// A mesh can be handed to a renderer: it has at least one proper face and
    /// no non-finite coordinates.
    pub fn is_renderable(&self) -> bool {
        self.face_count > self.degenerate_faces && self.non_finite_vertices == 0
    }
}

pub fn validate(mesh: &Mesh) -> ValidationReport {
    let n = mesh.vertex_count();

    let mut keys: Vec<[u32; 3]> = mesh
        .faces()
        .iter()
        .map(|f| {
            let mut k = *f;
            k.sort_unstable();
            k
        })
        .collect();
    keys.sort_unstable();
    let duplicate_faces = keys.windows(2).filter(|w| w[0] == w[1]).count();

    let unreferenced_vertices = (0..n as u32)
        .filter(|&v| mesh.incident_faces(v).is_empty())
        .count();
    let non_finite_vertices = mesh.vertices().iter().filter(|v| !v.is_finite()).count();

    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut components = 0;
    for start in 0..n as u32 {
        if seen[start as usize] || mesh.incident_faces(start).is_empty() {
            continue;
        }
        components += 1;
        seen[start as usize] = true;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &w in mesh.adjacent_vertices(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
    }

    ValidationReport {
        vertex_count: n,
        face_count: mesh.face_count(),
        degenerate_faces: mesh.degenerate_face_count(),
        duplicate_faces,
        unreferenced_vertices,
        non_finite_vertices,
        connected_components: components,
    }
}
