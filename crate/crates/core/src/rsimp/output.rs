use crate::geom::Vec3;
use crate::mesh::{Face, Mesh};

/// Result of a simplification: one vertex per cluster and the original faces
/// that still span three distinct clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplifiedMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Face>,
    /// Original vertex index → index into `vertices`.
    pub vertex_map: Vec<u32>,
}

impl SimplifiedMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Converts into a full [`Mesh`]; fails when no faces survived.
    pub fn to_mesh(&self) -> crate::Result<Mesh> {
        Mesh::new(self.vertices.clone(), self.faces.clone())
    }
}

/// Keeps every original face whose vertices map to three different output
/// vertices, in original order and orientation.
pub fn retriangulate(mesh: &Mesh, vertex_map: &[u32]) -> Vec<Face> {
    mesh.faces()
        .iter()
        .map(|f| f.map(|v| vertex_map[v as usize]))
        .filter(|[a, b, c]| a != b && b != c && a != c)
        .collect()
}
