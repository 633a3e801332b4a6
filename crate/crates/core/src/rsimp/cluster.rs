use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::Mesh;
use crate::numerics::{jacobi_eigen, solve_min_quadric, EigenDecomposition, Sym3};

/// A group of original vertices (and every face touching them) that will be
/// replaced by one output vertex.
///
/// A face with vertices in several clusters is listed by each of them and
/// contributes its full area and normal to each.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Unique, assigned in creation order.
    pub id: u64,
    /// Vertex indices, ascending.
    pub vertices: Vec<u32>,
    /// Indices of faces with at least one vertex in this cluster, ascending.
    pub faces: Vec<u32>,
    /// Area-weighted sum of face normals (not normalized).
    pub mean_normal: Vec3,
    /// Mean of the cluster's vertex positions.
    pub mean_vertex: Vec3,
    /// Normal variation: the splitting priority.
    pub variation: f64,
    /// Total area of the cluster's non-degenerate faces.
    pub area: f64,
}

impl Cluster {
    /// Creates a cluster and computes its statistics.
    pub fn new(id: u64, vertices: Vec<u32>, faces: Vec<u32>, mesh: &Mesh) -> Cluster {
        let mut c = Cluster {
            id,
            vertices,
            faces,
            mean_normal: Vec3::ZERO,
            mean_vertex: Vec3::ZERO,
            variation: 0.0,
            area: 0.0,
        };
        compute_cluster_stats(&mut c, mesh);
        c
    }

    /// Ratio of the mean normal's length to the total area, in `[0, 1]`;
    /// 1 for a flat, consistently oriented patch.
    pub fn planarity(&self) -> f64 {
        planarity(self.mean_normal, self.area)
    }

    pub fn non_degenerate_faces<'a>(&'a self, mesh: &'a Mesh) -> impl Iterator<Item = u32> + 'a {
        self.faces.iter().copied().filter(|&f| !mesh.is_degenerate(f))
    }

    /// Whether a split can make progress: more than one vertex and at least
    /// one face with a defined normal.
    pub fn is_splittable(&self, mesh: &Mesh) -> bool {
        self.vertices.len() > 1 && self.non_degenerate_faces(mesh).next().is_some()
    }
}

fn planarity(mean_normal: Vec3, area: f64) -> f64 {
    if area > 0.0 {
        (mean_normal.length() / area).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Recomputes mean normal, area, mean vertex and normal variation from the
/// cluster's vertex and face lists.
pub fn compute_cluster_stats(cluster: &mut Cluster, mesh: &Mesh) {
    let mut mean_normal = Vec3::ZERO;
    let mut area = 0.0;
    for f in cluster.non_degenerate_faces(mesh) {
        let a = mesh.face_area(f);
        mean_normal += mesh.face_normal(f) * a;
        area += a;
    }

    let mut sum = Vec3::ZERO;
    for &v in &cluster.vertices {
        sum += mesh.vertex(v);
    }
    cluster.mean_vertex = if cluster.vertices.is_empty() {
        Vec3::ZERO
    } else {
        sum / cluster.vertices.len() as f64
    };

    let model_area = mesh.total_area();
    if area > 0.0 && model_area > 0.0 {
        cluster.mean_normal = mean_normal;
        cluster.area = area;
        cluster.variation = (area / model_area) * (1.0 - planarity(mean_normal, area));
    } else {
        cluster.mean_normal = Vec3::ZERO;
        cluster.area = area;
        cluster.variation = 0.0;
    }
}

/// Unweighted sum of face normal outer products over the cluster.
pub fn normal_covariance(cluster: &Cluster, mesh: &Mesh) -> Sym3 {
    let mut a = Sym3::ZERO;
    for f in cluster.non_degenerate_faces(mesh) {
        a += Sym3::outer(mesh.face_normal(f));
    }
    a
}

/// Principal directions of normal variation: eigenpairs of the normal
/// covariance, largest first.
pub fn analyze_variation(cluster: &Cluster, mesh: &Mesh) -> Result<EigenDecomposition> {
    if cluster.non_degenerate_faces(mesh).next().is_none() {
        return Err(Error::Numeric("cluster has no non-degenerate faces"));
    }
    jacobi_eigen(&normal_covariance(cluster, mesh))
}

/// Quadric terms `(A, B, c)` of the summed squared distance to the planes of
/// the cluster's faces, with each plane offset taken through face vertex 0.
pub fn plane_quadric(cluster: &Cluster, mesh: &Mesh) -> (Sym3, Vec3, f64) {
    let mut a = Sym3::ZERO;
    let mut b = Vec3::ZERO;
    let mut c = 0.0;
    for f in cluster.non_degenerate_faces(mesh) {
        let n = mesh.face_normal(f);
        let d = -n.dot(mesh.vertex(mesh.face(f)[0]));
        a += Sym3::outer(n);
        b += n * d;
        c += d * d;
    }
    (a, b, c)
}

/// Output position for a cluster: the point minimizing squared distance to
/// its face planes, or the mean vertex when that minimum is not unique.
pub fn representative_vertex(cluster: &Cluster, mesh: &Mesh) -> Vec3 {
    let (a, b, _) = plane_quadric(cluster, mesh);
    solve_min_quadric(&a, b, cluster.mean_vertex).point
}
