//! Splitting one cluster: choose how many planes to cut with, orient and
//! position them, distribute vertices, then separate disconnected pieces.

use crate::geom::Vec3;
use crate::mesh::Mesh;
use crate::numerics::{angle_between, project_onto_plane, EigenDecomposition};

use super::cluster::Cluster;

/// Half-width of the angular band around the max-curvature direction used to
/// pick the face midpoints that position the partitioning planes.
pub const POSITION_BAND_DEGREES: f64 = 2.5;

/// Eigenvalues below this fraction of the largest are treated as zero when
/// classifying the split. Keeps round-off in flat clusters from masquerading
/// as curvature.
pub const EIGENVALUE_ZERO_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitArity {
    Two,
    Four,
    Eight,
}

impl SplitArity {
    pub fn plane_count(self) -> usize {
        match self {
            SplitArity::Two => 1,
            SplitArity::Four => 2,
            SplitArity::Eight => 3,
        }
    }
}

/// Classifies the normal-variation pattern from eigenvalues sorted
/// descending `(c_mn, c_M, c_m)`.
pub fn split_arity(values: [f64; 3]) -> SplitArity {
    let zero = EIGENVALUE_ZERO_RATIO * values[0].abs();
    let [mean, major, minor] = values.map(|v| if v.abs() <= zero { 0.0 } else { v });
    if major < 2.0 * minor && mean < 2.0 * major {
        SplitArity::Eight
    } else if minor > 0.0 && major / minor <= 4.0 {
        SplitArity::Four
    } else {
        SplitArity::Two
    }
}

/// Normals of the partitioning planes: max-curvature direction, then
/// min-curvature direction, then the mean normal for an eight-way split.
pub fn choose_split(eigen: &EigenDecomposition, mean_normal: Vec3) -> Vec<Vec3> {
    let [mean_dir, major, minor] = eigen.vectors;
    match split_arity(eigen.values) {
        SplitArity::Two => vec![major],
        SplitArity::Four => vec![major, minor],
        // normals that cancel out leave no mean direction; the dominant
        // eigenvector is the closest substitute
        SplitArity::Eight => vec![major, minor, mean_normal.try_normalize().unwrap_or(mean_dir)],
    }
}

/// Point through which the partitioning planes pass.
///
/// Face midpoints are projected onto the plane through the mean vertex with
/// the mean normal; those lying within the angular band around ±(max-curvature
/// direction projected into that plane) are averaged. Falls back to the mean
/// vertex when any of these is undefined or the band is empty.
pub fn position_planes(cluster: &Cluster, mesh: &Mesh, eigen: &EigenDecomposition) -> Vec3 {
    let origin = cluster.mean_vertex;
    let Some(normal) = cluster.mean_normal.try_normalize() else {
        return origin;
    };
    let axis = project_onto_plane(eigen.vectors[1], normal);
    if axis.try_normalize().is_none() {
        return origin;
    }

    let mut sum = Vec3::ZERO;
    let mut count = 0usize;
    for &f in &cluster.faces {
        let projected = origin + project_onto_plane(mesh.face_midpoint(f) - origin, normal);
        let Ok(angle) = angle_between(projected - origin, axis) else {
            continue;
        };
        if angle <= POSITION_BAND_DEGREES || angle >= 180.0 - POSITION_BAND_DEGREES {
            sum += projected;
            count += 1;
        }
    }
    if count == 0 {
        origin
    } else {
        sum / count as f64
    }
}

/// Distributes vertices by which side of each plane they fall on
/// (`(v − anchor)·n ≥ 0` is the positive side). Empty groups are dropped;
/// groups come out in sign-code order and keep the input vertex order.
pub fn partition_vertices(vertices: &[u32], mesh: &Mesh, normals: &[Vec3], anchor: Vec3) -> Vec<Vec<u32>> {
    debug_assert!((1..=3).contains(&normals.len()));
    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); 1 << normals.len()];
    for &v in vertices {
        let d = mesh.vertex(v) - anchor;
        let code = normals
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, n)| acc | (usize::from(d.dot(*n) >= 0.0) << k));
        groups[code].push(v);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Splits at the median projection onto `direction`; the lower half takes the
/// middle vertex. `None` for fewer than two vertices.
pub fn median_split(vertices: &[u32], mesh: &Mesh, direction: Vec3) -> Option<[Vec<u32>; 2]> {
    if vertices.len() < 2 {
        return None;
    }
    let mut keyed: Vec<(f64, u32)> = vertices
        .iter()
        .map(|&v| (mesh.vertex(v).dot(direction), v))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let lower_len = vertices.len().div_ceil(2);
    let mut lower: Vec<u32> = keyed[..lower_len].iter().map(|k| k.1).collect();
    let mut upper: Vec<u32> = keyed[lower_len..].iter().map(|k| k.1).collect();
    lower.sort_unstable();
    upper.sort_unstable();
    Some([lower, upper])
}

/// Per-mesh scratch space so that per-cluster work stays proportional to the
/// cluster size rather than the mesh size.
#[derive(Debug, Clone)]
pub struct Workspace {
    member: Vec<u32>,
    visited: Vec<u32>,
    label: Vec<u32>,
    face_seen: Vec<u32>,
    stamp: u32,
    queue: Vec<u32>,
}

impl Workspace {
    pub fn new(mesh: &Mesh) -> Self {
        Workspace {
            member: vec![0; mesh.vertex_count()],
            visited: vec![0; mesh.vertex_count()],
            label: vec![0; mesh.vertex_count()],
            face_seen: vec![0; mesh.face_count()],
            stamp: 0,
            queue: Vec::new(),
        }
    }

    fn next_stamp(&mut self) -> u32 {
        if self.stamp == u32::MAX {
            self.member.fill(0);
            self.visited.fill(0);
            self.face_seen.fill(0);
            self.stamp = 0;
        }
        self.stamp += 1;
        self.stamp
    }

    /// All faces with at least one vertex in `vertices`, ascending.
    pub fn gather_faces(&mut self, vertices: &[u32], mesh: &Mesh) -> Vec<u32> {
        let stamp = self.next_stamp();
        let mut faces = Vec::new();
        for &v in vertices {
            for &f in mesh.incident_faces(v) {
                if self.face_seen[f as usize] != stamp {
                    self.face_seen[f as usize] = stamp;
                    faces.push(f);
                }
            }
        }
        faces.sort_unstable();
        faces
    }

    /// Connected components of the graph induced on `vertices` by mesh edges.
    ///
    /// Components are ordered by their first vertex in `vertices`, and each
    /// keeps the input order.
    pub fn connected_components(&mut self, vertices: &[u32], mesh: &Mesh) -> Vec<Vec<u32>> {
        let stamp = self.next_stamp();
        for &v in vertices {
            self.member[v as usize] = stamp;
        }
        let mut count = 0u32;
        for &start in vertices {
            if self.visited[start as usize] == stamp {
                continue;
            }
            self.visited[start as usize] = stamp;
            self.label[start as usize] = count;
            self.queue.clear();
            self.queue.push(start);
            let mut head = 0;
            while head < self.queue.len() {
                let v = self.queue[head];
                head += 1;
                for &w in mesh.adjacent_vertices(v) {
                    let w = w as usize;
                    if self.member[w] == stamp && self.visited[w] != stamp {
                        self.visited[w] = stamp;
                        self.label[w] = count;
                        self.queue.push(w as u32);
                    }
                }
            }
            count += 1;
        }
        if count == 1 {
            return vec![vertices.to_vec()];
        }
        let mut components = vec![Vec::new(); count as usize];
        for &v in vertices {
            components[self.label[v as usize] as usize].push(v);
        }
        components
    }
}

/// Breadth-first connectivity check: one cluster per connected component.
/// A connected cluster comes back unchanged.
pub fn topology_split(cluster: Cluster, mesh: &Mesh, ws: &mut Workspace, next_id: &mut u64) -> Vec<Cluster> {
    let components = ws.connected_components(&cluster.vertices, mesh);
    if components.len() == 1 {
        return vec![cluster];
    }
    components
        .into_iter()
        .map(|vertices| {
            let faces = ws.gather_faces(&vertices, mesh);
            let id = *next_id;
            *next_id += 1;
            Cluster::new(id, vertices, faces, mesh)
        })
        .collect()
}

/// Result of partitioning one cluster.
#[derive(Debug, Clone)]
pub struct Partition {
    pub children: Vec<Cluster>,
    /// Non-empty vertex groups before the connectivity check.
    pub groups: usize,
    pub used_median: bool,
}

/// Splits a cluster by the given planes through `anchor`, falling back to a
/// median split along the first plane normal when the planes leave every
/// vertex on one side. Each group is passed through the connectivity check
/// when `topology_check` is set. Returns `None` if the cluster cannot be
/// divided at all.
pub fn partition_cluster(
    cluster: &Cluster,
    mesh: &Mesh,
    plane_normals: &[Vec3],
    anchor: Vec3,
    topology_check: bool,
    ws: &mut Workspace,
    next_id: &mut u64,
) -> Option<Partition> {
    let mut groups = partition_vertices(&cluster.vertices, mesh, plane_normals, anchor);
    let mut used_median = false;
    if groups.len() < 2 {
        let [lower, upper] = median_split(&cluster.vertices, mesh, plane_normals[0])?;
        groups = vec![lower, upper];
        used_median = true;
    }

    let group_count = groups.len();
    let mut children = Vec::new();
    for vertices in groups {
        let pieces = if topology_check {
            ws.connected_components(&vertices, mesh)
        } else {
            vec![vertices]
        };
        for piece in pieces {
            let faces = ws.gather_faces(&piece, mesh);
            let id = *next_id;
            *next_id += 1;
            children.push(Cluster::new(id, piece, faces, mesh));
        }
    }
    Some(Partition {
        children,
        groups: group_count,
        used_median,
    })
}
