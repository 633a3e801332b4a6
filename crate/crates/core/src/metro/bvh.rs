//! Bounding-volume hierarchy over triangles for exact nearest-distance
//! queries.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Aabb, Mesh};

const LEAF_SIZE: usize = 4;

/// Closest point on triangle `abc` to `p`, by Voronoi-region classification
/// (vertex, edge, then interior).
pub fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }

    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }

    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

pub fn point_triangle_distance(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    (p - closest_point_on_triangle(p, a, b, c)).length()
}

fn box_distance_squared(b: &Aabb, p: Vec3) -> f64 {
    let d = Vec3::new(
        (b.min.x - p.x).max(0.0).max(p.x - b.max.x),
        (b.min.y - p.y).max(0.0).max(p.y - b.max.y),
        (b.min.z - p.z).max(0.0).max(p.z - b.max.z),
    );
    d.length_squared()
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf { start: u32, end: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    kind: NodeKind,
}

/// Nearest-triangle index over the non-degenerate faces of a mesh.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    triangles: Vec<[Vec3; 3]>,
    nodes: Vec<Node>,
}

impl SpatialIndex {
    pub fn build(mesh: &Mesh) -> Result<SpatialIndex> {
        let triangles: Vec<[Vec3; 3]> = (0..mesh.face_count() as u32)
            .filter(|&f| !mesh.is_degenerate(f))
            .map(|f| mesh.face(f).map(|v| mesh.vertex(v)))
            .collect();
        if triangles.is_empty() {
            return Err(Error::Structure("no non-degenerate faces to index".into()));
        }
        Ok(Self::from_triangles(triangles))
    }

    fn from_triangles(triangles: Vec<[Vec3; 3]>) -> SpatialIndex {
        let centroids: Vec<Vec3> = triangles.iter().map(|t| (t[0] + t[1] + t[2]) / 3.0).collect();
        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * triangles.len() / LEAF_SIZE + 1);
        build_node(&triangles, &centroids, &mut order, 0, &mut nodes);
        let triangles = order.iter().map(|&i| triangles[i as usize]).collect();
        SpatialIndex { triangles, nodes }
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Exact distance from `p` to the nearest indexed triangle.
    pub fn distance(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            if box_distance_squared(&node.bounds, p) > best * best {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, end } => {
                    for t in &self.triangles[start as usize..end as usize] {
                        best = best.min(point_triangle_distance(p, t[0], t[1], t[2]));
                    }
                }
                NodeKind::Inner { left, right } => {
                    let dl = box_distance_squared(&self.nodes[left as usize].bounds, p);
                    let dr = box_distance_squared(&self.nodes[right as usize].bounds, p);
                    // visit the nearer child first
                    if dl <= dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        best
    }
}

fn build_node(triangles: &[[Vec3; 3]], centroids: &[Vec3], order: &mut [u32], offset: u32, nodes: &mut Vec<Node>) -> u32 {
    let bounds = Aabb::from_points(order.iter().flat_map(|&i| triangles[i as usize].iter())).expect("non-empty node");
    let index = nodes.len() as u32;
    nodes.push(Node {
        bounds,
        kind: NodeKind::Leaf {
            start: offset,
            end: offset + order.len() as u32,
        },
    });
    if order.len() <= LEAF_SIZE {
        return index;
    }

    let cb = Aabb::from_points(order.iter().map(|&i| &centroids[i as usize])).expect("non-empty node");
    let axis = cb.extent().max_abs_axis();
    if cb.extent()[axis] <= 0.0 {
        return index;
    }
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    let (lo, hi) = order.split_at_mut(mid);
    let left = build_node(triangles, centroids, lo, offset, nodes);
    let right = build_node(triangles, centroids, hi, offset + mid as u32, nodes);
    nodes[index as usize].kind = NodeKind::Inner { left, right };
    index
}
