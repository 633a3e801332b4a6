//! Uniform-grid vertex clustering: every occupied voxel collapses to the
//! unweighted mean of its vertices.

use std::collections::HashMap;

use crate::geom::Vec3;
use crate::mesh::{Aabb, Mesh};
use crate::rsimp::{retriangulate, SimplifiedMesh};

/// Cubic voxelization of a mesh's bounding box.
#[derive(Debug, Clone)]
pub struct VoxelGrid {
    pub resolution: u32,
    pub bounds: Aabb,
    pub cell_size: f64,
}

impl VoxelGrid {
    /// `resolution` cells along the longest box axis; the other axes use the
    /// same cell size.
    pub fn new(mesh: &Mesh, resolution: u32) -> VoxelGrid {
        let resolution = resolution.max(1);
        let bounds = mesh.bounding_box();
        VoxelGrid {
            resolution,
            bounds,
            cell_size: bounds.longest_axis_length() / resolution as f64,
        }
    }

    /// Cell coordinate of a point: `floor((p − min) / cell)` clamped to
    /// `[0, resolution − 1]`.
    pub fn cell_of(&self, p: Vec3) -> [u32; 3] {
        let rel = p - self.bounds.min;
        [rel.x, rel.y, rel.z].map(|d| {
            if self.cell_size > 0.0 {
                ((d / self.cell_size).floor().max(0.0) as u64).min(self.resolution as u64 - 1) as u32
            } else {
                0
            }
        })
    }

    /// Closed box of a cell. The last cell along an axis also reaches the
    /// box's upper bound, which the clamp assigns to it.
    pub fn cell_bounds(&self, cell: [u32; 3]) -> Aabb {
        let min = self.bounds.min + Vec3::new(cell[0] as f64, cell[1] as f64, cell[2] as f64) * self.cell_size;
        let mut max = (min + Vec3::splat(self.cell_size)).to_array();
        for axis in 0..3 {
            if cell[axis] == self.resolution - 1 {
                max[axis] = max[axis].max(self.bounds.max[axis]);
            }
        }
        Aabb {
            min,
            max: Vec3::from_array(max),
        }
    }

    /// Vertex → dense cell index, with cells numbered by first occurrence.
    pub fn assign(&self, mesh: &Mesh) -> (Vec<u32>, Vec<[u32; 3]>) {
        let mut index: HashMap<[u32; 3], u32> = HashMap::new();
        let mut cells = Vec::new();
        let map = mesh
            .vertices()
            .iter()
            .map(|&p| {
                let cell = self.cell_of(p);
                *index.entry(cell).or_insert_with(|| {
                    cells.push(cell);
                    cells.len() as u32 - 1
                })
            })
            .collect();
        (map, cells)
    }
}

/// Number of occupied cells at a resolution.
pub fn occupancy(mesh: &Mesh, resolution: u32) -> usize {
    VoxelGrid::new(mesh, resolution).assign(mesh).1.len()
}

/// Vertex-clustering simplification at a fixed grid resolution.
pub fn cluster_simplify(mesh: &Mesh, resolution: u32) -> SimplifiedMesh {
    let grid = VoxelGrid::new(mesh, resolution);
    let (vertex_map, cells) = grid.assign(mesh);
    let mut sums = vec![Vec3::ZERO; cells.len()];
    let mut counts = vec![0usize; cells.len()];
    for (p, &c) in mesh.vertices().iter().zip(&vertex_map) {
        sums[c as usize] += *p;
        counts[c as usize] += 1;
    }
    let vertices = sums.iter().zip(&counts).map(|(s, &n)| *s / n as f64).collect();
    let faces = retriangulate(mesh, &vertex_map);
    SimplifiedMesh {
        vertices,
        faces,
        vertex_map,
    }
}

fn distinct_positions(mesh: &Mesh) -> usize {
    let mut keys: Vec<[u64; 3]> = mesh.vertices().iter().map(|v| v.to_array().map(f64::to_bits)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Smallest resolution found whose occupied-cell count reaches `target`.
///
/// Occupancy is not monotone in the resolution, so this is a best-effort
/// search: an exponential probe finds a resolution that reaches the target,
/// then bisection narrows it while re-evaluating occupancy at every probe.
/// Targets above the number of distinct vertex positions are clamped to it.
pub fn resolution_for_target(mesh: &Mesh, target: usize) -> u32 {
    const MAX_RESOLUTION: u32 = 1 << 24;
    let target = target.clamp(1, distinct_positions(mesh));
    if occupancy(mesh, 1) >= target {
        return 1;
    }
    let mut lo = 1u32;
    let mut hi = 2u32;
    while occupancy(mesh, hi) < target {
        if hi >= MAX_RESOLUTION {
            return hi;
        }
        lo = hi;
        hi = hi.saturating_mul(2).min(MAX_RESOLUTION);
    }
    // invariant: occupancy(lo) < target <= occupancy(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if occupancy(mesh, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
