use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

use super::cluster::{analyze_variation, representative_vertex, Cluster};
use super::output::{retriangulate, SimplifiedMesh};
use super::split::{choose_split, partition_cluster, position_planes, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplifyOptions {
    /// Separate disconnected pieces of a cluster into their own clusters.
    /// Disabling this exists for comparison only.
    pub topology_check: bool,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions { topology_check: true }
    }
}

/// Max-heap key: larger variation first, then smaller id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct QueueEntry {
    pub variation: f64,
    pub id: u64,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.variation
            .total_cmp(&other.variation)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One entry of the split history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRecord {
    pub parent: u64,
    pub children: Vec<u64>,
    /// Number of partitioning planes (1, 2 or 3).
    pub planes: u8,
    /// Non-empty plane groups before the connectivity check.
    pub groups: u8,
    pub used_median: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TargetReached,
    QueueExhausted,
    TimeBudget,
}

/// Timing and outcome of one splitting run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub target: usize,
    pub splits: usize,
    pub stop: StopReason,
    /// Time spent in the split loop only.
    pub split_loop: Duration,
    /// Longest single split in this run.
    pub longest_split: Duration,
}

/// Live clusters, the priority queue over the splittable ones, and the split
/// history. Everything needed to continue refining later.
#[derive(Debug, Clone)]
pub struct SimplificationState {
    clusters: BTreeMap<u64, Cluster>,
    queue: BinaryHeap<QueueEntry>,
    parked: BTreeSet<u64>,
    split_log: Vec<SplitRecord>,
    next_id: u64,
    options: SimplifyOptions,
    mesh_digest: [u8; 32],
}

impl PartialEq for SimplificationState {
    fn eq(&self, other: &Self) -> bool {
        self.clusters == other.clusters
            && self.queue_order() == other.queue_order()
            && self.parked == other.parked
            && self.split_log == other.split_log
            && self.next_id == other.next_id
            && self.options == other.options
            && self.mesh_digest == other.mesh_digest
    }
}

impl SimplificationState {
    /// Splits the mesh by the three axis-aligned planes through the centre of
    /// its bounding box into up to eight clusters.
    pub fn initialize(mesh: &Mesh, options: SimplifyOptions) -> SimplificationState {
        Self::initialize_with(mesh, options, &mut Workspace::new(mesh))
    }

    pub(crate) fn initialize_with(mesh: &Mesh, options: SimplifyOptions, ws: &mut Workspace) -> Self {
        let center = mesh.bounding_box().center();
        let mut octants: Vec<Vec<u32>> = vec![Vec::new(); 8];
        for (v, p) in mesh.vertices().iter().enumerate() {
            let code = usize::from(p.x >= center.x)
                | usize::from(p.y >= center.y) << 1
                | usize::from(p.z >= center.z) << 2;
            octants[code].push(v as u32);
        }

        let mut state = SimplificationState {
            clusters: BTreeMap::new(),
            queue: BinaryHeap::new(),
            parked: BTreeSet::new(),
            split_log: Vec::new(),
            next_id: 0,
            options,
            mesh_digest: mesh.digest(),
        };
        for vertices in octants.into_iter().filter(|o| !o.is_empty()) {
            let pieces = if options.topology_check {
                ws.connected_components(&vertices, mesh)
            } else {
                vec![vertices]
            };
            for piece in pieces {
                let faces = ws.gather_faces(&piece, mesh);
                let id = state.next_id;
                state.next_id += 1;
                state.insert(Cluster::new(id, piece, faces, mesh), mesh);
            }
        }
        state
    }

    fn insert(&mut self, cluster: Cluster, mesh: &Mesh) {
        if cluster.is_splittable(mesh) {
            self.queue.push(QueueEntry {
                variation: cluster.variation,
                id: cluster.id,
            });
        } else {
            self.parked.insert(cluster.id);
        }
        self.clusters.insert(cluster.id, cluster);
    }

    /// Number of live clusters, i.e. output vertices.
    pub fn live_count(&self) -> usize {
        self.clusters.len()
    }

    /// Live clusters in id order.
    pub fn clusters(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.values()
    }

    pub fn cluster(&self, id: u64) -> Option<&Cluster> {
        self.clusters.get(&id)
    }

    /// Cluster that the next split will take.
    pub fn peek(&self) -> Option<&Cluster> {
        self.queue.peek().and_then(|e| self.clusters.get(&e.id))
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Ids of queued clusters in the order they would be split.
    pub fn queue_order(&self) -> Vec<u64> {
        let mut entries = self.queue.clone().into_vec();
        entries.sort_by(|a, b| b.cmp(a));
        entries.into_iter().map(|e| e.id).collect()
    }

    /// Live clusters that cannot be split further.
    pub fn parked(&self) -> &BTreeSet<u64> {
        &self.parked
    }

    pub fn split_log(&self) -> &[SplitRecord] {
        &self.split_log
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn options(&self) -> SimplifyOptions {
        self.options
    }

    pub fn mesh_digest(&self) -> [u8; 32] {
        self.mesh_digest
    }

    /// Reassembles a state from serialized parts and checks it against `mesh`.
    pub(crate) fn from_parts(
        mesh: &Mesh,
        clusters: Vec<Cluster>,
        queue_order: Vec<u64>,
        split_log: Vec<SplitRecord>,
        next_id: u64,
        options: SimplifyOptions,
        mesh_digest: [u8; 32],
    ) -> Result<SimplificationState> {
        if mesh_digest != mesh.digest() {
            return Err(Error::DigestMismatch);
        }
        let clusters: BTreeMap<u64, Cluster> = clusters.into_iter().map(|c| (c.id, c)).collect();
        let queued: BTreeSet<u64> = queue_order.iter().copied().collect();
        if queued.len() != queue_order.len() || queued.iter().any(|id| !clusters.contains_key(id)) {
            return Err(Error::Checkpoint("queue order is not a set of live cluster ids".into()));
        }
        let queue: BinaryHeap<QueueEntry> = queue_order
            .iter()
            .map(|id| QueueEntry {
                variation: clusters[id].variation,
                id: *id,
            })
            .collect();
        let parked = clusters.keys().filter(|id| !queued.contains(id)).copied().collect();
        let state = SimplificationState {
            clusters,
            queue,
            parked,
            split_log,
            next_id,
            options,
            mesh_digest,
        };
        if state.queue_order() != queue_order {
            return Err(Error::Checkpoint("queue order disagrees with cluster priorities".into()));
        }
        state.check_consistency(mesh)?;
        Ok(state)
    }

    /// Verifies that live clusters partition the mesh vertices and that every
    /// id is either queued or parked.
    pub fn check_consistency(&self, mesh: &Mesh) -> Result<()> {
        let mut owner = vec![u64::MAX; mesh.vertex_count()];
        for c in self.clusters.values() {
            if c.vertices.is_empty() {
                return Err(Error::Checkpoint(format!("cluster {} is empty", c.id)));
            }
            if c.id >= self.next_id {
                return Err(Error::Checkpoint(format!("cluster id {} out of range", c.id)));
            }
            for &v in &c.vertices {
                let slot = owner
                    .get_mut(v as usize)
                    .ok_or_else(|| Error::Checkpoint(format!("vertex {v} out of range")))?;
                if *slot != u64::MAX {
                    return Err(Error::Checkpoint(format!("vertex {v} in clusters {} and {}", *slot, c.id)));
                }
                *slot = c.id;
            }
            if c.faces.iter().any(|&f| f as usize >= mesh.face_count()) {
                return Err(Error::Checkpoint(format!("cluster {} has a face out of range", c.id)));
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == u64::MAX) {
            return Err(Error::Checkpoint(format!("vertex {v} belongs to no cluster")));
        }
        if self.queue.len() + self.parked.len() != self.clusters.len()
            || self.queue.iter().any(|e| self.parked.contains(&e.id))
        {
            return Err(Error::Checkpoint("queued and parked sets do not cover the live clusters".into()));
        }
        Ok(())
    }

    /// Splits the cluster at the head of the queue. Returns `None` once the
    /// queue is empty.
    pub fn step(&mut self, mesh: &Mesh, ws: &mut Workspace) -> Option<&SplitRecord> {
        while let Some(entry) = self.queue.pop() {
            let parent = self.clusters.remove(&entry.id).expect("queued cluster is live");
            let split = analyze_variation(&parent, mesh).ok().and_then(|eigen| {
                let normals = choose_split(&eigen, parent.mean_normal);
                let anchor = position_planes(&parent, mesh, &eigen);
                partition_cluster(
                    &parent,
                    mesh,
                    &normals,
                    anchor,
                    self.options.topology_check,
                    ws,
                    &mut self.next_id,
                )
                .map(|p| (p, normals.len()))
            });
            let Some((partition, planes)) = split else {
                self.parked.insert(parent.id);
                self.clusters.insert(parent.id, parent);
                continue;
            };
            let children = partition.children.iter().map(|c| c.id).collect();
            for child in partition.children {
                self.insert(child, mesh);
            }
            self.split_log.push(SplitRecord {
                parent: parent.id,
                children,
                planes: planes as u8,
                groups: partition.groups as u8,
                used_median: partition.used_median,
            });
            return self.split_log.last();
        }
        None
    }

    /// Splits until `target` clusters exist, the queue runs dry, or `deadline`
    /// passes. The deadline is checked once before every split.
    pub fn run(&mut self, mesh: &Mesh, target: usize, deadline: Option<Instant>, ws: &mut Workspace) -> RunReport {
        let loop_start = Instant::now();
        let mut longest = Duration::ZERO;
        let mut splits = 0;
        let stop = loop {
            if self.live_count() >= target {
                break StopReason::TargetReached;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                break StopReason::TimeBudget;
            }
            let t = Instant::now();
            if self.step(mesh, ws).is_none() {
                break StopReason::QueueExhausted;
            }
            longest = longest.max(t.elapsed());
            splits += 1;
        };
        RunReport {
            target,
            splits,
            stop,
            split_loop: loop_start.elapsed(),
            longest_split: longest,
        }
    }

    /// Representative vertices (in cluster id order) and the surviving faces.
    pub fn output(&self, mesh: &Mesh) -> SimplifiedMesh {
        let mut vertices = Vec::with_capacity(self.clusters.len());
        let mut vertex_map = vec![0u32; mesh.vertex_count()];
        for (k, c) in self.clusters.values().enumerate() {
            vertices.push(representative_vertex(c, mesh));
            for &v in &c.vertices {
                vertex_map[v as usize] = k as u32;
            }
        }
        let faces = retriangulate(mesh, &vertex_map);
        SimplifiedMesh {
            vertices,
            faces,
            vertex_map,
        }
    }
}
