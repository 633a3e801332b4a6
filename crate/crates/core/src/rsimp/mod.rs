//! Coarse-to-fine simplification by recursive cluster splitting.
//!
//! The mesh starts as (up to) eight octant clusters. The cluster with the
//! largest normal variation is repeatedly split along the principal
//! directions of its face normals until the requested number of clusters
//! exists. Each surviving cluster then becomes one output vertex placed at
//! the minimum of its plane quadric, and every original face spanning three
//! distinct clusters is kept.
//!
//! Splitting is deterministic, so a [`SimplificationState`] saved at any
//! point and refined later gives exactly the output of a single longer run.

mod cluster;
mod output;
mod split;
mod state;

use std::time::{Duration, Instant};

use log::warn;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

pub use cluster::{
    analyze_variation, compute_cluster_stats, normal_covariance, plane_quadric, representative_vertex, Cluster,
};
pub use output::{retriangulate, SimplifiedMesh};
pub use split::{
    choose_split, median_split, partition_cluster, partition_vertices, position_planes, split_arity,
    topology_split, Partition, SplitArity, Workspace, EIGENVALUE_ZERO_RATIO, POSITION_BAND_DEGREES,
};
pub use state::{RunReport, SimplificationState, SimplifyOptions, SplitRecord, StopReason};

/// A finished (or paused) simplification.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub state: SimplificationState,
    pub mesh: SimplifiedMesh,
    pub report: RunReport,
    /// Time spent computing representatives and retriangulating.
    pub post_processing: Duration,
}

fn clamp_target(mesh: &Mesh, target: usize) -> Result<usize> {
    if target == 0 {
        return Err(Error::InvalidArgument("target vertex count must be at least 1".into()));
    }
    if target > mesh.vertex_count() {
        warn!(
            "target of {target} vertices exceeds the input's {}; clamping",
            mesh.vertex_count()
        );
        return Ok(mesh.vertex_count());
    }
    Ok(target)
}

fn finish(state: SimplificationState, mesh: &Mesh, report: RunReport) -> Outcome {
    let t = Instant::now();
    let simplified = state.output(mesh);
    Outcome {
        state,
        mesh: simplified,
        report,
        post_processing: t.elapsed(),
    }
}

/// Simplifies `mesh` to (at least) `target_vertices` vertices.
///
/// With a `time_budget`, splitting stops at the first iteration boundary
/// after the budget (measured from the call) has elapsed, and whatever
/// clusters exist at that point are emitted.
pub fn simplify(
    mesh: &Mesh,
    target_vertices: usize,
    time_budget: Option<Duration>,
    options: SimplifyOptions,
) -> Result<Outcome> {
    let start = Instant::now();
    let target = clamp_target(mesh, target_vertices)?;
    let mut ws = Workspace::new(mesh);
    let mut state = SimplificationState::initialize_with(mesh, options, &mut ws);
    let report = state.run(mesh, target, time_budget.map(|b| start + b), &mut ws);
    Ok(finish(state, mesh, report))
}

/// Continues splitting a saved state up to `new_target` vertices.
///
/// A target at or below the current cluster count re-emits the current
/// output unchanged.
pub fn refine(
    mut state: SimplificationState,
    mesh: &Mesh,
    new_target: usize,
    time_budget: Option<Duration>,
) -> Result<Outcome> {
    let start = Instant::now();
    if state.mesh_digest() != mesh.digest() {
        return Err(Error::DigestMismatch);
    }
    let target = clamp_target(mesh, new_target)?;
    let mut ws = Workspace::new(mesh);
    let report = state.run(mesh, target, time_budget.map(|b| start + b), &mut ws);
    Ok(finish(state, mesh, report))
}

/// Initial vertex estimate for a face target: `V ≈ F/2 + 2` on a closed
/// genus-0 triangle mesh.
pub fn target_faces_to_vertices(target_faces: usize) -> usize {
    target_faces / 2 + 2
}

/// Simplifies until the output has at least `target_faces` faces (or the
/// queue runs dry), refining the vertex target between rounds.
///
/// Returns the outcome and the number of rounds run. Because refinement is
/// exact, the result equals a direct [`simplify`] to the final vertex count.
pub fn simplify_to_faces(
    mesh: &Mesh,
    target_faces: usize,
    time_budget: Option<Duration>,
    options: SimplifyOptions,
) -> Result<(Outcome, usize)> {
    if target_faces == 0 {
        return Err(Error::InvalidArgument("target face count must be at least 1".into()));
    }
    let start = Instant::now();
    let estimate = target_faces_to_vertices(target_faces).min(mesh.vertex_count());
    let outcome = simplify(mesh, estimate, time_budget, options)?;
    grow_to_faces(outcome, mesh, target_faces, time_budget, start)
}

/// Face-count version of [`refine`]: continues a saved state until the
/// output has at least `target_faces` faces.
pub fn refine_to_faces(
    state: SimplificationState,
    mesh: &Mesh,
    target_faces: usize,
    time_budget: Option<Duration>,
) -> Result<(Outcome, usize)> {
    if target_faces == 0 {
        return Err(Error::InvalidArgument("target face count must be at least 1".into()));
    }
    let start = Instant::now();
    let estimate = target_faces_to_vertices(target_faces)
        .max(state.live_count())
        .min(mesh.vertex_count());
    let outcome = refine(state, mesh, estimate, time_budget)?;
    grow_to_faces(outcome, mesh, target_faces, time_budget, start)
}

fn grow_to_faces(
    mut outcome: Outcome,
    mesh: &Mesh,
    target_faces: usize,
    time_budget: Option<Duration>,
    start: Instant,
) -> Result<(Outcome, usize)> {
    let mut rounds = 1;
    while outcome.mesh.face_count() < target_faces
        && outcome.report.stop == StopReason::TargetReached
        && outcome.state.live_count() < mesh.vertex_count()
    {
        let deficit = target_faces - outcome.mesh.face_count();
        // each new interior vertex adds about two faces
        let next = (outcome.state.live_count() + deficit.div_ceil(2)).min(mesh.vertex_count());
        let remaining = time_budget.map(|b| b.saturating_sub(start.elapsed()));
        outcome = refine(outcome.state, mesh, next, remaining)?;
        rounds += 1;
    }
    Ok((outcome, rounds))
}
