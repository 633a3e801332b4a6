//! Sampled surface-to-surface error in the style of the Metro tool.
//!
//! Both surfaces are sampled area-uniformly; each sample's exact distance to
//! the other surface comes from a [`SpatialIndex`]. The symmetric error is
//! the larger of the two one-sided means, reported as a percentage of the
//! original mesh's bounding-box diagonal.

mod bvh;
mod sample;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::io::TriangleSoup;
use crate::mesh::Mesh;

pub use bvh::{closest_point_on_triangle, point_triangle_distance, SpatialIndex};
pub use sample::{barycentric_sample, sample_surface};

pub const DEFAULT_SEED: u64 = 42;
pub const MAX_DEFAULT_SAMPLES: usize = 2_000_000;

/// Samples per side when none is given: 100 per original face, capped.
pub fn default_samples(face_count: usize) -> usize {
    face_count.saturating_mul(100).clamp(1, MAX_DEFAULT_SAMPLES)
}

pub fn build_spatial_index(mesh: &Mesh) -> Result<SpatialIndex> {
    SpatialIndex::build(mesh)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub mean_forward: f64,
    pub mean_backward: f64,
    pub mean_symmetric: f64,
    /// Bounding-box diagonal of the original mesh.
    pub normalizer: f64,
    pub percent: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// The simplified mesh had no usable faces; distances were taken to its
    /// vertex set instead.
    pub degenerate: bool,
}

impl ErrorReport {
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "mean_fwd": self.mean_forward,
            "mean_bwd": self.mean_backward,
            "mean_sym": self.mean_symmetric,
            "diag": self.normalizer,
            "percent": self.percent,
            "samples": self.sample_count,
            "seed": self.seed,
            "degenerate": self.degenerate,
        })
        .to_string()
    }
}

/// `key=value` lines.
impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mean_fwd={:e}", self.mean_forward)?;
        writeln!(f, "mean_bwd={:e}", self.mean_backward)?;
        writeln!(f, "mean_sym={:e}", self.mean_symmetric)?;
        writeln!(f, "diag={:e}", self.normalizer)?;
        writeln!(f, "percent={:.6}", self.percent)?;
        writeln!(f, "samples={}", self.sample_count)?;
        writeln!(f, "seed={}", self.seed)?;
        write!(f, "degenerate={}", self.degenerate)
    }
}

/// Mean of per-point distances. Queries run in parallel; the sum is taken
/// in sample order so the result does not depend on scheduling.
fn mean_distance(points: &[Vec3], dist: impl Fn(Vec3) -> f64 + Sync) -> f64 {
    let d: Vec<f64> = points.par_iter().map(|&p| dist(p)).collect();
    d.iter().sum::<f64>() / d.len() as f64
}

fn nearest_point_distance(points: &[Vec3], p: Vec3) -> f64 {
    points.iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min)
}

/// Symmetric sampled mean distance between `original` and `simplified`.
pub fn mean_error(original: &Mesh, simplified: &impl TriangleSoup, samples_per_side: usize, seed: u64) -> Result<ErrorReport> {
    if samples_per_side == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let normalizer = original.bounding_box().diagonal();
    let original_index = SpatialIndex::build(original)?;
    let forward_points = sample::sample_with(original, samples_per_side, &mut sample::sampler_rng(seed, 0))?;

    let simplified_mesh = if simplified.triangles().is_empty() {
        None
    } else {
        Some(Mesh::new(simplified.positions().to_vec(), simplified.triangles().to_vec())?)
    };
    let usable = simplified_mesh.filter(|m| m.degenerate_face_count() < m.face_count());

    let (mean_forward, mean_backward, degenerate) = match usable {
        Some(s) => {
            let index = SpatialIndex::build(&s)?;
            let backward_points = sample::sample_with(&s, samples_per_side, &mut sample::sampler_rng(seed, 1))?;
            (
                mean_distance(&forward_points, |p| index.distance(p)),
                mean_distance(&backward_points, |p| original_index.distance(p)),
                false,
            )
        }
        None => {
            let verts = simplified.positions();
            if verts.is_empty() {
                return Err(Error::EmptyInput);
            }
            (
                mean_distance(&forward_points, |p| nearest_point_distance(verts, p)),
                mean_distance(verts, |p| original_index.distance(p)),
                true,
            )
        }
    };

    let mean_symmetric = mean_forward.max(mean_backward);
    let percent = if normalizer > 0.0 { mean_symmetric / normalizer * 100.0 } else { 0.0 };
    Ok(ErrorReport {
        mean_forward,
        mean_backward,
        mean_symmetric,
        normalizer,
        percent,
        sample_count: samples_per_side,
        seed,
        degenerate,
    })
}
