//! Coarse-to-fine triangle mesh simplification.
//!
//! [`rsimp`] splits the whole mesh into clusters of vertices, repeatedly
//! dividing the cluster with the largest normal variation until the target
//! vertex count is reached, then emits one representative vertex per
//! cluster. [`vclust`] is a uniform-grid vertex-clustering baseline and
//! [`metro`] measures sampled surface-to-surface error between two meshes.

pub mod cli;
pub mod error;
pub mod generate;
pub mod geom;
pub mod io;
pub mod mesh;
pub mod metro;
pub mod numerics;
pub mod rsimp;
pub mod vclust;

pub use error::{Error, Result};
pub use geom::Vec3;
pub use mesh::{validate, Aabb, Face, Mesh, ValidationReport};
pub use rsimp::{refine, refine_to_faces, simplify, simplify_to_faces, SimplificationState, SimplifiedMesh, SimplifyOptions};
