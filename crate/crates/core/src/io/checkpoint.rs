//! Binary checkpoint of a [`SimplificationState`].
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! "RSMP"            magic
//! u32               format version
//! [u8; 32]          SHA-256 digest of the mesh the state belongs to
//! u8                option flags (bit 0: topology check)
//! u64               next cluster id
//! u64               cluster count, then per cluster:
//!     u64 id, f64×3 mean normal, f64×3 mean vertex, f64 variation, f64 area,
//!     u64 n, u32×n vertex indices, u64 m, u32×m face indices
//! u64               queue length, then u64 ids in pop order
//! u64               split-log length, then per record:
//!     u64 parent, u64 k, u64×k children, u8 planes, u8 groups, u8 median flag
//! [u8; 32]          SHA-256 of everything above
//! ```
//!
//! Floats are stored as raw bits so a reloaded state continues exactly as
//! the original would have.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::Mesh;
use crate::rsimp::{Cluster, SimplificationState, SimplifyOptions, SplitRecord};

use super::bytes::ByteReader;
use super::write_atomically;

pub const MAGIC: &[u8; 4] = b"RSMP";
pub const CHECKPOINT_VERSION: u32 = 1;
pub const EXTENSION: &str = "rsimp-ckpt";

struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    fn vec3(&mut self, v: Vec3) {
        self.f64(v.x);
        self.f64(v.y);
        self.f64(v.z);
    }
}

/// Serializes a state into checkpoint bytes.
pub fn encode(state: &SimplificationState) -> Vec<u8> {
    let mut e = Encoder { buf: Vec::new() };
    e.buf.extend_from_slice(MAGIC);
    e.u32(CHECKPOINT_VERSION);
    e.buf.extend_from_slice(&state.mesh_digest());
    e.u8(u8::from(state.options().topology_check));
    e.u64(state.next_id());

    e.len(state.live_count());
    for c in state.clusters() {
        e.u64(c.id);
        e.vec3(c.mean_normal);
        e.vec3(c.mean_vertex);
        e.f64(c.variation);
        e.f64(c.area);
        e.len(c.vertices.len());
        c.vertices.iter().for_each(|&v| e.u32(v));
        e.len(c.faces.len());
        c.faces.iter().for_each(|&f| e.u32(f));
    }

    let order = state.queue_order();
    e.len(order.len());
    order.iter().for_each(|&id| e.u64(id));

    e.len(state.split_log().len());
    for r in state.split_log() {
        e.u64(r.parent);
        e.len(r.children.len());
        r.children.iter().for_each(|&c| e.u64(c));
        e.u8(r.planes);
        e.u8(r.groups);
        e.u8(u8::from(r.used_median));
    }

    let digest: [u8; 32] = Sha256::digest(&e.buf).into();
    e.buf.extend_from_slice(&digest);
    e.buf
}

fn read_len(r: &mut ByteReader, item_size: usize) -> Result<usize> {
    let n = r.u64_le()?;
    // a count that cannot fit in the remaining bytes means corruption
    if n.saturating_mul(item_size as u64) > r.remaining() as u64 {
        return Err(r.error(format!("length {n} exceeds remaining data")));
    }
    Ok(n as usize)
}

fn read_vec3(r: &mut ByteReader) -> Result<Vec3> {
    Ok(Vec3::new(r.f64_le()?, r.f64_le()?, r.f64_le()?))
}

/// Parses checkpoint bytes and checks them against `mesh`.
pub fn decode(data: &[u8], mesh: &Mesh) -> Result<SimplificationState> {
    let mut r = ByteReader::new(data);
    if r.take(4)? != MAGIC {
        return Err(Error::parse("byte 0", "not a checkpoint (bad magic)"));
    }
    let version = r.u32_le()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    if data.len() < 8 + 32 {
        return Err(r.error("truncated checkpoint"));
    }
    let (body, trailer) = data.split_at(data.len() - 32);
    let checksum: [u8; 32] = Sha256::digest(body).into();
    if checksum != trailer {
        return Err(Error::parse(
            format!("byte {}", body.len()),
            "checksum mismatch (truncated or corrupted checkpoint)",
        ));
    }
    let mut r = ByteReader::new(body);
    r.take(8)?;

    let digest: [u8; 32] = r.array()?;
    if digest != mesh.digest() {
        return Err(Error::DigestMismatch);
    }
    let flags = r.u8()?;
    let options = SimplifyOptions {
        topology_check: flags & 1 != 0,
    };
    let next_id = r.u64_le()?;

    let n_clusters = read_len(&mut r, 8 * 9)?;
    let mut clusters = Vec::with_capacity(n_clusters);
    for _ in 0..n_clusters {
        let id = r.u64_le()?;
        let mean_normal = read_vec3(&mut r)?;
        let mean_vertex = read_vec3(&mut r)?;
        let variation = r.f64_le()?;
        let area = r.f64_le()?;
        let nv = read_len(&mut r, 4)?;
        let vertices = (0..nv).map(|_| r.u32_le()).collect::<Result<Vec<_>>>()?;
        let nf = read_len(&mut r, 4)?;
        let faces = (0..nf).map(|_| r.u32_le()).collect::<Result<Vec<_>>>()?;
        clusters.push(Cluster {
            id,
            vertices,
            faces,
            mean_normal,
            mean_vertex,
            variation,
            area,
        });
    }

    let nq = read_len(&mut r, 8)?;
    let queue_order = (0..nq).map(|_| r.u64_le()).collect::<Result<Vec<_>>>()?;

    let nlog = read_len(&mut r, 8 + 8 + 3)?;
    let mut split_log = Vec::with_capacity(nlog);
    for _ in 0..nlog {
        let parent = r.u64_le()?;
        let k = read_len(&mut r, 8)?;
        let children = (0..k).map(|_| r.u64_le()).collect::<Result<Vec<_>>>()?;
        split_log.push(SplitRecord {
            parent,
            children,
            planes: r.u8()?,
            groups: r.u8()?,
            used_median: r.u8()? != 0,
        });
    }
    if r.remaining() != 0 {
        return Err(r.error("trailing data after split log"));
    }

    SimplificationState::from_parts(mesh, clusters, queue_order, split_log, next_id, options, digest)
}

pub fn write_checkpoint(w: &mut impl Write, state: &SimplificationState) -> Result<()> {
    w.write_all(&encode(state))?;
    Ok(())
}

pub fn read_checkpoint(data: &[u8], mesh: &Mesh) -> Result<SimplificationState> {
    decode(data, mesh)
}

/// Writes a checkpoint file atomically.
pub fn save_checkpoint(state: &SimplificationState, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_atomically(path, |f| write_checkpoint(f, state))
}

/// Loads a checkpoint file, refusing it if it was made for another mesh or
/// by another format version.
pub fn load_checkpoint(path: impl AsRef<Path>, mesh: &Mesh) -> Result<SimplificationState> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&data, mesh)
}
