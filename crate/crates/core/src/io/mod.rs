//! Mesh file formats (OBJ, PLY) and simplification checkpoints.

mod bytes;
pub mod checkpoint;
pub mod obj;
pub mod ply;

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Face, Mesh};
use crate::rsimp::SimplifiedMesh;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyEncoding {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply(PlyEncoding),
}

impl Format {
    /// Guesses the format from a file extension; PLY output defaults to
    /// binary little-endian.
    pub fn from_path(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Some(Format::Obj),
            "ply" => Some(Format::Ply(PlyEncoding::BinaryLittleEndian)),
            _ => None,
        }
    }
}

/// Anything that can be written as an indexed triangle list.
pub trait TriangleSoup {
    fn positions(&self) -> &[Vec3];
    fn triangles(&self) -> &[Face];
}

impl TriangleSoup for Mesh {
    fn positions(&self) -> &[Vec3] {
        self.vertices()
    }

    fn triangles(&self) -> &[Face] {
        self.faces()
    }
}

impl TriangleSoup for SimplifiedMesh {
    fn positions(&self) -> &[Vec3] {
        &self.vertices
    }

    fn triangles(&self) -> &[Face] {
        &self.faces
    }
}

fn resolve_format(path: &Path, format: Option<Format>) -> Result<Format> {
    format
        .or_else(|| Format::from_path(path))
        .ok_or_else(|| Error::InvalidArgument(format!("cannot infer mesh format of {}", path.display())))
}

/// Parsed positions and polygons before triangulation and validation.
pub(crate) struct RawMesh {
    pub vertices: Vec<Vec3>,
    pub polygons: Vec<Vec<u32>>,
}

impl RawMesh {
    pub fn into_mesh(self) -> Result<Mesh> {
        Mesh::from_polygons(self.vertices, &self.polygons)
    }
}

/// Positions and triangles without the derived data a [`Mesh`] carries.
/// Unlike a `Mesh` it may have no faces, as a fully collapsed
/// simplification does.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Soup {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Face>,
}

impl TriangleSoup for Soup {
    fn positions(&self) -> &[Vec3] {
        &self.vertices
    }

    fn triangles(&self) -> &[Face] {
        &self.faces
    }
}

fn open_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Reads a file that may contain vertices but no faces.
pub fn read_soup(path: impl AsRef<Path>, format: Option<Format>) -> Result<Soup> {
    let path = path.as_ref();
    let data = open_file(path)?;
    let raw = match resolve_format(path, format)? {
        Format::Obj => obj::parse_raw(&data)?,
        Format::Ply(_) => ply::parse_raw(&data)?,
    };
    let mut faces = Vec::new();
    for poly in &raw.polygons {
        if let Some(&bad) = poly.iter().find(|&&i| i as usize >= raw.vertices.len()) {
            return Err(Error::IndexOutOfRange {
                face: faces.len(),
                index: bad as u64,
                vertex_count: raw.vertices.len(),
            });
        }
        crate::mesh::fan_triangulate(poly, &mut faces);
    }
    Ok(Soup {
        vertices: raw.vertices,
        faces,
    })
}

/// Reads a mesh from memory. For PLY the ASCII/binary encoding comes from
/// the header, so any `Ply(_)` works.
pub fn read_mesh_from(mut reader: impl Read, format: Format) -> Result<Mesh> {
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    match format {
        Format::Obj => obj::parse(&data),
        Format::Ply(_) => ply::parse(&data),
    }
}

/// Reads a mesh file; the format defaults to the one implied by the
/// extension.
pub fn read_mesh(path: impl AsRef<Path>, format: Option<Format>) -> Result<Mesh> {
    let path = path.as_ref();
    let format = resolve_format(path, format)?;
    let data = open_file(path)?;
    read_mesh_from(data.as_slice(), format)
}

pub fn write_mesh_to(writer: impl Write, mesh: &impl TriangleSoup, format: Format) -> Result<()> {
    let mut w = BufWriter::new(writer);
    match format {
        Format::Obj => obj::write(&mut w, mesh.positions(), mesh.triangles())?,
        Format::Ply(encoding) => ply::write(&mut w, mesh.positions(), mesh.triangles(), encoding)?,
    }
    w.flush()?;
    Ok(())
}

/// Writes a mesh file atomically: the data goes to a temporary file in the
/// destination directory which is renamed over `path` only once complete.
pub fn write_mesh(path: impl AsRef<Path>, mesh: &impl TriangleSoup, format: Option<Format>) -> Result<()> {
    let path = path.as_ref();
    let format = resolve_format(path, format)?;
    write_atomically(path, |file| write_mesh_to(file, mesh, format))
}

pub(crate) fn write_atomically(path: &Path, body: impl FnOnce(&mut File) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    body(tmp.as_file_mut()).map_err(|e| match e {
        Error::Stream(source) => Error::io(path, source),
        other => other,
    })?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Shortest decimal representation that parses back to the same `f64`.
pub(crate) fn format_f64(v: f64) -> String {
    format!("{v:?}")
}
