//! Wavefront OBJ: `v` and `f` records only. Normals, texture coordinates,
//! groups and materials are skipped.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Face, Mesh};

use super::{format_f64, RawMesh};

pub fn parse(data: &[u8]) -> Result<Mesh> {
    parse_raw(data)?.into_mesh()
}

pub(crate) fn parse_raw(data: &[u8]) -> Result<RawMesh> {
    let text = std::str::from_utf8(data).map_err(|e| Error::parse(format!("byte {}", e.valid_up_to()), "invalid UTF-8"))?;
    let mut vertices = Vec::new();
    let mut polygons: Vec<Vec<u32>> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for slot in &mut c {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| Error::parse(format!("line {line_no}"), "vertex needs three coordinates"))?;
                    *slot = tok
                        .parse()
                        .map_err(|_| Error::parse(format!("line {line_no}"), format!("bad coordinate {tok:?}")))?;
                }
                vertices.push(Vec3::from_array(c));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for tok in tokens {
                    let index_str = tok.split('/').next().unwrap_or("");
                    let index: i64 = index_str
                        .parse()
                        .map_err(|_| Error::parse(format!("line {line_no}"), format!("bad face index {tok:?}")))?;
                    let resolved = match index {
                        i if i > 0 => i - 1,
                        i if i < 0 => vertices.len() as i64 + i,
                        _ => -1,
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(Error::parse(
                            format!("line {line_no}"),
                            format!("face index {index} out of range ({} vertices so far)", vertices.len()),
                        ));
                    }
                    poly.push(resolved as u32);
                }
                if poly.len() < 3 {
                    return Err(Error::parse(format!("line {line_no}"), "face needs at least three vertices"));
                }
                polygons.push(poly);
            }
            _ => {}
        }
    }
    Ok(RawMesh { vertices, polygons })
}

pub fn write(w: &mut impl Write, vertices: &[Vec3], faces: &[Face]) -> Result<()> {
    for v in vertices {
        writeln!(w, "v {} {} {}", format_f64(v.x), format_f64(v.y), format_f64(v.z))?;
    }
    for f in faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let m = parse(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn quad_is_fanned() {
        let m = parse(b"v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn slashes_negatives_and_junk() {
        let src = b"# comment\nmtllib x.mtl\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\nusemtl m\ng grp\nf 1/1/1 2//1 -1/3\n";
        let m = parse(src).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse(b"v 0 0 0\nv 1 0\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n").unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(parse(b"v 0 0 0\nf 1 1\n").is_err());
        assert!(matches!(parse(b"v 0 0 0\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn writes_one_based() {
        let mut out = Vec::new();
        write(&mut out, &[Vec3::ZERO, Vec3::X, Vec3::new(0.1, 1.0, -2.5)], &[[0, 1, 2]]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "v 0.0 0.0 0.0\nv 1.0 0.0 0.0\nv 0.1 1.0 -2.5\nf 1 2 3\n");
    }

    #[test]
    fn vertices_only_output() {
        let mut out = Vec::new();
        write(&mut out, &[Vec3::ZERO], &[]).unwrap();
        assert_eq!(out, b"v 0.0 0.0 0.0\n");
    }
}
