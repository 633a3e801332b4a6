//! PLY reader (ascii, binary little- and big-endian) and writer (ascii,
//! binary little-endian).
//!
//! Only `vertex` x/y/z and the `face` index list are used; other properties
//! and elements are parsed past and ignored with a warning.

use std::io::Write;

use log::warn;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Face, Mesh};

use super::bytes::ByteReader;
use super::{format_f64, PlyEncoding, RawMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    BinaryLe,
    BinaryBe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn is_integer(self) -> bool {
        !matches!(self, Scalar::F32 | Scalar::F64)
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { ty: Scalar, name: String },
    List { count: Scalar, item: Scalar, name: String },
}

impl Property {
    fn name(&self) -> &str {
        match self {
            Property::Scalar { name, .. } | Property::List { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    body_offset: usize,
    /// Line number of the first body line (ascii only).
    body_line: usize,
}

fn parse_header(data: &[u8]) -> Result<Header> {
    let mut pos = 0;
    let mut line_no = 0;
    let mut next_line = || -> Result<(usize, &str)> {
        let rest = &data[pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::parse(format!("byte {pos}"), "unterminated PLY header"))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| Error::parse(format!("byte {pos}"), "PLY header is not text"))?;
        pos += end + 1;
        line_no += 1;
        Ok((line_no, line.trim_end_matches('\r').trim()))
    };

    let (_, magic) = next_line()?;
    if magic != "ply" {
        return Err(Error::parse("line 1", "missing 'ply' magic"));
    }
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let (n, line) = next_line()?;
        let at = format!("line {n}");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["format", fmt, version] => {
                if *version != "1.0" {
                    return Err(Error::parse(at, format!("unsupported PLY version {version}")));
                }
                encoding = Some(match *fmt {
                    "ascii" => Encoding::Ascii,
                    "binary_little_endian" => Encoding::BinaryLe,
                    "binary_big_endian" => Encoding::BinaryBe,
                    other => return Err(Error::parse(at, format!("unknown PLY format {other}"))),
                });
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| Error::parse(&at, format!("bad element count {count:?}")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", count, item, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| Error::parse(&at, "property before any element"))?;
                let count = Scalar::parse(count).ok_or_else(|| Error::parse(&at, format!("unknown type {count}")))?;
                let item = Scalar::parse(item).ok_or_else(|| Error::parse(&at, format!("unknown type {item}")))?;
                if !count.is_integer() {
                    return Err(Error::parse(&at, "list count type must be an integer"));
                }
                el.properties.push(Property::List {
                    count,
                    item,
                    name: name.to_string(),
                });
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| Error::parse(&at, "property before any element"))?;
                let ty = Scalar::parse(ty).ok_or_else(|| Error::parse(&at, format!("unknown type {ty}")))?;
                el.properties.push(Property::Scalar {
                    ty,
                    name: name.to_string(),
                });
            }
            ["end_header"] => break,
            _ => return Err(Error::parse(at, format!("unrecognized header line {line:?}"))),
        }
    }
    let encoding = encoding.ok_or_else(|| Error::parse("header", "missing format line"))?;
    Ok(Header {
        encoding,
        elements,
        body_offset: pos,
        body_line: line_no + 1,
    })
}

/// Source of property values in file order.
trait ValueSource {
    fn scalar(&mut self, ty: Scalar) -> Result<f64>;
    fn error(&self, message: String) -> Error;
    fn end_record(&mut self) -> Result<()> {
        Ok(())
    }
}

struct BinarySource<'a> {
    reader: ByteReader<'a>,
    big_endian: bool,
}

impl ValueSource for BinarySource<'_> {
    fn scalar(&mut self, ty: Scalar) -> Result<f64> {
        let bytes = self.reader.take(ty.size())?;
        let mut buf = [0u8; 8];
        buf[..bytes.len()].copy_from_slice(bytes);
        if self.big_endian {
            buf[..bytes.len()].reverse();
        }
        Ok(match ty {
            Scalar::I8 => buf[0] as i8 as f64,
            Scalar::U8 => buf[0] as f64,
            Scalar::I16 => i16::from_le_bytes([buf[0], buf[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([buf[0], buf[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(buf),
        })
    }

    fn error(&self, message: String) -> Error {
        self.reader.error(message)
    }
}

struct AsciiSource<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    first_line: usize,
    line_no: usize,
    tokens: std::vec::IntoIter<&'a str>,
}

impl<'a> AsciiSource<'a> {
    fn new(text: &'a str, first_line: usize) -> Self {
        AsciiSource {
            lines: text.lines().enumerate(),
            first_line,
            line_no: first_line,
            tokens: Vec::new().into_iter(),
        }
    }
}

impl ValueSource for AsciiSource<'_> {
    fn scalar(&mut self, ty: Scalar) -> Result<f64> {
        loop {
            if let Some(tok) = self.tokens.next() {
                let value: f64 = tok
                    .parse()
                    .map_err(|_| self.error(format!("bad {ty:?} value {tok:?}")))?;
                return Ok(value);
            }
            // records normally sit on one line; tolerate them spanning lines
            match self.lines.next() {
                Some((i, line)) => {
                    self.line_no = self.first_line + i;
                    self.tokens = line.split_whitespace().collect::<Vec<_>>().into_iter();
                }
                None => return Err(self.error("unexpected end of data".into())),
            }
        }
    }

    fn error(&self, message: String) -> Error {
        Error::parse(format!("line {}", self.line_no), message)
    }

    fn end_record(&mut self) -> Result<()> {
        if self.tokens.len() > 0 {
            return Err(self.error("extra values at end of record".into()));
        }
        Ok(())
    }
}

fn as_index(src: &dyn ValueSource, v: f64) -> Result<u32> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(src.error(format!("invalid vertex index {v}")))
    }
}

fn read_body(header: &Header, src: &mut dyn ValueSource) -> Result<RawMesh> {
    let mut vertices = Vec::new();
    let mut polygons: Vec<Vec<u32>> = Vec::new();
    let mut saw_vertex = false;
    let mut saw_face = false;

    for el in &header.elements {
        let is_vertex = el.name == "vertex";
        let is_face = el.name == "face";
        let (mut xyz, mut index_prop) = ([None; 3], None);
        if is_vertex {
            saw_vertex = true;
            for (k, axis) in ["x", "y", "z"].into_iter().enumerate() {
                xyz[k] = el.properties.iter().position(|p| matches!(p, Property::Scalar { name, .. } if name == axis));
            }
            if xyz.iter().any(Option::is_none) {
                return Err(Error::parse("header", "vertex element lacks x, y or z"));
            }
        } else if is_face {
            saw_face = true;
            index_prop = el
                .properties
                .iter()
                .position(|p| matches!(p, Property::List { name, .. } if name == "vertex_indices" || name == "vertex_index"));
            if index_prop.is_none() {
                return Err(Error::parse("header", "face element lacks a vertex_indices list"));
            }
        } else {
            warn!("ignoring PLY element '{}'", el.name);
        }
        for (k, p) in el.properties.iter().enumerate() {
            let used = (is_vertex && xyz.contains(&Some(k))) || (is_face && index_prop == Some(k));
            if (is_vertex || is_face) && !used {
                warn!("ignoring PLY property '{}' of element '{}'", p.name(), el.name);
            }
        }

        for _ in 0..el.count {
            let mut pos = [0.0; 3];
            for (k, p) in el.properties.iter().enumerate() {
                match p {
                    Property::Scalar { ty, .. } => {
                        let v = src.scalar(*ty)?;
                        if let Some(axis) = xyz.iter().position(|&a| a == Some(k)) {
                            pos[axis] = v;
                        }
                    }
                    Property::List { count, item, .. } => {
                        let n = src.scalar(*count)?;
                        let n = as_index(&*src, n)? as usize;
                        let mut list = Vec::with_capacity(if index_prop == Some(k) { n } else { 0 });
                        for _ in 0..n {
                            let v = src.scalar(*item)?;
                            if index_prop == Some(k) {
                                list.push(as_index(&*src, v)?);
                            }
                        }
                        if index_prop == Some(k) {
                            if n < 3 {
                                return Err(src.error(format!("face with {n} vertices")));
                            }
                            polygons.push(list);
                        }
                    }
                }
            }
            src.end_record()?;
            if is_vertex {
                vertices.push(Vec3::from_array(pos));
            }
        }
    }
    if !saw_vertex || !saw_face {
        return Err(Error::parse("header", "PLY needs vertex and face elements"));
    }
    Ok(RawMesh { vertices, polygons })
}

pub fn parse(data: &[u8]) -> Result<Mesh> {
    parse_raw(data)?.into_mesh()
}

pub(crate) fn parse_raw(data: &[u8]) -> Result<RawMesh> {
    let header = parse_header(data)?;
    let body = &data[header.body_offset..];
    match header.encoding {
        Encoding::Ascii => {
            let text = std::str::from_utf8(body).map_err(|_| Error::parse("body", "ascii PLY body is not text"))?;
            read_body(&header, &mut AsciiSource::new(text, header.body_line))
        }
        Encoding::BinaryLe | Encoding::BinaryBe => {
            // offsets in errors are relative to the whole file
            let mut reader = ByteReader::new(data);
            reader.take(header.body_offset)?;
            let mut src = BinarySource {
                reader,
                big_endian: header.encoding == Encoding::BinaryBe,
            };
            read_body(&header, &mut src)
        }
    }
}

pub fn write(w: &mut impl Write, vertices: &[Vec3], faces: &[Face], encoding: PlyEncoding) -> Result<()> {
    let format = match encoding {
        PlyEncoding::Ascii => "ascii",
        PlyEncoding::BinaryLittleEndian => "binary_little_endian",
    };
    write!(
        w,
        "ply\nformat {format} 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         element face {}\nproperty list uchar uint vertex_indices\nend_header\n",
        vertices.len(),
        faces.len()
    )?;
    match encoding {
        PlyEncoding::Ascii => {
            for v in vertices {
                writeln!(w, "{} {} {}", format_f64(v.x), format_f64(v.y), format_f64(v.z))?;
            }
            for f in faces {
                writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
            }
        }
        PlyEncoding::BinaryLittleEndian => {
            for v in vertices {
                for c in v.to_array() {
                    w.write_all(&c.to_le_bytes())?;
                }
            }
            for f in faces {
                w.write_all(&[3])?;
                for i in f {
                    w.write_all(&i.to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Vec<Vec3>, Vec<Face>) {
        (
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.1, 0.7, 1.0 / 3.0),
                Vec3::new(-2.5e-7, 1e300, 3.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    #[test]
    fn binary_header_counts() {
        let (v, f) = sample();
        let mut out = Vec::new();
        write(&mut out, &v, &f, PlyEncoding::BinaryLittleEndian).unwrap();
        let header = parse_header(&out).unwrap();
        assert_eq!(header.encoding, Encoding::BinaryLe);
        assert_eq!(header.elements[0].name, "vertex");
        assert_eq!(header.elements[0].count, 4);
        assert_eq!(header.elements[1].name, "face");
        assert_eq!(header.elements[1].count, 2);
        assert_eq!(out.len(), header.body_offset + 4 * 24 + 2 * 13);
    }

    #[test]
    fn round_trips_are_exact() {
        let (v, f) = sample();
        for enc in [PlyEncoding::Ascii, PlyEncoding::BinaryLittleEndian] {
            let mut out = Vec::new();
            write(&mut out, &v, &f, enc).unwrap();
            let m = parse(&out).unwrap();
            assert_eq!(m.vertices(), v.as_slice());
            assert_eq!(m.faces(), f.as_slice());
        }
    }

    #[test]
    fn float32_and_extra_properties() {
        let mut data = b"ply\nformat binary_little_endian 1.0\ncomment hi\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\nproperty float quality\nelement edge 1\nproperty int a\nproperty int b\nend_header\n".to_vec();
        for p in [[0f32, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.5, 0.0]] {
            for c in p {
                data.extend_from_slice(&c.to_le_bytes());
            }
            data.push(255);
        }
        data.push(3);
        for i in [0i32, 1, 2] {
            data.extend_from_slice(&i.to_le_bytes());
        }
        data.extend_from_slice(&1.5f32.to_le_bytes());
        data.extend_from_slice(&[0; 8]);
        let m = parse(&data).unwrap();
        assert_eq!(m.vertex(2), Vec3::new(0.0, 0.5, 0.0));
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn big_endian_and_quads() {
        let mut data = b"ply\nformat binary_big_endian 1.0\nelement vertex 4\nproperty double x\nproperty double y\nproperty double z\nelement face 1\nproperty list uchar uint vertex_indices\nend_header\n".to_vec();
        for p in [[0.0f64, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]] {
            for c in p {
                data.extend_from_slice(&c.to_be_bytes());
            }
        }
        data.push(4);
        for i in [0u32, 1, 2, 3] {
            data.extend_from_slice(&i.to_be_bytes());
        }
        let m = parse(&data).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
        assert_eq!(m.vertex(2), Vec3::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn truncated_binary_reports_offset() {
        let (v, f) = sample();
        let mut out = Vec::new();
        write(&mut out, &v, &f, PlyEncoding::BinaryLittleEndian).unwrap();
        out.truncate(out.len() - 3);
        let err = parse(&out).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(err.to_string().contains("byte"), "{err}");
    }

    #[test]
    fn ascii_errors_report_line() {
        let src = b"ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 oops\n0 1 0\n3 0 1 2\n";
        let err = parse(src).unwrap_err().to_string();
        assert!(err.contains("line 11"), "{err}");
        assert!(parse(b"plx\n").is_err());
        assert!(parse(b"ply\nformat ascii 1.0\nelement vertex 0\n").is_err());
    }
}
