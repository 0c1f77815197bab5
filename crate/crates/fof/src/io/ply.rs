//! Stanford PLY, ascii and binary little-endian.
//!
//! Only `vertex` (with `x`, `y`, `z`; other properties are skipped) and
//! `face` (a `vertex_indices` or `vertex_index` list, fan-triangulated)
//! elements are accepted.

use std::io::{BufRead, Write};

use fof_core::{TriangleMesh, Vec3};

use super::{ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlyEncoding {
    Ascii,
    #[default]
    BinaryLittleEndian,
}

/// Vertex coordinate type on write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlyScalar {
    #[default]
    Float32,
    Float64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlyOptions {
    pub encoding: PlyEncoding,
    pub scalar: PlyScalar,
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
    fn parse(name: &str) -> Option<Self> {
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

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, kind: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

impl Property {
    fn name(&self) -> &str {
        match self {
            Property::Scalar { name, .. } | Property::List { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Vertex,
    Face,
}

#[derive(Debug)]
struct Element {
    kind: Kind,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    ascii: bool,
    elements: Vec<Element>,
    /// Lines consumed, including `end_header`.
    lines: usize,
}

fn read_header(input: &mut impl BufRead) -> Result<Header> {
    let mut line = String::new();
    let mut number = 0;
    let mut next = |line: &mut String| -> Result<usize> {
        line.clear();
        if input.read_line(line)? == 0 {
            return Err(ParseError::new("unexpected end of file in header").into());
        }
        number += 1;
        Ok(number)
    };
    let n = next(&mut line)?;
    if line.trim_end() != "ply" {
        return Err(ParseError::at(n, "missing `ply` signature").into());
    }
    let mut ascii = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let n = next(&mut line)?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["format", format, _version] => {
                ascii = Some(match *format {
                    "ascii" => true,
                    "binary_little_endian" => false,
                    "binary_big_endian" => {
                        return Err(ParseError::at(n, "binary_big_endian PLY is not supported").into())
                    }
                    other => return Err(ParseError::at(n, format!("unknown format {other:?}")).into()),
                });
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let kind = match *name {
                    "vertex" => Kind::Vertex,
                    "face" => Kind::Face,
                    other => {
                        return Err(ParseError::at(n, format!("unsupported element {other:?}")).into());
                    }
                };
                if elements.iter().any(|e| e.kind == kind) {
                    return Err(ParseError::at(n, format!("element {name:?} declared twice")).into());
                }
                let count = count
                    .parse()
                    .map_err(|_| ParseError::at(n, format!("bad element count {count:?}")))?;
                elements.push(Element {
                    kind,
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", count, item, name] => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| ParseError::at(n, "property before any element"))?;
                let (Some(count), Some(item)) = (Scalar::parse(count), Scalar::parse(item)) else {
                    return Err(ParseError::at(n, "unknown list property type").into());
                };
                if matches!(count, Scalar::F32 | Scalar::F64) {
                    return Err(ParseError::at(n, "list length must be an integer type").into());
                }
                element.properties.push(Property::List {
                    name: name.to_string(),
                    count,
                    item,
                });
            }
            ["property", kind, name] => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| ParseError::at(n, "property before any element"))?;
                let kind = Scalar::parse(kind).ok_or_else(|| ParseError::at(n, format!("unknown type {kind:?}")))?;
                element.properties.push(Property::Scalar {
                    name: name.to_string(),
                    kind,
                });
            }
            ["end_header"] => break,
            _ => return Err(ParseError::at(n, format!("unexpected header line {:?}", line.trim_end())).into()),
        }
    }
    let ascii = ascii.ok_or_else(|| ParseError::new("header has no format line"))?;
    for e in &elements {
        let names: Vec<&str> = e.properties.iter().map(Property::name).collect();
        match e.kind {
            Kind::Vertex => {
                for axis in ["x", "y", "z"] {
                    let found = e
                        .properties
                        .iter()
                        .any(|p| matches!(p, Property::Scalar { name, .. } if name == axis));
                    if !found {
                        return Err(ParseError::new(format!("element \"vertex\" has no scalar {axis:?} property")).into());
                    }
                }
            }
            Kind::Face => {
                let found = e.properties.iter().any(
                    |p| matches!(p, Property::List { name, .. } if name == "vertex_indices" || name == "vertex_index"),
                );
                if !found {
                    return Err(ParseError::new(format!("element \"face\" has no vertex index list (properties {names:?})")).into());
                }
            }
        }
    }
    Ok(Header {
        ascii,
        elements,
        lines: number,
    })
}

/// Streams property values of one element instance.
trait Values {
    fn scalar(&mut self, kind: Scalar) -> Result<f64>;
}

struct Binary<'a> {
    bytes: &'a [u8],
    at: usize,
    element: &'static str,
}

impl Values for Binary<'_> {
    fn scalar(&mut self, kind: Scalar) -> Result<f64> {
        let size = kind.size();
        let Some(b) = self.bytes.get(self.at..self.at + size) else {
            return Err(ParseError::new(format!("unexpected end of data in element {:?}", self.element)).into());
        };
        self.at += size;
        Ok(kind.read_le(b))
    }
}

struct Ascii<'a> {
    tokens: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl Values for Ascii<'_> {
    fn scalar(&mut self, kind: Scalar) -> Result<f64> {
        let token = self
            .tokens
            .next()
            .ok_or_else(|| ParseError::at(self.line, "too few values"))?;
        let bad = || ParseError::at(self.line, format!("bad value {token:?}"));
        // float32 text is read at float32 precision, as binary data would be
        let value = match kind {
            Scalar::F32 => token.parse::<f32>().map_err(|_| bad())? as f64,
            _ => token.parse::<f64>().map_err(|_| bad())?,
        };
        if !matches!(kind, Scalar::F32 | Scalar::F64) && value.fract() != 0.0 {
            return Err(ParseError::at(self.line, format!("expected an integer, found {token:?}")).into());
        }
        Ok(value)
    }
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Vertex => "vertex",
        Kind::Face => "face",
    }
}

/// Reads one element instance into the mesh under construction.
fn read_instance(
    element: &Element,
    values: &mut impl Values,
    vertices: &mut Vec<Vec3>,
    faces: &mut Vec<Vec<u32>>,
    line: Option<usize>,
) -> Result<()> {
    let error = |message: String| match line {
        Some(l) => ParseError::at(l, message),
        None => ParseError::new(message),
    };
    let mut p = [0.0; 3];
    let mut face = Vec::new();
    for property in &element.properties {
        match property {
            Property::Scalar { name, kind } => {
                let v = values.scalar(*kind)?;
                if element.kind == Kind::Vertex {
                    match name.as_str() {
                        "x" => p[0] = v,
                        "y" => p[1] = v,
                        "z" => p[2] = v,
                        _ => {}
                    }
                }
            }
            Property::List { name, count, item } => {
                let len = values.scalar(*count)?;
                if len < 0.0 {
                    return Err(error(format!("negative list length in {name:?}")).into());
                }
                let is_index = element.kind == Kind::Face && (name == "vertex_indices" || name == "vertex_index");
                for _ in 0..len as usize {
                    let v = values.scalar(*item)?;
                    if is_index {
                        if v < 0.0 || v > u32::MAX as f64 {
                            return Err(error(format!("face index {v} out of range")).into());
                        }
                        face.push(v as u32);
                    }
                }
                if is_index && face.len() < 3 {
                    return Err(error(format!("face with {} vertices", face.len())).into());
                }
            }
        }
    }
    match element.kind {
        Kind::Vertex => vertices.push(Vec3::new(p[0], p[1], p[2])),
        Kind::Face => faces.push(face),
    }
    Ok(())
}

pub fn read_ply(mut input: impl BufRead) -> Result<TriangleMesh> {
    let header = read_header(&mut input)?;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    if header.ascii {
        let mut lines = input.lines();
        let mut number = header.lines;
        for element in &header.elements {
            for _ in 0..element.count {
                let line = loop {
                    number += 1;
                    match lines.next() {
                        Some(l) => {
                            let l = l?;
                            if !l.trim().is_empty() {
                                break l;
                            }
                        }
                        None => {
                            return Err(ParseError::at(
                                number,
                                format!("unexpected end of file in element {:?}", kind_name(element.kind)),
                            )
                            .into())
                        }
                    }
                };
                let mut values = Ascii {
                    tokens: line.split_whitespace(),
                    line: number,
                };
                read_instance(element, &mut values, &mut vertices, &mut faces, Some(number))?;
                if values.tokens.next().is_some() {
                    return Err(ParseError::at(number, "too many values").into());
                }
            }
        }
    } else {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let mut at = 0;
        for element in &header.elements {
            let mut values = Binary {
                bytes: &bytes,
                at,
                element: kind_name(element.kind),
            };
            for _ in 0..element.count {
                read_instance(element, &mut values, &mut vertices, &mut faces, None)?;
            }
            at = values.at;
        }
    }
    let mut triangles = Vec::new();
    for face in &faces {
        for k in 1..face.len() - 1 {
            triangles.push([face[0], face[k], face[k + 1]]);
        }
    }
    Ok(TriangleMesh::new(vertices, triangles)?)
}

pub fn write_ply(mut out: impl Write, mesh: &TriangleMesh, options: PlyOptions) -> Result<()> {
    let format = match options.encoding {
        PlyEncoding::Ascii => "ascii",
        PlyEncoding::BinaryLittleEndian => "binary_little_endian",
    };
    let scalar = match options.scalar {
        PlyScalar::Float32 => "float",
        PlyScalar::Float64 => "double",
    };
    write!(
        out,
        "ply\nformat {format} 1.0\nelement vertex {}\nproperty {scalar} x\nproperty {scalar} y\nproperty {scalar} z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.triangles.len()
    )?;
    match options.encoding {
        PlyEncoding::Ascii => {
            for v in &mesh.vertices {
                match options.scalar {
                    PlyScalar::Float32 => writeln!(out, "{} {} {}", v.x as f32, v.y as f32, v.z as f32)?,
                    PlyScalar::Float64 => writeln!(out, "{} {} {}", v.x, v.y, v.z)?,
                }
            }
            for t in &mesh.triangles {
                writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
            }
        }
        PlyEncoding::BinaryLittleEndian => {
            let mut buf = Vec::with_capacity(mesh.vertices.len() * 24 + mesh.triangles.len() * 13);
            for v in &mesh.vertices {
                for c in [v.x, v.y, v.z] {
                    match options.scalar {
                        PlyScalar::Float32 => buf.extend_from_slice(&(c as f32).to_le_bytes()),
                        PlyScalar::Float64 => buf.extend_from_slice(&c.to_le_bytes()),
                    }
                }
            }
            for t in &mesh.triangles {
                buf.push(3);
                for &i in t {
                    let i = i32::try_from(i).map_err(|_| {
                        std::io::Error::new(std::io::ErrorKind::InvalidInput, "vertex index exceeds the PLY int range")
                    })?;
                    buf.extend_from_slice(&i.to_le_bytes());
                }
            }
            out.write_all(&buf)?;
        }
    }
    Ok(())
}
