//! Wavefront OBJ, geometry only.
//!
//! Reads `v` and `f` records; polygons are fan-triangulated from their first
//! corner. Texture and normal indices (`f 1/2/3`), `vt`, `vn`, groups and
//! materials are ignored.

use std::io::{BufRead, Write};

use fof_core::{TriangleMesh, Vec3};

use super::{ParseError, Result};

pub fn read_obj(input: impl BufRead) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut corners = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let number = i + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in &mut p {
                    let token = tokens
                        .next()
                        .ok_or_else(|| ParseError::at(number, "vertex needs three coordinates"))?;
                    *c = token
                        .parse()
                        .map_err(|_| ParseError::at(number, format!("bad coordinate {token:?}")))?;
                }
                vertices.push(Vec3::new(p[0], p[1], p[2]));
            }
            Some("f") => {
                corners.clear();
                for token in tokens {
                    corners.push(face_index(token, vertices.len(), number)?);
                }
                if corners.len() < 3 {
                    return Err(ParseError::at(number, "face needs at least three vertices").into());
                }
                for k in 1..corners.len() - 1 {
                    triangles.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(TriangleMesh::new(vertices, triangles)?)
}

/// Resolves a 1-based or negative (relative) index against the vertices
/// defined so far.
fn face_index(token: &str, defined: usize, line: usize) -> Result<u32, ParseError> {
    let head = token.split('/').next().unwrap_or_default();
    let index: i64 = head
        .parse()
        .map_err(|_| ParseError::at(line, format!("bad face index {token:?}")))?;
    let resolved = match index {
        0 => return Err(ParseError::at(line, "face index 0 (indices start at 1)")),
        i if i > 0 => i - 1,
        i => defined as i64 + i,
    };
    if resolved < 0 || resolved >= defined as i64 {
        return Err(ParseError::at(
            line,
            format!("face index {index} out of range ({defined} vertices defined)"),
        ));
    }
    u32::try_from(resolved).map_err(|_| ParseError::at(line, "face index too large"))
}

pub fn write_obj(mut out: impl Write, mesh: &TriangleMesh) -> Result<()> {
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", significant(v.x), significant(v.y), significant(v.z))?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// `v` rounded to 9 significant digits, printed like C's `%.9g`.
pub(crate) fn significant(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{}", if v == 0.0 { 0.0 } else { v });
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
