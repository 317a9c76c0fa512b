//! Minimal ASCII OBJ support: `v` and `f` records, 1-based or negative indices.

use std::fmt::Write as _;

use geodenum_core::mesh::{MeshError, TriangleMesh};

#[derive(Debug, thiserror::Error)]
pub enum ObjError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Raw positions and triangles, before validation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjData {
    pub positions: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> ObjError {
    ObjError::Parse { line, msg: msg.into() }
}

pub fn parse_obj(text: &str) -> Result<ObjData, ObjError> {
    let mut data = ObjData::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut it = content.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in &mut p {
                    let tok = it.next().ok_or_else(|| parse_err(line, "vertex needs 3 coordinates"))?;
                    *c = tok.parse::<f64>().map_err(|_| parse_err(line, format!("bad coordinate {tok:?}")))?;
                    if !c.is_finite() {
                        return Err(parse_err(line, "non-finite coordinate"));
                    }
                }
                data.positions.push(p);
            }
            Some("f") => {
                let mut idx = Vec::with_capacity(3);
                for tok in it {
                    let head = tok.split('/').next().unwrap_or("");
                    let k: i64 = head.parse().map_err(|_| parse_err(line, format!("bad index {tok:?}")))?;
                    let n = data.positions.len() as i64;
                    let k = match k {
                        k if k > 0 => k - 1,
                        k if k < 0 => n + k,
                        _ => return Err(parse_err(line, "index 0 is not valid in OBJ")),
                    };
                    if k < 0 {
                        return Err(parse_err(line, format!("index {head} out of range")));
                    }
                    idx.push(k as usize);
                }
                let face = data.faces.len();
                let tri: [usize; 3] = idx.as_slice().try_into().map_err(|_| {
                    ObjError::Mesh(MeshError::NonTriangularFace { face, arity: idx.len() })
                })?;
                data.faces.push(tri);
            }
            _ => {}
        }
    }
    Ok(data)
}

pub fn load_mesh(text: &str) -> Result<TriangleMesh, ObjError> {
    let d = parse_obj(text)?;
    Ok(TriangleMesh::new(d.positions, &d.faces)?)
}

/// OBJ text for `mesh`. Coordinates use shortest round-trip formatting.
pub fn emit_mesh(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    for p in mesh.positions() {
        let _ = writeln!(s, "v {:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    for f in mesh.faces() {
        let _ = writeln!(s, "f {} {} {}", f[0].0 + 1, f[1].0 + 1, f[2].0 + 1);
    }
    s
}
