//! Versioned tree files.
//!
//! A tree file is one JSON object:
//!
//! - `format`: always `"geodenum-tree"`.
//! - `version`: [`VERSION`]; other versions are rejected.
//! - `mesh`: `positions` (`[x, y, z]` per vertex) and `faces` (0-based CCW
//!   vertex triples), so a tree file is self-contained.
//! - `tree`: header fields `mode`, `source`, `radius`; the interval table
//!   `intervals` (`parent`, `edge`, `lo`, `hi`, `center`, `depth`,
//!   `pseudo_source_root`); the registry `arrivals` and `ranges`, one list per
//!   vertex; and `stats`.
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! load/save cycle is bit-exact. The layout is also described by
//! `schemas/tree.schema.json`.

use std::io::{Read, Write};

use geodenum_core::mesh::{MeshError, TriangleMesh};
use geodenum_core::propagation::GeodesicIntervalTree;
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "geodenum-tree";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum TreeFileError {
    #[error("tree file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a tree file (format {0:?})")]
    Format(String),
    #[error("tree file version {found} is not supported (expected {VERSION})")]
    Version { found: u32 },
    #[error("embedded mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("tree does not fit its mesh: {0}")]
    Inconsistent(&'static str),
}

#[derive(Serialize, Deserialize)]
struct MeshRecord {
    positions: Vec<[f64; 3]>,
    faces: Vec<[u32; 3]>,
}

#[derive(Serialize)]
struct FileOut<'a> {
    format: &'static str,
    version: u32,
    mesh: MeshRecord,
    tree: &'a GeodesicIntervalTree,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Deserialize)]
struct FileIn {
    mesh: MeshRecord,
    tree: GeodesicIntervalTree,
}

pub fn write_tree<W: Write>(w: W, mesh: &TriangleMesh, tree: &GeodesicIntervalTree) -> Result<(), TreeFileError> {
    let mesh = MeshRecord {
        positions: mesh.positions().to_vec(),
        faces: mesh.faces().iter().map(|f| [f[0].0, f[1].0, f[2].0]).collect(),
    };
    let mut w = std::io::BufWriter::new(w);
    serde_json::to_writer(
        &mut w,
        &FileOut {
            format: FORMAT,
            version: VERSION,
            mesh,
            tree,
        },
    )?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn tree_to_string(mesh: &TriangleMesh, tree: &GeodesicIntervalTree) -> String {
    let mut buf = Vec::new();
    write_tree(&mut buf, mesh, tree).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn read_tree<R: Read>(mut r: R) -> Result<(TriangleMesh, GeodesicIntervalTree), TreeFileError> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    tree_from_str(&s)
}

pub fn tree_from_str(s: &str) -> Result<(TriangleMesh, GeodesicIntervalTree), TreeFileError> {
    let h: Header = serde_json::from_str(s)?;
    if h.format != FORMAT {
        return Err(TreeFileError::Format(h.format));
    }
    if h.version != VERSION {
        return Err(TreeFileError::Version { found: h.version });
    }
    let f: FileIn = serde_json::from_str(s)?;
    let faces: Vec<[usize; 3]> = f.mesh.faces.iter().map(|t| t.map(|i| i as usize)).collect();
    let mesh = TriangleMesh::new(f.mesh.positions, &faces)?;
    let mut tree = f.tree;
    check_fits(&mesh, &tree)?;
    tree.reindex(mesh.half_edge_count());
    Ok((mesh, tree))
}

fn check_fits(mesh: &TriangleMesh, tree: &GeodesicIntervalTree) -> Result<(), TreeFileError> {
    let n = tree.intervals.len();
    if tree.arrivals.len() != mesh.vertex_count() || tree.ranges.len() != mesh.vertex_count() {
        return Err(TreeFileError::Inconsistent("registry size differs from vertex count"));
    }
    for (i, iv) in tree.intervals.iter().enumerate() {
        if iv.edge.idx() >= mesh.half_edge_count() {
            return Err(TreeFileError::Inconsistent("interval on unknown half-edge"));
        }
        // parents precede children in the arena
        if iv.parent.is_some_and(|p| p.idx() >= i) {
            return Err(TreeFileError::Inconsistent("parent id does not precede child"));
        }
    }
    if tree.arrivals.iter().flatten().any(|a| a.interval.idx() >= n) {
        return Err(TreeFileError::Inconsistent("arrival names unknown interval"));
    }
    mesh.canonicalize(tree.source)?;
    Ok(())
}
