//! Result documents: geodesic lists and geodesic graphs as JSON, CSV or OBJ polylines.
//!
//! JSON layouts are pinned by `schemas/geodesics.schema.json` and
//! `schemas/graph.schema.json`.

use std::fmt::Write as _;

use geodenum_core::path::{GeodesicPath, PathPoint, PointLoc};
use geodenum_core::propagation::Mode;
use geodenum_core::query::{GeodesicGraph, GraphNode, PrimitiveGeodesic};
use serde::{Deserialize, Serialize};

pub const GEODESICS_FORMAT: &str = "geodenum-geodesics";
pub const GRAPH_FORMAT: &str = "geodenum-graph";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRecord {
    pub length: f64,
    pub points: Vec<[f64; 3]>,
    /// Mesh vertices passed through, in order; all hyperbolic.
    pub passed_vertices: Vec<u32>,
}

impl From<&GeodesicPath> for GeodesicRecord {
    fn from(g: &GeodesicPath) -> Self {
        GeodesicRecord {
            length: g.length,
            points: g.points.iter().map(|p| p.pos).collect(),
            passed_vertices: g.passed_vertices().iter().map(|v| v.0).collect(),
        }
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Complete => "complete",
        Mode::Reduced => "reduced",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicsDoc {
    pub format: String,
    pub version: u32,
    pub mode: String,
    pub source: String,
    pub target: String,
    pub radius: f64,
    pub count: usize,
    /// Sorted by length, then lexicographically by coordinates.
    pub geodesics: Vec<GeodesicRecord>,
}

impl GeodesicsDoc {
    pub fn new(mode: Mode, source: String, target: String, radius: f64, paths: &[GeodesicPath]) -> Self {
        GeodesicsDoc {
            format: GEODESICS_FORMAT.into(),
            version: VERSION,
            mode: mode_name(mode).into(),
            source,
            target,
            radius,
            count: paths.len(),
            geodesics: paths.iter().map(GeodesicRecord::from).collect(),
        }
    }
}

/// `s`, `t` or `v<ID>`.
pub fn node_label(n: GraphNode) -> String {
    match n {
        GraphNode::Source => "s".into(),
        GraphNode::Target => "t".into(),
        GraphNode::Vertex(v) => format!("v{}", v.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEdgeRecord {
    pub from: String,
    pub to: String,
    pub length: f64,
    pub points: Vec<[f64; 3]>,
    pub out_angle: Option<f64>,
    pub in_angle: Option<f64>,
}

impl From<&PrimitiveGeodesic> for GraphEdgeRecord {
    fn from(e: &PrimitiveGeodesic) -> Self {
        GraphEdgeRecord {
            from: node_label(e.from),
            to: node_label(e.to),
            length: e.length,
            points: e.points.iter().map(|p| p.pos).collect(),
            out_angle: e.out_angle,
            in_angle: e.in_angle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub format: String,
    pub version: u32,
    pub source: String,
    pub target: String,
    pub radius: f64,
    pub nodes: Vec<String>,
    pub edges: Vec<GraphEdgeRecord>,
    /// Source-to-target paths of the graph, present with `--expand`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<GeodesicRecord>>,
}

impl GraphDoc {
    pub fn new(source: String, target: String, radius: f64, g: &GeodesicGraph, paths: Option<&[GeodesicPath]>) -> Self {
        GraphDoc {
            format: GRAPH_FORMAT.into(),
            version: VERSION,
            source,
            target,
            radius,
            nodes: g.nodes.iter().map(|&n| node_label(n)).collect(),
            edges: g.edges.iter().map(GraphEdgeRecord::from).collect(),
            paths: paths.map(|p| p.iter().map(GeodesicRecord::from).collect()),
        }
    }
}

fn loc_fields(p: &PathPoint) -> (&'static str, u32) {
    match p.loc {
        PointLoc::Face(f) => ("face", f.0),
        PointLoc::Edge { edge, .. } => ("edge", edge.0),
        PointLoc::Vertex(v) => ("vertex", v.0),
    }
}

/// One row per polyline point: `geodesic,length,point,x,y,z,loc,id`.
pub fn geodesics_csv(paths: &[GeodesicPath]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["geodesic", "length", "point", "x", "y", "z", "loc", "id"])?;
    for (i, g) in paths.iter().enumerate() {
        for (j, p) in g.points.iter().enumerate() {
            let (loc, id) = loc_fields(p);
            w.write_record([
                i.to_string(),
                format!("{:?}", g.length),
                j.to_string(),
                format!("{:?}", p.pos[0]),
                format!("{:?}", p.pos[1]),
                format!("{:?}", p.pos[2]),
                loc.to_string(),
                id.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}

/// One `l` polyline per geodesic, vertices listed first.
pub fn geodesics_obj(paths: &[GeodesicPath]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} geodesics", paths.len());
    for g in paths {
        for p in &g.points {
            let _ = writeln!(s, "v {:?} {:?} {:?}", p.pos[0], p.pos[1], p.pos[2]);
        }
    }
    let mut base = 1;
    for g in paths {
        s.push('l');
        for k in 0..g.points.len() {
            let _ = write!(s, " {}", base + k);
        }
        s.push('\n');
        base += g.points.len();
    }
    s
}
