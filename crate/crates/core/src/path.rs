//! Geodesic polylines on the mesh and their validity checks.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::geom2d::{direction_angle_in_frame, Vec2};
use crate::math::{atan2, dist3, wrap, Vec3};
use crate::mesh::{EdgeId, FaceId, TriangleMesh, VertexId};
use crate::EPS_SNAP;

/// Where a polyline vertex sits on the mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PointLoc {
    /// Path endpoint inside a face (or the endpoint given as such).
    Face(FaceId),
    /// Crossing of an edge; `u` runs along the canonical half-edge.
    Edge { edge: EdgeId, u: f64 },
    Vertex(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathPoint {
    pub pos: Vec3,
    pub loc: PointLoc,
}

/// A polyline from `s` to `t`. `faces[i]` is the face containing segment `i`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeodesicPath {
    pub points: Vec<PathPoint>,
    pub faces: Vec<FaceId>,
    pub length: f64,
}

/// Ways a polyline can fail the geodesic conditions.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PathDefect {
    #[error("segment {0} has no face or faces do not match points")]
    Malformed(usize),
    #[error("bend of {angle} rad at edge crossing {index}")]
    Bend { index: usize, angle: f64 },
    #[error("side angle {angle} rad below pi at vertex {vertex:?}")]
    SideAngle { vertex: VertexId, angle: f64 },
    #[error("path passes non-hyperbolic vertex {0:?}")]
    NonHyperbolicVertex(VertexId),
    #[error("length {length} not below radius {radius}")]
    TooLong { length: f64, radius: f64 },
    #[error("stored length {stored} differs from polyline length {actual}")]
    LengthMismatch { stored: f64, actual: f64 },
}

impl GeodesicPath {
    pub fn new(points: Vec<PathPoint>, faces: Vec<FaceId>) -> Self {
        let length = points.windows(2).map(|w| dist3(w[0].pos, w[1].pos)).sum();
        GeodesicPath { points, faces, length }
    }

    /// Replaces edge crossings within `EPS_SNAP` of an edge end by that
    /// vertex and merges repeats. `None` if the result passes a vertex that
    /// is not an interior hyperbolic vertex.
    pub fn snapped(self, mesh: &TriangleMesh) -> Option<GeodesicPath> {
        let n = self.points.len();
        let mut points: Vec<PathPoint> = Vec::with_capacity(n);
        let mut faces = Vec::with_capacity(self.faces.len());
        for (i, &p) in self.points.iter().enumerate() {
            let mut p = p;
            if let PointLoc::Edge { edge, u } = p.loc {
                let h = mesh.edge_half_edge(edge);
                let v = if u <= EPS_SNAP {
                    Some(mesh.origin(h))
                } else if u >= 1.0 - EPS_SNAP {
                    Some(mesh.dest(h))
                } else {
                    None
                };
                if let Some(v) = v {
                    p = PathPoint {
                        pos: mesh.position(v),
                        loc: PointLoc::Vertex(v),
                    };
                }
            }
            if let (Some(last), PointLoc::Vertex(v)) = (points.last(), p.loc) {
                if last.loc == PointLoc::Vertex(v) {
                    continue;
                }
            }
            if i > 0 {
                faces.push(self.faces[i - 1]);
            }
            points.push(p);
        }
        let g = GeodesicPath::new(points, faces);
        g.passed_vertices().iter().all(|&v| mesh.is_saddle(v)).then_some(g)
    }

    /// Interior vertices the path passes through.
    pub fn passed_vertices(&self) -> Vec<VertexId> {
        let n = self.points.len();
        self.points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i > 0 && i + 1 < n)
            .filter_map(|(_, p)| match p.loc {
                PointLoc::Vertex(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    /// Same polyline within `tol` per point.
    pub fn matches(&self, other: &GeodesicPath, tol: f64) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| dist3(a.pos, b.pos) <= tol)
    }

    /// Orders by length, then lexicographically by coordinates.
    pub fn cmp_canonical(&self, other: &GeodesicPath) -> Ordering {
        self.length.total_cmp(&other.length).then_with(|| {
            for (a, b) in self.points.iter().zip(&other.points) {
                for k in 0..3 {
                    let c = a.pos[k].total_cmp(&b.pos[k]);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
            }
            self.points.len().cmp(&other.points.len())
        })
    }

    /// Largest bend at edge crossings and smallest side angle at passed vertices.
    pub fn geodesic_defects(&self, mesh: &TriangleMesh) -> Result<(f64, f64), PathDefect> {
        let n = self.points.len();
        if n < 2 || self.faces.len() + 1 != n {
            return Err(PathDefect::Malformed(0));
        }
        let mut max_bend: f64 = 0.0;
        let mut min_side = f64::INFINITY;
        for i in 1..n - 1 {
            let a = self.points[i - 1].pos;
            let x = self.points[i];
            let b = self.points[i + 1].pos;
            let (f1, f2) = (self.faces[i - 1], self.faces[i]);
            match x.loc {
                PointLoc::Edge { edge, .. } => {
                    let bend = crossing_bend(mesh, edge, f1, f2, a, x.pos, b).ok_or(PathDefect::Malformed(i))?;
                    max_bend = max_bend.max(bend);
                }
                PointLoc::Vertex(v) => {
                    let (side, _, _) = vertex_side_angles(mesh, v, f1, a, f2, b).ok_or(PathDefect::Malformed(i))?;
                    min_side = min_side.min(side);
                }
                PointLoc::Face(_) => {
                    // straight continuation inside one face
                    if f1 != f2 {
                        return Err(PathDefect::Malformed(i));
                    }
                    let h = mesh.face_half_edges(f1)[0];
                    let pa = mesh.frame_coords_of_3d(h, a);
                    let px = mesh.frame_coords_of_3d(h, x.pos);
                    let pb = mesh.frame_coords_of_3d(h, b);
                    max_bend = max_bend.max(turn(px - pa, pb - px));
                }
            }
        }
        Ok((max_bend, min_side))
    }

    /// Checks all geodesic conditions with tolerance `tol` (radians) and `length < radius`.
    pub fn validate(&self, mesh: &TriangleMesh, radius: f64, tol: f64) -> Result<(), PathDefect> {
        let (bend, side) = self.geodesic_defects(mesh)?;
        if bend >= tol {
            return Err(PathDefect::Bend { index: 0, angle: bend });
        }
        for v in self.passed_vertices() {
            if !mesh.is_saddle(v) {
                return Err(PathDefect::NonHyperbolicVertex(v));
            }
        }
        if side < PI - tol {
            let v = self.passed_vertices().first().copied().unwrap_or(VertexId(0));
            return Err(PathDefect::SideAngle { vertex: v, angle: side });
        }
        let actual: f64 = self.points.windows(2).map(|w| dist3(w[0].pos, w[1].pos)).sum();
        if (actual - self.length).abs() > 1e-9 * actual.max(1.0) {
            return Err(PathDefect::LengthMismatch {
                stored: self.length,
                actual,
            });
        }
        if !(self.length < radius) {
            return Err(PathDefect::TooLong {
                length: self.length,
                radius,
            });
        }
        Ok(())
    }
}

fn turn(d1: Vec2, d2: Vec2) -> f64 {
    atan2(d1.cross(d2), d1.dot(d2)).abs()
}

/// Angle between the incoming and outgoing directions at an edge crossing,
/// after developing `f2` into the plane of `f1`.
fn crossing_bend(mesh: &TriangleMesh, edge: EdgeId, f1: FaceId, f2: FaceId, a: Vec3, x: Vec3, b: Vec3) -> Option<f64> {
    let h = mesh.edge_half_edge(edge);
    let t = mesh.twin(h)?;
    let (h1, h2) = if mesh.face_of(h) == f1 && mesh.face_of(t) == f2 {
        (h, t)
    } else if mesh.face_of(t) == f1 && mesh.face_of(h) == f2 {
        (t, h)
    } else {
        return None;
    };
    let l = mesh.he_len(h1);
    let pa = mesh.frame_coords_of_3d(h1, a);
    let px = mesh.frame_coords_of_3d(h1, x);
    let q = mesh.frame_coords_of_3d(h2, b);
    // (x, y) in h2's frame is (L - x, -y) in h1's frame
    let pb = Vec2::new(l - q.x, -q.y);
    Some(turn(px - pa, pb - px))
}

/// Smaller side angle at `v` between the directions towards `a` (in `fa`)
/// and `b` (in `fb`), plus the two direction angles.
pub fn vertex_side_angles(
    mesh: &TriangleMesh,
    v: VertexId,
    fa: FaceId,
    a: Vec3,
    fb: FaceId,
    b: Vec3,
) -> Option<(f64, f64, f64)> {
    let ha = mesh.corner_half_edge(fa, v)?;
    let hb = mesh.corner_half_edge(fb, v)?;
    let da = mesh.frame_coords_of_3d(ha, a);
    let db = mesh.frame_coords_of_3d(hb, b);
    let beta = direction_angle_in_frame(mesh, ha, da).ok()?;
    let alpha = direction_angle_in_frame(mesh, hb, db).ok()?;
    let tau = mesh.total_angle(v);
    let s1 = wrap(beta - alpha, tau);
    let s2 = wrap(alpha - beta, tau);
    Some((s1.min(s2), beta, alpha))
}

/// Removes paths matching an earlier one within `tol`, then sorts canonically.
pub fn dedup_sorted(mut paths: Vec<GeodesicPath>, tol: f64) -> Vec<GeodesicPath> {
    paths.sort_by(|a, b| a.cmp_canonical(b));
    let mut out: Vec<GeodesicPath> = Vec::with_capacity(paths.len());
    for p in paths {
        // candidates with equal geometry have lengths within n * tol
        let slack = tol * (p.points.len() as f64 + 1.0) * 2.0;
        let dup = out
            .iter()
            .rev()
            .take_while(|q| p.length - q.length <= slack)
            .any(|q| q.matches(&p, tol));
        if !dup {
            out.push(p);
        }
    }
    out
}
