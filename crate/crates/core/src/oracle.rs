//! Brute-force reference enumeration used to check the interval tree.
//!
//! Walks every face strip reachable from the source by straight unfolding,
//! laying triangles out from edge lengths alone, and branches at every
//! visible saddle over the directions whose side angles are both at least π.
//! It shares no code with the propagation engine beyond the mesh itself.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geom2d::Vec2;
use crate::math::{lerp3, sqrt, wrap, TAU};
use crate::mesh::{FaceId, HalfEdgeId, MeshError, SurfacePoint, TriangleMesh, VertexId};
use crate::path::{dedup_sorted, GeodesicPath, PathPoint, PointLoc};
use crate::{EPS_PATH, EPS_SNAP};

pub const DEFAULT_VISIT_CAP: u64 = 50_000_000;

/// Slack on cone membership and portal crossing parameters.
const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid point: {0}")]
    Point(#[from] MeshError),
    #[error("search visited more than {0} faces")]
    VisitCap(u64),
}

/// Third corner of a triangle on the left of `a → b`, given `|aw|` and `|bw|`.
fn apex_left(a: Vec2, b: Vec2, la: f64, lb: f64) -> Vec2 {
    let l = a.dist(b);
    let ex = (b - a) * (1.0 / l);
    let ey = Vec2::new(-ex.y, ex.x);
    let x = (l * l + la * la - lb * lb) / (2.0 * l);
    let y = sqrt((la * la - x * x).max(0.0));
    a + ex * x + ey * y
}

fn he(f: FaceId, i: usize) -> HalfEdgeId {
    HalfEdgeId(3 * f.0 + i as u32)
}

#[derive(Clone, Copy)]
struct Cone {
    right: Vec2,
    left: Vec2,
}

impl Cone {
    fn contains(&self, q: Vec2) -> bool {
        let n = q.norm();
        // width stays below π, so the bisector separates the cone from its opposite
        let mid = self.right.normalized() + self.left.normalized();
        mid.dot(q) > 0.0
            && self.right.cross(q) >= -SLACK * self.right.norm() * n
            && q.cross(self.left) >= -SLACK * n * self.left.norm()
    }
}

struct Origin {
    points: Vec<PathPoint>,
    faces: Vec<FaceId>,
    len: f64,
}

struct Portal {
    h: HalfEdgeId,
    a: Vec2,
    b: Vec2,
}

/// Order in which the search visits exits and vertex sectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    #[default]
    Forward,
    Reverse,
}

struct Search<'a> {
    mesh: &'a TriangleMesh,
    order: SearchOrder,
    target: SurfacePoint,
    radius: f64,
    visits: u64,
    cap: u64,
    out: Vec<GeodesicPath>,
}

impl Search<'_> {
    fn ordered<T, I: IntoIterator<Item = T>>(&self, items: I) -> Vec<T> {
        let mut v: Vec<T> = items.into_iter().collect();
        if self.order == SearchOrder::Reverse {
            v.reverse();
        }
        v
    }

    /// Path from the origin along the strip to `q`, or `None` if the ray misses a portal.
    fn polyline(&self, org: &Origin, portals: &[Portal], strip: &[FaceId], q: Vec2, end: PathPoint) -> Option<GeodesicPath> {
        let mesh = self.mesh;
        let mut points = org.points.clone();
        let mut last = 0.0;
        for p in portals {
            let d = p.b - p.a;
            let den = q.cross(d);
            if den.abs() < 1e-300 {
                return None;
            }
            let u = p.a.cross(q) / den;
            // position of the crossing along the ray, as a fraction of |q|
            let along = p.a.cross(d) / den;
            // crossings at an edge end pass a vertex; only branching may do that
            if !(u > EPS_SNAP && u < 1.0 - EPS_SNAP) || along < last - SLACK || along > 1.0 + SLACK {
                return None;
            }
            last = along;
            let edge = mesh.edge_of(p.h);
            let pos = lerp3(mesh.position(mesh.origin(p.h)), mesh.position(mesh.dest(p.h)), u);
            let cu = if mesh.edge_half_edge(edge) == p.h { u } else { 1.0 - u };
            points.push(PathPoint {
                pos,
                loc: PointLoc::Edge { edge, u: cu },
            });
        }
        points.push(end);
        let mut faces = org.faces.clone();
        faces.extend_from_slice(strip);
        Some(GeodesicPath::new(points, faces))
    }

    fn emit(&mut self, g: GeodesicPath) {
        if let Some(g) = g.snapped(self.mesh).filter(|g| g.length < self.radius) {
            self.out.push(g);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn strip(
        &mut self,
        org: &Origin,
        f: FaceId,
        p: [Vec2; 3],
        entry: Option<HalfEdgeId>,
        cone: Option<Cone>,
        portals: &mut Vec<Portal>,
        strip: &mut Vec<FaceId>,
    ) -> Result<(), OracleError> {
        self.visits += 1;
        if self.visits > self.cap {
            return Err(OracleError::VisitCap(self.cap));
        }
        let mesh = self.mesh;
        let visible = |q: Vec2| cone.map_or(true, |c| c.contains(q));
        let scale = mesh.mean_edge_length();

        // target inside the face or on a non-entry edge
        let tq = match self.target {
            SurfacePoint::Face { face, bary } if face == f => Some(p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2]),
            SurfacePoint::Edge { edge, u } => (0..3)
                .map(|k| he(f, k))
                .find(|&h| mesh.edge_of(h) == edge && Some(h) != entry)
                .map(|h| {
                    let k = (h.0 % 3) as usize;
                    let along = if mesh.edge_half_edge(edge) == h { u } else { 1.0 - u };
                    p[k].lerp(p[(k + 1) % 3], along)
                }),
            _ => None,
        };
        if let Some(q) = tq {
            if q.norm() > 1e-12 * scale && visible(q) && org.len + q.norm() < self.radius {
                let end = PathPoint {
                    pos: mesh.point_position(&self.target),
                    loc: match self.target {
                        SurfacePoint::Edge { edge, u } => PointLoc::Edge { edge, u },
                        _ => PointLoc::Face(f),
                    },
                };
                if let Some(g) = self.polyline(org, portals, strip, q, end) {
                    self.emit(g);
                }
            }
        }

        // vertices not on the entry edge
        let fv = mesh.face_vertices(f);
        for i in 0..3 {
            if let Some(e) = entry {
                if i != ((e.0 % 3) as usize + 2) % 3 {
                    continue;
                }
            }
            let q = p[i];
            if q.norm() <= 1e-12 * scale || !visible(q) || !(org.len + q.norm() < self.radius) {
                continue;
            }
            let v = fv[i];
            let is_target = self.target == SurfacePoint::Vertex(v);
            if !is_target && !mesh.is_saddle(v) {
                continue;
            }
            let end = PathPoint {
                pos: mesh.position(v),
                loc: PointLoc::Vertex(v),
            };
            let Some(g) = self.polyline(org, portals, strip, q, end) else { continue };
            if mesh.is_saddle(v) {
                // incoming direction at v, measured in the corner of f
                let hv = he(f, i);
                let dn = p[(i + 1) % 3] - q;
                let back = -q;
                let phi = (dn.cross(back)).atan2_pos(dn.dot(back)).clamp(0.0, mesh.corner_angle(hv));
                let beta = mesh.sector_start(hv) + phi;
                let tau = mesh.total_angle(v);
                let next = Origin {
                    points: g.points.clone(),
                    faces: g.faces.clone(),
                    len: g.length,
                };
                self.branch(&next, v, beta + PI, tau - TAU)?;
            }
            if is_target {
                self.emit(g);
            }
        }

        // exits
        for k in self.ordered([0, 1, 2]) {
            let e = he(f, k);
            if Some(e) == entry {
                continue;
            }
            let (a, b) = (p[k], p[(k + 1) % 3]);
            if a.cross(b) <= 0.0 {
                continue;
            }
            let Some(te) = mesh.twin(e) else { continue };
            let c = match cone {
                None => Cone { right: a, left: b },
                Some(c) => Cone {
                    right: if c.right.cross(a) > 0.0 { a } else { c.right },
                    left: if b.cross(c.left) > 0.0 { b } else { c.left },
                },
            };
            if c.right.cross(c.left) < -SLACK * c.right.norm() * c.left.norm() {
                continue;
            }
            if org.len + seg_dist(a, b) >= self.radius {
                continue;
            }
            let g = mesh.face_of(te);
            let j = (te.0 % 3) as usize;
            let w = apex_left(b, a, mesh.he_len(mesh.prev(te)), mesh.he_len(mesh.next(te)));
            let mut np = [Vec2::ZERO; 3];
            np[j] = b;
            np[(j + 1) % 3] = a;
            np[(j + 2) % 3] = w;
            portals.push(Portal { h: e, a, b });
            strip.push(g);
            let r = self.strip(org, g, np, Some(te), Some(c), portals, strip);
            portals.pop();
            strip.pop();
            r?;
        }
        Ok(())
    }

    /// Straight strips leaving vertex `v` in directions `[start, start + len]` (closed, modulo τ).
    fn branch(&mut self, org: &Origin, v: VertexId, start: f64, len: f64) -> Result<(), OracleError> {
        let mesh = self.mesh;
        let tau = mesh.total_angle(v);
        let a0 = wrap(start - SLACK, tau);
        let len = len + 2.0 * SLACK;
        for h in self.ordered(mesh.outgoing(v).to_vec()) {
            let sigma = mesh.sector_start(h);
            let theta = mesh.corner_angle(h);
            for k in [-1.0, 0.0, 1.0] {
                let lo = (a0 + k * tau).max(sigma);
                let hi = (a0 + len + k * tau).min(sigma + theta);
                if lo <= hi {
                    let (lo, hi) = (lo.min(sigma + theta), hi.max(sigma));
                    self.sector(org, h, lo - sigma, hi - sigma)?;
                }
            }
        }
        Ok(())
    }

    fn sector(&mut self, org: &Origin, h: HalfEdgeId, phi0: f64, phi1: f64) -> Result<(), OracleError> {
        let mesh = self.mesh;
        let f = mesh.face_of(h);
        let i = (h.0 % 3) as usize;
        let d = Vec2::new(mesh.he_len(h), 0.0);
        let w = apex_left(Vec2::ZERO, d, mesh.he_len(mesh.prev(h)), mesh.he_len(mesh.next(h)));
        let mut p = [Vec2::ZERO; 3];
        p[(i + 1) % 3] = d;
        p[(i + 2) % 3] = w;
        let cone = Cone {
            right: Vec2::from_angle(phi0),
            left: Vec2::from_angle(phi1),
        };
        self.strip(org, f, p, None, Some(cone), &mut Vec::new(), &mut vec![f])
    }

    /// Start inside face `f` at barycentric `bary`.
    fn from_face_point(&mut self, org: &Origin, f: FaceId, bary: [f64; 3]) -> Result<(), OracleError> {
        let mesh = self.mesh;
        let l0 = mesh.he_len(he(f, 0));
        let p0 = Vec2::ZERO;
        let p1 = Vec2::new(l0, 0.0);
        let p2 = apex_left(p0, p1, mesh.he_len(he(f, 2)), mesh.he_len(he(f, 1)));
        let o = p0 * bary[0] + p1 * bary[1] + p2 * bary[2];
        let p = [p0 - o, p1 - o, p2 - o];
        self.strip(org, f, p, None, None, &mut Vec::new(), &mut vec![f])
    }
}

trait Atan2Pos {
    fn atan2_pos(self, x: f64) -> f64;
}

impl Atan2Pos for f64 {
    /// `atan2(self, x)` mapped into `[0, 2π)`.
    fn atan2_pos(self, x: f64) -> f64 {
        let a = crate::math::atan2(self, x);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }
}

/// Distance from the origin to segment `ab`.
fn seg_dist(a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let t = (-a.dot(d) / d.dot(d)).clamp(0.0, 1.0);
    (a + d * t).norm()
}

/// Every geodesic from `s` to `t` shorter than `radius`, found by exhaustive
/// unfolding. Exponential in `radius`; meant for small meshes and radii.
pub fn exhaustive_enumerate(
    mesh: &TriangleMesh,
    s: SurfacePoint,
    t: SurfacePoint,
    radius: f64,
) -> Result<Vec<GeodesicPath>, OracleError> {
    exhaustive_enumerate_with(mesh, s, t, radius, DEFAULT_VISIT_CAP)
}

pub fn exhaustive_enumerate_with(
    mesh: &TriangleMesh,
    s: SurfacePoint,
    t: SurfacePoint,
    radius: f64,
    visit_cap: u64,
) -> Result<Vec<GeodesicPath>, OracleError> {
    exhaustive_enumerate_ordered(mesh, s, t, radius, visit_cap, SearchOrder::Forward)
}

pub fn exhaustive_enumerate_ordered(
    mesh: &TriangleMesh,
    s: SurfacePoint,
    t: SurfacePoint,
    radius: f64,
    visit_cap: u64,
    order: SearchOrder,
) -> Result<Vec<GeodesicPath>, OracleError> {
    let s = mesh.canonicalize(s)?;
    let t = mesh.canonicalize(t)?;
    let mut search = Search {
        mesh,
        order,
        target: t,
        radius,
        visits: 0,
        cap: visit_cap,
        out: Vec::new(),
    };
    let sp = mesh.point_position(&s);
    if crate::math::dist3(sp, mesh.point_position(&t)) <= 1e-12 * mesh.mean_edge_length() {
        return Ok(Vec::new());
    }
    let start = |loc| Origin {
        points: vec![PathPoint { pos: sp, loc }],
        faces: Vec::new(),
        len: 0.0,
    };
    match s {
        SurfacePoint::Face { face, bary } => {
            search.from_face_point(&start(PointLoc::Face(face)), face, bary)?;
        }
        SurfacePoint::Edge { edge, u } => {
            let org = start(PointLoc::Edge { edge, u });
            let h0 = mesh.edge_half_edge(edge);
            for h in [Some(h0), mesh.twin(h0)].into_iter().flatten() {
                let along = if h == h0 { u } else { 1.0 - u };
                let k = (h.0 % 3) as usize;
                let mut bary = [0.0; 3];
                bary[k] = 1.0 - along;
                bary[(k + 1) % 3] = along;
                search.from_face_point(&org, mesh.face_of(h), bary)?;
            }
        }
        SurfacePoint::Vertex(v) => {
            let org = start(PointLoc::Vertex(v));
            for &h in mesh.outgoing(v) {
                search.sector(&org, h, 0.0, mesh.corner_angle(h))?;
            }
        }
    }
    Ok(dedup_sorted(search.out, EPS_PATH))
}
