//! Half-edge triangle mesh with intrinsic angle data.
//!
//! Half-edge `3f + i` runs from corner `i` to corner `i + 1` of face `f`, so
//! `next`, `prev` and `face` are arithmetic. Twins are resolved at build time.
//! Each face also gets a planar *layout* (its three corners in a 2D frame) and
//! every half-edge frame is a rigid motion of that layout, which keeps
//! frame changes inside one face exact up to rounding.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geom2d::{RigidMotion2, Vec2};
use crate::math::{add3, angle3, cross3, dist3, dot3, lerp3, norm3, scale3, sub3, Vec3, TAU};
use crate::{EPS_ANGLE, EPS_SNAP};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn idx(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(VertexId);
id_type!(HalfEdgeId);
id_type!(FaceId);
id_type!(
    /// Undirected edge; parameterized along its canonical (smaller-id) half-edge.
    EdgeId
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VertexClass {
    Spherical,
    Euclidean,
    Hyperbolic,
}

impl VertexClass {
    pub fn from_total_angle(tau: f64) -> Self {
        if tau < TAU - EPS_ANGLE {
            VertexClass::Spherical
        } else if tau > TAU + EPS_ANGLE {
            VertexClass::Hyperbolic
        } else {
            VertexClass::Euclidean
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("mesh has no faces")]
    Empty,
    #[error("non-triangular face {face} with {arity} vertices")]
    NonTriangularFace { face: usize, arity: usize },
    #[error("face {face} references vertex index {index} out of range")]
    VertexIndexOutOfRange { face: usize, index: usize },
    #[error("vertex {0} is not referenced by any face")]
    UnreferencedVertex(usize),
    #[error("non-manifold edge ({0}, {1}) shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("inconsistent orientation across edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),
    #[error("non-manifold vertex {0}")]
    NonManifoldVertex(usize),
    #[error("zero-length edge ({0}, {1})")]
    DegenerateEdge(usize, usize),
    #[error("zero-area face {0}")]
    DegenerateFace(usize),
    #[error("invalid {kind} id {id}")]
    InvalidId { kind: &'static str, id: usize },
    #[error("surface point parameter out of bounds")]
    PointOutOfBounds,
}

/// A point anchored on the mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SurfacePoint {
    Vertex(VertexId),
    /// `u` runs along the canonical half-edge of `edge`.
    Edge { edge: EdgeId, u: f64 },
    /// Barycentric coordinates w.r.t. the face's corners in order.
    Face { face: FaceId, bary: [f64; 3] },
}

#[derive(Clone, Debug)]
pub struct TriangleMesh {
    positions: Vec<Vec3>,
    faces: Vec<[VertexId; 3]>,
    twin: Vec<Option<HalfEdgeId>>,
    he_len: Vec<f64>,
    he_edge: Vec<EdgeId>,
    /// Frame → layout motion per half-edge.
    he_frame: Vec<RigidMotion2>,
    he_apex: Vec<Vec2>,
    corner: Vec<f64>,
    sector_start: Vec<f64>,
    edges: Vec<HalfEdgeId>,
    layout: Vec<[Vec2; 3]>,
    /// 3D origin and in-plane axes of each face layout.
    face_axes: Vec<[Vec3; 3]>,
    total_angle: Vec<f64>,
    class: Vec<VertexClass>,
    boundary_vertex: Vec<bool>,
    fan_offsets: Vec<usize>,
    fan: Vec<HalfEdgeId>,
    mean_edge_len: f64,
}

impl TriangleMesh {
    /// Builds and validates a mesh from vertex positions and CCW triangles.
    pub fn new(positions: Vec<Vec3>, faces: &[[usize; 3]]) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = positions.len();
        let mut referenced = vec![false; nv];
        for (fi, f) in faces.iter().enumerate() {
            for &i in f {
                if i >= nv {
                    return Err(MeshError::VertexIndexOutOfRange { face: fi, index: i });
                }
                referenced[i] = true;
            }
        }
        if let Some(v) = referenced.iter().position(|r| !r) {
            return Err(MeshError::UnreferencedVertex(v));
        }

        let nh = faces.len() * 3;
        let face_ids: Vec<[VertexId; 3]> = faces
            .iter()
            .map(|f| [VertexId(f[0] as u32), VertexId(f[1] as u32), VertexId(f[2] as u32)])
            .collect();

        // directed edge -> half-edge; undirected count for non-manifold detection
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut undirected: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                if a == b {
                    return Err(MeshError::DegenerateEdge(a, b));
                }
                let key = (a.min(b), a.max(b));
                let c = undirected.entry(key).or_insert(0);
                *c += 1;
                if *c > 2 {
                    return Err(MeshError::NonManifoldEdge(key.0, key.1));
                }
                if directed.insert((a, b), 3 * fi + i).is_some() {
                    return Err(MeshError::InconsistentOrientation(a, b));
                }
            }
        }
        let mut twin = vec![None; nh];
        for (&(a, b), &h) in &directed {
            if let Some(&t) = directed.get(&(b, a)) {
                twin[h] = Some(HalfEdgeId(t as u32));
            }
        }

        let mut edges = Vec::new();
        let mut he_edge = vec![EdgeId(0); nh];
        for h in 0..nh {
            let canonical = match twin[h] {
                Some(t) if t.idx() < h => false,
                _ => true,
            };
            if canonical {
                let e = EdgeId(edges.len() as u32);
                edges.push(HalfEdgeId(h as u32));
                he_edge[h] = e;
                if let Some(t) = twin[h] {
                    he_edge[t.idx()] = e;
                }
            }
        }

        // geometry
        let mut bbox_min = [f64::INFINITY; 3];
        let mut bbox_max = [f64::NEG_INFINITY; 3];
        for p in &positions {
            for k in 0..3 {
                bbox_min[k] = bbox_min[k].min(p[k]);
                bbox_max[k] = bbox_max[k].max(p[k]);
            }
        }
        let scale = dist3(bbox_min, bbox_max).max(f64::MIN_POSITIVE);

        let mut he_len = vec![0.0; nh];
        let mut corner = vec![0.0; nh];
        let mut layout = Vec::with_capacity(faces.len());
        let mut face_axes = Vec::with_capacity(faces.len());
        let mut he_frame = vec![RigidMotion2::IDENTITY; nh];
        let mut he_apex = vec![Vec2::ZERO; nh];
        for (fi, f) in faces.iter().enumerate() {
            let p = [positions[f[0]], positions[f[1]], positions[f[2]]];
            for i in 0..3 {
                let a = p[i];
                let b = p[(i + 1) % 3];
                let c = p[(i + 2) % 3];
                let l = dist3(a, b);
                if !(l > f64::EPSILON * scale) {
                    return Err(MeshError::DegenerateEdge(f[i], f[(i + 1) % 3]));
                }
                he_len[3 * fi + i] = l;
                corner[3 * fi + i] = angle3(sub3(b, a), sub3(c, a));
            }
            let e0 = sub3(p[1], p[0]);
            let e2 = sub3(p[2], p[0]);
            let n = cross3(e0, e2);
            let area2 = norm3(n);
            if !(area2 > 1e-14 * he_len[3 * fi] * he_len[3 * fi + 2]) {
                return Err(MeshError::DegenerateFace(fi));
            }
            for i in 0..3 {
                let th = corner[3 * fi + i];
                if !(th > 0.0 && th < PI) {
                    return Err(MeshError::DegenerateFace(fi));
                }
            }
            let ex = scale3(e0, 1.0 / he_len[3 * fi]);
            let ey_raw = cross3(n, ex);
            let ey = scale3(ey_raw, 1.0 / norm3(ey_raw));
            let lay = [
                Vec2::ZERO,
                Vec2::new(he_len[3 * fi], 0.0),
                Vec2::new(dot3(e2, ex), dot3(e2, ey)),
            ];
            for i in 0..3 {
                let o = lay[i];
                let u = (lay[(i + 1) % 3] - o).normalized();
                let frame = RigidMotion2 { rot: u, trans: o };
                he_frame[3 * fi + i] = frame;
                he_apex[3 * fi + i] = frame.inverse().apply(lay[(i + 2) % 3]);
            }
            layout.push(lay);
            face_axes.push([p[0], ex, ey]);
        }

        // per-vertex fans
        let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for h in 0..nh {
            outgoing[face_ids[h / 3][h % 3].idx()].push(h);
        }
        let mut total_angle = vec![0.0; nv];
        let mut class = vec![VertexClass::Euclidean; nv];
        let mut boundary_vertex = vec![false; nv];
        let mut sector_start = vec![0.0; nh];
        let mut fan_offsets = Vec::with_capacity(nv + 1);
        let mut fan = Vec::with_capacity(nh);
        let prev = |h: usize| 3 * (h / 3) + (h + 2) % 3;
        for v in 0..nv {
            let out = &outgoing[v];
            let is_boundary = out.iter().any(|&h| twin[h].is_none() || twin[prev(h)].is_none());
            // interior: start at the smallest outgoing id; boundary: start where the open fan begins
            let start = if is_boundary {
                let starts: Vec<usize> = out.iter().copied().filter(|&h| twin[h].is_none()).collect();
                if starts.len() != 1 {
                    return Err(MeshError::NonManifoldVertex(v));
                }
                starts[0]
            } else {
                *out.iter().min().unwrap()
            };
            fan_offsets.push(fan.len());
            let mut h = start;
            let mut acc = 0.0;
            loop {
                fan.push(HalfEdgeId(h as u32));
                sector_start[h] = acc;
                acc += corner[h];
                match twin[prev(h)] {
                    Some(t) if t.idx() != start => h = t.idx(),
                    _ => break,
                }
                if fan.len() - fan_offsets[v] > out.len() {
                    return Err(MeshError::NonManifoldVertex(v));
                }
            }
            if fan.len() - fan_offsets[v] != out.len() {
                return Err(MeshError::NonManifoldVertex(v));
            }
            total_angle[v] = acc;
            class[v] = VertexClass::from_total_angle(acc);
            boundary_vertex[v] = is_boundary;
        }
        fan_offsets.push(fan.len());

        let mean_edge_len = edges.iter().map(|h| he_len[h.idx()]).sum::<f64>() / edges.len() as f64;

        Ok(TriangleMesh {
            positions,
            faces: face_ids,
            twin,
            he_len,
            he_edge,
            he_frame,
            he_apex,
            corner,
            sector_start,
            edges,
            layout,
            face_axes,
            total_angle,
            class,
            boundary_vertex,
            fan_offsets,
            fan,
            mean_edge_len,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.twin.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn boundary_half_edge_count(&self) -> usize {
        self.twin.iter().filter(|t| t.is_none()).count()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_half_edge_count() == 0
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.mean_edge_len
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn position(&self, v: VertexId) -> Vec3 {
        self.positions[v.idx()]
    }

    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 3] {
        self.faces[f.idx()]
    }

    #[inline]
    pub fn face_of(&self, h: HalfEdgeId) -> FaceId {
        FaceId(h.0 / 3)
    }

    #[inline]
    pub fn next(&self, h: HalfEdgeId) -> HalfEdgeId {
        HalfEdgeId(3 * (h.0 / 3) + (h.0 + 1) % 3)
    }

    #[inline]
    pub fn prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        HalfEdgeId(3 * (h.0 / 3) + (h.0 + 2) % 3)
    }

    #[inline]
    pub fn twin(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        self.twin[h.idx()]
    }

    #[inline]
    pub fn origin(&self, h: HalfEdgeId) -> VertexId {
        self.faces[h.idx() / 3][h.idx() % 3]
    }

    #[inline]
    pub fn dest(&self, h: HalfEdgeId) -> VertexId {
        self.origin(self.next(h))
    }

    /// The corner of `face(h)` opposite `h`.
    #[inline]
    pub fn apex_vertex(&self, h: HalfEdgeId) -> VertexId {
        self.origin(self.prev(h))
    }

    pub fn face_half_edges(&self, f: FaceId) -> [HalfEdgeId; 3] {
        [HalfEdgeId(3 * f.0), HalfEdgeId(3 * f.0 + 1), HalfEdgeId(3 * f.0 + 2)]
    }

    #[inline]
    pub fn he_len(&self, h: HalfEdgeId) -> f64 {
        self.he_len[h.idx()]
    }

    #[inline]
    pub fn edge_of(&self, h: HalfEdgeId) -> EdgeId {
        self.he_edge[h.idx()]
    }

    /// Canonical half-edge of an undirected edge (the twin with the smaller id).
    #[inline]
    pub fn edge_half_edge(&self, e: EdgeId) -> HalfEdgeId {
        self.edges[e.idx()]
    }

    /// Apex position in `h`'s frame; its `y` is positive.
    #[inline]
    pub fn apex(&self, h: HalfEdgeId) -> Vec2 {
        self.he_apex[h.idx()]
    }

    /// Corner angle of `face(h)` at `origin(h)`.
    #[inline]
    pub fn corner_angle(&self, h: HalfEdgeId) -> f64 {
        self.corner[h.idx()]
    }

    /// Cumulative angle at `origin(h)` where the sector of `face(h)` begins.
    #[inline]
    pub fn sector_start(&self, h: HalfEdgeId) -> f64 {
        self.sector_start[h.idx()]
    }

    #[inline]
    pub fn total_angle(&self, v: VertexId) -> f64 {
        self.total_angle[v.idx()]
    }

    #[inline]
    pub fn vertex_class(&self, v: VertexId) -> VertexClass {
        self.class[v.idx()]
    }

    #[inline]
    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.boundary_vertex[v.idx()]
    }

    /// Interior hyperbolic vertex: the only kind a geodesic may pass through.
    #[inline]
    pub fn is_saddle(&self, v: VertexId) -> bool {
        self.class[v.idx()] == VertexClass::Hyperbolic && !self.boundary_vertex[v.idx()]
    }

    /// Total angle and classification of `v`.
    pub fn vertex_angle_data(&self, v: VertexId) -> Result<(f64, VertexClass), MeshError> {
        if v.idx() >= self.vertex_count() {
            return Err(MeshError::InvalidId {
                kind: "vertex",
                id: v.idx(),
            });
        }
        Ok((self.total_angle(v), self.vertex_class(v)))
    }

    /// Outgoing half-edges of `v` in rotational order. For an interior vertex
    /// the first entry is the reference half-edge `e_v`.
    pub fn fan(&self, v: VertexId) -> Option<&[HalfEdgeId]> {
        let s = &self.fan[self.fan_offsets[v.idx()]..self.fan_offsets[v.idx() + 1]];
        if self.is_boundary_vertex(v) {
            None
        } else {
            Some(s)
        }
    }

    /// Outgoing half-edges of `v` (open fan order for boundary vertices).
    pub fn outgoing(&self, v: VertexId) -> &[HalfEdgeId] {
        &self.fan[self.fan_offsets[v.idx()]..self.fan_offsets[v.idx() + 1]]
    }

    pub fn reference_half_edge(&self, v: VertexId) -> Option<HalfEdgeId> {
        self.fan(v).map(|f| f[0])
    }

    /// Half-edge of face `f` whose origin is `v`.
    pub fn corner_half_edge(&self, f: FaceId, v: VertexId) -> Option<HalfEdgeId> {
        let fv = self.faces[f.idx()];
        (0..3).find(|&i| fv[i] == v).map(|i| HalfEdgeId(3 * f.0 + i as u32))
    }

    /// Motion from `h`'s frame to its face layout.
    #[inline]
    pub fn frame_to_layout(&self, h: HalfEdgeId) -> RigidMotion2 {
        self.he_frame[h.idx()]
    }

    #[inline]
    pub fn layout_to_frame(&self, h: HalfEdgeId) -> RigidMotion2 {
        self.he_frame[h.idx()].inverse()
    }

    /// Motion between two frames of the same face.
    pub fn frame_to_frame(&self, from: HalfEdgeId, to: HalfEdgeId) -> RigidMotion2 {
        debug_assert_eq!(from.0 / 3, to.0 / 3);
        self.layout_to_frame(to).after(&self.frame_to_layout(from))
    }

    pub fn face_layout(&self, f: FaceId) -> [Vec2; 3] {
        self.layout[f.idx()]
    }

    /// Face layout point to 3D.
    pub fn layout_to_3d(&self, f: FaceId, p: Vec2) -> Vec3 {
        let [o, ex, ey] = self.face_axes[f.idx()];
        add3(o, add3(scale3(ex, p.x), scale3(ey, p.y)))
    }

    /// Point in `h`'s frame to 3D.
    pub fn frame_to_3d(&self, h: HalfEdgeId, p: Vec2) -> Vec3 {
        self.layout_to_3d(self.face_of(h), self.frame_to_layout(h).apply(p))
    }

    /// 3D point (assumed on the plane of `face(h)`) to `h`'s frame.
    pub fn frame_coords_of_3d(&self, h: HalfEdgeId, p: Vec3) -> Vec2 {
        let [o, ex, ey] = self.face_axes[h.idx() / 3];
        let d = sub3(p, o);
        self.layout_to_frame(h).apply(Vec2::new(dot3(d, ex), dot3(d, ey)))
    }

    /// Point at length parameter `x` along `h`.
    pub fn point_on_half_edge(&self, h: HalfEdgeId, x: f64) -> Vec3 {
        let l = self.he_len(h);
        lerp3(self.position(self.origin(h)), self.position(self.dest(h)), (x / l).clamp(0.0, 1.0))
    }

    pub fn face_centroid(&self, f: FaceId) -> SurfacePoint {
        SurfacePoint::Face {
            face: f,
            bary: [1.0 / 3.0; 3],
        }
    }

    fn check_face(&self, f: FaceId) -> Result<(), MeshError> {
        if f.idx() >= self.face_count() {
            return Err(MeshError::InvalidId {
                kind: "face",
                id: f.idx(),
            });
        }
        Ok(())
    }

    /// Normalizes a raw surface point, snapping to the lowest-dimensional
    /// feature within `EPS_SNAP`.
    pub fn canonicalize(&self, p: SurfacePoint) -> Result<SurfacePoint, MeshError> {
        match p {
            SurfacePoint::Vertex(v) => {
                if v.idx() >= self.vertex_count() {
                    return Err(MeshError::InvalidId {
                        kind: "vertex",
                        id: v.idx(),
                    });
                }
                Ok(p)
            }
            SurfacePoint::Edge { edge, u } => {
                if edge.idx() >= self.edge_count() {
                    return Err(MeshError::InvalidId {
                        kind: "edge",
                        id: edge.idx(),
                    });
                }
                if !(u >= -EPS_SNAP && u <= 1.0 + EPS_SNAP) {
                    return Err(MeshError::PointOutOfBounds);
                }
                let h = self.edge_half_edge(edge);
                if u <= EPS_SNAP {
                    Ok(SurfacePoint::Vertex(self.origin(h)))
                } else if u >= 1.0 - EPS_SNAP {
                    Ok(SurfacePoint::Vertex(self.dest(h)))
                } else {
                    Ok(p)
                }
            }
            SurfacePoint::Face { face, bary } => {
                self.check_face(face)?;
                let sum: f64 = bary.iter().sum();
                if bary.iter().any(|b| !(*b >= -EPS_SNAP)) || !((sum - 1.0).abs() <= EPS_SNAP) {
                    return Err(MeshError::PointOutOfBounds);
                }
                let zero: Vec<usize> = (0..3).filter(|&i| bary[i] <= EPS_SNAP).collect();
                match zero.len() {
                    0 => {
                        let b = [bary[0] / sum, bary[1] / sum, bary[2] / sum];
                        Ok(SurfacePoint::Face { face, bary: b })
                    }
                    1 => {
                        let k = zero[0];
                        let h = HalfEdgeId(3 * face.0 + ((k + 1) % 3) as u32);
                        let b1 = bary[(k + 1) % 3];
                        let b2 = bary[(k + 2) % 3];
                        let along = b2 / (b1 + b2);
                        let e = self.edge_of(h);
                        let u = if self.edge_half_edge(e) == h { along } else { 1.0 - along };
                        self.canonicalize(SurfacePoint::Edge { edge: e, u })
                    }
                    _ => {
                        let k = (0..3).find(|i| !zero.contains(i)).unwrap_or(0);
                        Ok(SurfacePoint::Vertex(self.faces[face.idx()][k]))
                    }
                }
            }
        }
    }

    /// 3D position of a surface point.
    pub fn point_position(&self, p: &SurfacePoint) -> Vec3 {
        match *p {
            SurfacePoint::Vertex(v) => self.position(v),
            SurfacePoint::Edge { edge, u } => {
                let h = self.edge_half_edge(edge);
                lerp3(self.position(self.origin(h)), self.position(self.dest(h)), u)
            }
            SurfacePoint::Face { face, bary } => {
                let fv = self.faces[face.idx()];
                let mut acc = [0.0; 3];
                for i in 0..3 {
                    acc = add3(acc, scale3(self.position(fv[i]), bary[i]));
                }
                acc
            }
        }
    }

    /// Coordinates of `p` in `h`'s frame, if `p` lies on the closed face of `h`.
    pub fn point_in_frame(&self, h: HalfEdgeId, p: &SurfacePoint) -> Option<Vec2> {
        let f = self.face_of(h);
        let lay = self.layout[f.idx()];
        let to_frame = self.layout_to_frame(h);
        match *p {
            SurfacePoint::Vertex(v) => {
                let i = (0..3).find(|&i| self.faces[f.idx()][i] == v)?;
                Some(to_frame.apply(lay[i]))
            }
            SurfacePoint::Edge { edge, u } => {
                let he = self.face_half_edges(f).into_iter().find(|&g| self.edge_of(g) == edge)?;
                let along = if self.edge_half_edge(edge) == he { u } else { 1.0 - u };
                let i = (he.0 % 3) as usize;
                Some(to_frame.apply(lay[i].lerp(lay[(i + 1) % 3], along)))
            }
            SurfacePoint::Face { face, bary } => {
                if face != f {
                    return None;
                }
                let q = lay[0] * bary[0] + lay[1] * bary[1] + lay[2] * bary[2];
                Some(to_frame.apply(q))
            }
        }
    }

    /// Faces whose closure contains `p`.
    pub fn faces_containing(&self, p: &SurfacePoint) -> Vec<FaceId> {
        match *p {
            SurfacePoint::Vertex(v) => self.outgoing(v).iter().map(|&h| self.face_of(h)).collect(),
            SurfacePoint::Edge { edge, .. } => {
                let h = self.edge_half_edge(edge);
                let mut out = vec![self.face_of(h)];
                if let Some(t) = self.twin(h) {
                    out.push(self.face_of(t));
                }
                out
            }
            SurfacePoint::Face { face, .. } => vec![face],
        }
    }
}

/// Discrete Gauss–Bonnet residual `Σ(2π − τ) − 2πχ` for a closed mesh.
pub fn gauss_bonnet_residual(mesh: &TriangleMesh) -> f64 {
    let defect: f64 = (0..mesh.vertex_count())
        .map(|v| TAU - mesh.total_angle(VertexId(v as u32)))
        .sum();
    defect - TAU * mesh.euler_characteristic() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tetrahedron_counts() {
        let m = fixtures::tetrahedron();
        assert_eq!(m.vertex_count(), 4);
        assert_eq!(m.edge_count(), 6);
        assert_eq!(m.face_count(), 4);
        assert_eq!(m.half_edge_count(), 12);
        assert_eq!(m.boundary_half_edge_count(), 0);
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn flat_square_counts() {
        let m = fixtures::flat_square();
        assert_eq!(m.boundary_half_edge_count(), 4);
        assert_eq!(m.edge_count(), 5);
        let interior = (0..m.edge_count())
            .filter(|&e| m.twin(m.edge_half_edge(EdgeId(e as u32))).is_some())
            .count();
        assert_eq!(interior, 1);
    }

    #[test]
    fn half_edge_invariants() {
        for m in [fixtures::tetrahedron(), fixtures::cube(), fixtures::torus(6, 5, 2.0, 0.7)] {
            for h in 0..m.half_edge_count() {
                let h = HalfEdgeId(h as u32);
                assert_eq!(m.next(m.next(m.next(h))), h);
                if let Some(t) = m.twin(h) {
                    assert_eq!(m.twin(t), Some(h));
                    assert_eq!(m.origin(t), m.dest(h));
                    assert_eq!(m.dest(t), m.origin(h));
                    assert_eq!(m.he_len(t), m.he_len(h));
                }
                assert!(m.corner_angle(h) > 0.0 && m.corner_angle(h) < PI);
                assert!(m.apex(h).y > 0.0);
            }
        }
    }

    #[test]
    fn tetrahedron_vertex_is_spherical() {
        let m = fixtures::tetrahedron();
        let (tau, class) = m.vertex_angle_data(VertexId(0)).unwrap();
        assert!((tau - PI).abs() < 1e-12);
        assert_eq!(class, VertexClass::Spherical);
    }

    #[test]
    fn flat_sheet_interior_vertex_is_euclidean() {
        let m = fixtures::flat_grid(3, 3);
        // centre vertex of a 3x3 grid of quads: (1,1) has index 1*4+1
        let (tau, class) = m.vertex_angle_data(VertexId(5)).unwrap();
        assert!((tau - TAU).abs() < 1e-12);
        assert_eq!(class, VertexClass::Euclidean);
        assert!(!m.is_boundary_vertex(VertexId(5)));
        assert!(m.is_boundary_vertex(VertexId(0)));
    }

    #[test]
    fn dented_apex_is_hyperbolic() {
        let m = fixtures::dented_octahedron();
        let (tau, class) = m.vertex_angle_data(fixtures::DENTED_APEX).unwrap();
        // four corners of ~99.5 degrees
        assert!(tau > TAU, "tau = {tau}");
        assert_eq!(class, VertexClass::Hyperbolic);
        assert!(m.is_saddle(fixtures::DENTED_APEX));
    }

    #[test]
    fn gauss_bonnet_on_closed_fixtures() {
        for m in [
            fixtures::tetrahedron(),
            fixtures::cube(),
            fixtures::dented_octahedron(),
            fixtures::torus(8, 6, 3.0, 1.0),
        ] {
            let r = gauss_bonnet_residual(&m);
            let scale = TAU * (m.euler_characteristic().abs().max(1)) as f64;
            assert!(r.abs() <= 1e-6 * scale, "residual {r}");
        }
    }

    #[test]
    fn rejects_bad_meshes() {
        let p = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.5, 0.5, 1.0]];
        assert_eq!(
            TriangleMesh::new(p.clone(), &[[0, 1, 7]]).err(),
            Some(MeshError::VertexIndexOutOfRange { face: 0, index: 7 })
        );
        assert_eq!(
            TriangleMesh::new(p[..3].to_vec(), &[[0, 1, 2], [0, 1, 2]]).err(),
            Some(MeshError::InconsistentOrientation(0, 1))
        );
        assert_eq!(
            TriangleMesh::new(p.clone(), &[[0, 1, 2], [1, 0, 3], [0, 1, 4]]).err(),
            Some(MeshError::NonManifoldEdge(0, 1))
        );
        let collinear = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        assert_eq!(TriangleMesh::new(collinear, &[[0, 1, 2]]).err(), Some(MeshError::DegenerateFace(0)));
        let dup = vec![[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [2.0, 1.0, 0.0]];
        assert_eq!(TriangleMesh::new(dup, &[[0, 1, 2]]).err(), Some(MeshError::DegenerateEdge(0, 1)));
        assert_eq!(
            TriangleMesh::new(p[..4].to_vec(), &[[0, 1, 2]]).err(),
            Some(MeshError::UnreferencedVertex(3))
        );
    }

    #[test]
    fn canonicalize_examples() {
        let m = fixtures::tetrahedron();
        let f = FaceId(0);
        let on_edge = m
            .canonicalize(SurfacePoint::Face {
                face: f,
                bary: [0.0, 0.3, 0.7],
            })
            .unwrap();
        let SurfacePoint::Edge { edge, u } = on_edge else {
            panic!("expected edge point, got {on_edge:?}")
        };
        // the edge opposite corner 0 runs corner 1 -> corner 2
        let h = HalfEdgeId(1);
        assert_eq!(m.edge_of(h), edge);
        let along = if m.edge_half_edge(edge) == h { u } else { 1.0 - u };
        assert!((along - 0.7).abs() < 1e-12);
        let pos = m.point_position(&on_edge);
        let want = m.point_position(&SurfacePoint::Face {
            face: f,
            bary: [0.0, 0.3, 0.7],
        });
        assert!(dist3(pos, want) < 1e-12);

        let e = EdgeId(0);
        let h = m.edge_half_edge(e);
        assert_eq!(m.canonicalize(SurfacePoint::Edge { edge: e, u: 1.0 }), Ok(SurfacePoint::Vertex(m.dest(h))));
        let c = SurfacePoint::Face {
            face: f,
            bary: [1.0 / 3.0; 3],
        };
        assert_eq!(m.canonicalize(c), Ok(c));
        assert_eq!(
            m.canonicalize(SurfacePoint::Edge { edge: e, u: 1.5 }),
            Err(MeshError::PointOutOfBounds)
        );
    }

    #[test]
    fn classification_stable_under_rotation() {
        let m = fixtures::dented_octahedron();
        let (s, c) = (0.37f64.sin(), 0.37f64.cos());
        let (s2, c2) = (1.1f64.sin(), 1.1f64.cos());
        let rotated: Vec<Vec3> = m
            .positions()
            .iter()
            .map(|p| {
                let q = [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]];
                [q[0], c2 * q[1] - s2 * q[2], s2 * q[1] + c2 * q[2]]
            })
            .collect();
        let faces: Vec<[usize; 3]> = m.faces().iter().map(|f| [f[0].idx(), f[1].idx(), f[2].idx()]).collect();
        let r = TriangleMesh::new(rotated, &faces).unwrap();
        for v in 0..m.vertex_count() {
            let v = VertexId(v as u32);
            assert!((m.total_angle(v) - r.total_angle(v)).abs() < 1e-9);
            assert_eq!(m.vertex_class(v), r.vertex_class(v));
        }
    }

    #[test]
    fn frames_agree_with_3d() {
        let m = fixtures::torus(7, 5, 2.5, 1.0);
        for h in 0..m.half_edge_count() {
            let h = HalfEdgeId(h as u32);
            let a = m.frame_to_3d(h, Vec2::ZERO);
            let b = m.frame_to_3d(h, Vec2::new(m.he_len(h), 0.0));
            let c = m.frame_to_3d(h, m.apex(h));
            assert!(dist3(a, m.position(m.origin(h))) < 1e-12);
            assert!(dist3(b, m.position(m.dest(h))) < 1e-12);
            assert!(dist3(c, m.position(m.apex_vertex(h))) < 1e-12);
        }
    }
}
