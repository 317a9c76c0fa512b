//! Enumeration queries and single-pair geodesic graphs over a finished tree.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::geom2d::{direction_angle_in_frame, line_axis_crossing, Vec2};
use crate::math::{dist3, wrap, TAU};
use crate::mesh::{FaceId, MeshError, SurfacePoint, TriangleMesh, VertexId};
use crate::path::{dedup_sorted, GeodesicPath, PathPoint, PointLoc};
use crate::propagation::{incoming_angle, GeodesicIntervalTree, IntervalId, Mode};
use crate::{EPS_ANGLE, EPS_PATH};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum QueryError {
    #[error("{0}")]
    WrongMode(&'static str),
    #[error("invalid target: {0}")]
    Target(#[from] MeshError),
    #[error("recursion depth cap {0} exceeded")]
    DepthCap(usize),
    #[error("path count cap {0} exceeded")]
    PathCap(usize),
    #[error("backtracking failed at interval {0:?}")]
    Numerical(IntervalId),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryConfig {
    pub depth_cap: usize,
    pub path_cap: usize,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig {
            depth_cap: 10_000,
            path_cap: 1_000_000,
        }
    }
}

/// An interval answering a target, with the target in the interval's frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub interval: IntervalId,
    pub point: Vec2,
}

fn same_point(mesh: &TriangleMesh, a: &SurfacePoint, b: &SurfacePoint) -> bool {
    dist3(mesh.point_position(a), mesh.point_position(b)) <= 1e-12 * mesh.mean_edge_length()
}

fn endpoint(mesh: &TriangleMesh, p: &SurfacePoint) -> PathPoint {
    let loc = match *p {
        SurfacePoint::Vertex(v) => PointLoc::Vertex(v),
        SurfacePoint::Edge { edge, u } => PointLoc::Edge { edge, u },
        SurfacePoint::Face { face, .. } => PointLoc::Face(face),
    };
    PathPoint {
        pos: mesh.point_position(p),
        loc,
    }
}

/// Intervals whose geodesics reach `t` with length below the radius.
pub fn get_intervals(mesh: &TriangleMesh, tree: &GeodesicIntervalTree, t: &SurfacePoint) -> Vec<Hit> {
    let r = tree.radius;
    let mut out = Vec::new();
    let inside = |x: f64, lo: f64, hi: f64, l: f64| x >= lo - 1e-10 * l && x <= hi + 1e-10 * l;
    match *t {
        SurfacePoint::Vertex(v) => {
            for a in tree.arrivals_at(v) {
                out.push(Hit {
                    interval: a.interval,
                    point: Vec2::ZERO,
                });
            }
        }
        SurfacePoint::Edge { edge, u } => {
            let h0 = mesh.edge_half_edge(edge);
            for h in [Some(h0), mesh.twin(h0)].into_iter().flatten() {
                let l = mesh.he_len(h);
                let x = if h == h0 { u * l } else { (1.0 - u) * l };
                let p = Vec2::new(x, 0.0);
                for &id in tree.on_half_edge(h) {
                    let iv = tree.interval(id);
                    if inside(x, iv.lo, iv.hi, l) && iv.distance(p) < r {
                        out.push(Hit { interval: id, point: p });
                    }
                }
            }
        }
        SurfacePoint::Face { face, .. } => {
            for h in mesh.face_half_edges(face) {
                let l = mesh.he_len(h);
                let Some(p) = mesh.point_in_frame(h, t) else { continue };
                for &id in tree.on_half_edge(h) {
                    let iv = tree.interval(id);
                    let Some(x) = iv.project(p) else { continue };
                    if inside(x, iv.lo, iv.hi, l) && iv.distance(p) < r {
                        out.push(Hit { interval: id, point: p });
                    }
                }
            }
        }
    }
    out
}

/// Backward walk from `(id, p)`: points from `p` towards the source, the
/// face of each segment, and where the walk stopped.
struct Trace {
    points: Vec<PathPoint>,
    faces: Vec<FaceId>,
    /// Interval at which the walk stopped and `p` in its frame.
    root: IntervalId,
    root_point: Vec2,
    is_source: bool,
}

fn trace(
    mesh: &TriangleMesh,
    tree: &GeodesicIntervalTree,
    id: IntervalId,
    p: Vec2,
    p_point: PathPoint,
    primitive: bool,
) -> Result<Trace, QueryError> {
    let mut points = vec![p_point];
    let mut faces = Vec::new();
    let mut cur = id;
    let mut p = p;
    loop {
        let iv = *tree.interval(cur);
        faces.push(iv.face());
        match iv.parent {
            None => {
                points.push(endpoint(mesh, &tree.source));
                return Ok(Trace {
                    points,
                    faces,
                    root: cur,
                    root_point: p,
                    is_source: true,
                });
            }
            Some(parent) if iv.pseudo_source_root => {
                let v = mesh.apex_vertex(iv.edge);
                points.push(PathPoint {
                    pos: mesh.position(v),
                    loc: PointLoc::Vertex(v),
                });
                if primitive {
                    return Ok(Trace {
                        points,
                        faces,
                        root: cur,
                        root_point: p,
                        is_source: false,
                    });
                }
                cur = parent;
                p = Vec2::ZERO;
            }
            Some(parent) => {
                let pv = tree.interval(parent);
                let pe = pv.edge;
                let t = mesh.twin(pe).ok_or(QueryError::Numerical(cur))?;
                let to_t = mesh.frame_to_frame(iv.edge, t);
                let q = to_t.apply(p);
                let c = to_t.apply(iv.center);
                if !(q.y > c.y) {
                    return Err(QueryError::Numerical(cur));
                }
                let l = mesh.he_len(pe);
                let x = (l - line_axis_crossing(c, q)).clamp(pv.lo, pv.hi);
                let edge = mesh.edge_of(pe);
                let u = if mesh.edge_half_edge(edge) == pe { x / l } else { 1.0 - x / l };
                points.push(PathPoint {
                    pos: mesh.point_on_half_edge(pe, x),
                    loc: PointLoc::Edge { edge, u },
                });
                cur = parent;
                p = Vec2::new(x, 0.0);
            }
        }
    }
}

fn reversed_path(points: Vec<PathPoint>, faces: Vec<FaceId>) -> GeodesicPath {
    let mut points = points;
    let mut faces = faces;
    points.reverse();
    faces.reverse();
    GeodesicPath::new(points, faces)
}

/// Full geodesic from the source to `p` (in the frame of interval `id`).
pub fn construct_geodesic(
    mesh: &TriangleMesh,
    tree: &GeodesicIntervalTree,
    id: IntervalId,
    p: Vec2,
    p_point: PathPoint,
) -> Result<GeodesicPath, QueryError> {
    let tr = trace(mesh, tree, id, p, p_point, false)?;
    Ok(reversed_path(tr.points, tr.faces))
}

/// Every geodesic from the source to `t` shorter than the radius, using the
/// parent chains of a complete tree.
pub fn enum_complete(
    mesh: &TriangleMesh,
    tree: &GeodesicIntervalTree,
    t: SurfacePoint,
) -> Result<Vec<GeodesicPath>, QueryError> {
    if tree.mode != Mode::Complete {
        return Err(QueryError::WrongMode("enumeration by parent chains requires a complete tree"));
    }
    let t = mesh.canonicalize(t)?;
    if same_point(mesh, &t, &tree.source) {
        return Ok(Vec::new());
    }
    let tp = endpoint(mesh, &t);
    let mut out = Vec::new();
    for hit in get_intervals(mesh, tree, &t) {
        let g = construct_geodesic(mesh, tree, hit.interval, hit.point, tp)?;
        if let Some(g) = g.snapped(mesh).filter(|g| g.length < tree.radius) {
            out.push(g);
        }
    }
    Ok(dedup_sorted(out, EPS_PATH))
}

/// Node of a single-pair geodesic graph. Source and target are distinct from
/// every mesh vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GraphNode {
    Source,
    Target,
    Vertex(VertexId),
}

/// A geodesic passing no hyperbolic vertex in its interior.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrimitiveGeodesic {
    pub from: GraphNode,
    pub to: GraphNode,
    pub points: Vec<PathPoint>,
    pub faces: Vec<FaceId>,
    pub length: f64,
    /// Outgoing angle at `from` when it is a vertex.
    pub out_angle: Option<f64>,
    /// Incoming angle at `to` when it is a vertex.
    pub in_angle: Option<f64>,
}

/// Primitive geodesic ending at `p` in the frame of interval `id`, and
/// whether it starts at the source.
pub fn construct_primitive_geodesic(
    mesh: &TriangleMesh,
    tree: &GeodesicIntervalTree,
    id: IntervalId,
    p: Vec2,
    p_point: PathPoint,
    to: GraphNode,
) -> Result<(PrimitiveGeodesic, bool), QueryError> {
    let tr = trace(mesh, tree, id, p, p_point, true)?;
    let (from, out_angle) = if tr.is_source {
        (GraphNode::Source, None)
    } else {
        let root = tree.interval(tr.root);
        let v = mesh.apex_vertex(root.edge);
        let hk = mesh.prev(root.edge);
        let dir = mesh.frame_to_frame(root.edge, hk).apply(tr.root_point);
        let alpha = direction_angle_in_frame(mesh, hk, dir).map_err(|_| QueryError::Numerical(tr.root))?;
        (GraphNode::Vertex(v), Some(alpha))
    };
    let in_angle = match to {
        GraphNode::Vertex(_) => incoming_angle(mesh, tree.interval(id)),
        _ => None,
    };
    let is_source = tr.is_source;
    let g = reversed_path(tr.points, tr.faces);
    Ok((
        PrimitiveGeodesic {
            from,
            to,
            points: g.points,
            faces: g.faces,
            length: g.length,
            out_angle,
            in_angle,
        },
        is_source,
    ))
}

/// Whether a geodesic arriving with incoming angle `beta` may leave with
/// outgoing angle `alpha`: both side angles at least π.
pub fn connectable(beta: f64, alpha: f64, tau: f64) -> bool {
    let off = wrap(beta - (alpha + PI), tau);
    off <= tau - TAU + EPS_ANGLE || off >= tau - EPS_ANGLE
}

struct ReducedSearch<'a> {
    mesh: &'a TriangleMesh,
    tree: &'a GeodesicIntervalTree,
    config: QueryConfig,
    out: Vec<GeodesicPath>,
}

impl ReducedSearch<'_> {
    /// `suffix` runs forward from the current junction point to `t`.
    fn rec(
        &mut self,
        suffix: &[PathPoint],
        suffix_faces: &[FaceId],
        id: IntervalId,
        p: Vec2,
        d: f64,
        level: usize,
    ) -> Result<(), QueryError> {
        if level > self.config.depth_cap {
            return Err(QueryError::DepthCap(self.config.depth_cap));
        }
        let (mesh, tree) = (self.mesh, self.tree);
        let (prim, is_source) = construct_primitive_geodesic(mesh, tree, id, p, suffix[0], GraphNode::Target)?;
        let mut points = prim.points;
        points.extend_from_slice(&suffix[1..]);
        let mut faces = prim.faces;
        faces.extend_from_slice(suffix_faces);
        if is_source {
            let g = GeodesicPath::new(points, faces).snapped(mesh);
            if let Some(g) = g.filter(|g| g.length < tree.radius) {
                if self.out.len() >= self.config.path_cap {
                    return Err(QueryError::PathCap(self.config.path_cap));
                }
                self.out.push(g);
            }
            return Ok(());
        }
        let GraphNode::Vertex(v) = prim.from else { unreachable!() };
        let alpha = prim.out_angle.expect("vertex start has an angle");
        let tau = mesh.total_angle(v);
        for a in tree.arrivals_in_arc(v, alpha + PI, tau - TAU, tau) {
            let j = tree.interval(a.interval);
            let l = j.center.norm();
            if d + l + j.depth < tree.radius {
                self.rec(&points, &faces, a.interval, Vec2::ZERO, d + l, level + 1)?;
            }
        }
        Ok(())
    }
}

/// Every geodesic from the source to `t` shorter than the radius, using a
/// reduced tree and a depth-first search over vertex arrivals.
pub fn enum_reduced(
    mesh: &TriangleMesh,
    tree: &GeodesicIntervalTree,
    t: SurfacePoint,
) -> Result<Vec<GeodesicPath>, QueryError> {
    enum_reduced_with(mesh, tree, t, QueryConfig::default())
}

pub fn enum_reduced_with(
    mesh: &TriangleMesh,
    tree: &GeodesicIntervalTree,
    t: SurfacePoint,
    config: QueryConfig,
) -> Result<Vec<GeodesicPath>, QueryError> {
    if tree.mode != Mode::Reduced {
        return Err(QueryError::WrongMode("this enumeration requires a reduced tree"));
    }
    let t = mesh.canonicalize(t)?;
    if same_point(mesh, &t, &tree.source) {
        return Ok(Vec::new());
    }
    let tp = endpoint(mesh, &t);
    let mut search = ReducedSearch {
        mesh,
        tree,
        config,
        out: Vec::new(),
    };
    for hit in get_intervals(mesh, tree, &t) {
        let iv = tree.interval(hit.interval);
        let d = hit.point.dist(iv.center);
        search.rec(&[tp], &[], hit.interval, hit.point, d, 0)?;
    }
    Ok(dedup_sorted(search.out, EPS_PATH))
}

/// Directed multigraph of primitive geodesics between `s`, `t` and the
/// hyperbolic vertices the enumerated geodesics pass.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeodesicGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<PrimitiveGeodesic>,
}

#[derive(Clone, Copy, Debug)]
struct GraphItem {
    d: f64,
    seq: u64,
    interval: IntervalId,
    point: Vec2,
    is_target: bool,
}

impl PartialEq for GraphItem {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for GraphItem {}

impl PartialOrd for GraphItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for GraphItem {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.total_cmp(&self.d).then(o.seq.cmp(&self.seq))
    }
}

/// Backward Dijkstra from `t` over primitive geodesics of a reduced tree.
pub fn build_geodesic_graph(
    mesh: &TriangleMesh,
    tree: &GeodesicIntervalTree,
    t: SurfacePoint,
) -> Result<GeodesicGraph, QueryError> {
    if tree.mode != Mode::Reduced {
        return Err(QueryError::WrongMode("graph requires reduced mode"));
    }
    let t = mesh.canonicalize(t)?;
    let mut g = GeodesicGraph {
        nodes: vec![GraphNode::Source, GraphNode::Target],
        edges: Vec::new(),
    };
    if same_point(mesh, &t, &tree.source) {
        return Ok(g);
    }
    let tp = endpoint(mesh, &t);
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for hit in get_intervals(mesh, tree, &t) {
        let iv = tree.interval(hit.interval);
        heap.push(GraphItem {
            d: hit.point.dist(iv.center),
            seq,
            interval: hit.interval,
            point: hit.point,
            is_target: true,
        });
        seq += 1;
    }
    let mut visited = vec![false; tree.len()];
    let mut vertices = BTreeSet::new();
    while let Some(item) = heap.pop() {
        let (p_point, to) = if item.is_target {
            (tp, GraphNode::Target)
        } else {
            if visited[item.interval.idx()] {
                continue;
            }
            visited[item.interval.idx()] = true;
            let v = mesh.origin(tree.interval(item.interval).edge);
            (
                PathPoint {
                    pos: mesh.position(v),
                    loc: PointLoc::Vertex(v),
                },
                GraphNode::Vertex(v),
            )
        };
        let (prim, is_source) = construct_primitive_geodesic(mesh, tree, item.interval, item.point, p_point, to)?;
        let from = prim.from;
        let alpha = prim.out_angle;
        for n in [from, to] {
            if let GraphNode::Vertex(v) = n {
                vertices.insert(v);
            }
        }
        g.edges.push(prim);
        if is_source {
            continue;
        }
        let (GraphNode::Vertex(v), Some(alpha)) = (from, alpha) else {
            continue;
        };
        let tau = mesh.total_angle(v);
        for a in tree.arrivals_in_arc(v, alpha + PI, tau - TAU, tau) {
            let j = tree.interval(a.interval);
            let l = j.center.norm();
            if !visited[a.interval.idx()] && item.d + l + j.depth < tree.radius {
                heap.push(GraphItem {
                    d: item.d + l,
                    seq,
                    interval: a.interval,
                    point: Vec2::ZERO,
                    is_target: false,
                });
                seq += 1;
            }
        }
    }
    g.nodes.extend(vertices.into_iter().map(GraphNode::Vertex));
    Ok(g)
}

/// All source-to-target paths of `g` with connectable junctions and length below `radius`.
pub fn paths_of_graph(
    mesh: &TriangleMesh,
    g: &GeodesicGraph,
    radius: f64,
    path_cap: usize,
) -> Result<Vec<GeodesicPath>, QueryError> {
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        mesh: &TriangleMesh,
        g: &GeodesicGraph,
        radius: f64,
        cap: usize,
        stack: &mut Vec<usize>,
        len: f64,
        out: &mut Vec<GeodesicPath>,
    ) -> Result<(), QueryError> {
        let last = stack.last().map(|&i| &g.edges[i]);
        let at = last.map(|e| e.to).unwrap_or(GraphNode::Source);
        if at == GraphNode::Target {
            let mut points: Vec<PathPoint> = Vec::new();
            let mut faces = Vec::new();
            for &i in stack.iter() {
                let e = &g.edges[i];
                let skip = if points.is_empty() { 0 } else { 1 };
                points.extend_from_slice(&e.points[skip..]);
                faces.extend_from_slice(&e.faces);
            }
            if out.len() >= cap {
                return Err(QueryError::PathCap(cap));
            }
            if let Some(g) = GeodesicPath::new(points, faces).snapped(mesh) {
                out.push(g);
            }
            return Ok(());
        }
        for (i, e) in g.edges.iter().enumerate() {
            if e.from != at || !(len + e.length < radius) {
                continue;
            }
            if let (GraphNode::Vertex(v), Some(last)) = (at, last) {
                let (Some(beta), Some(alpha)) = (last.in_angle, e.out_angle) else {
                    continue;
                };
                if !connectable(beta, alpha, mesh.total_angle(v)) {
                    continue;
                }
            }
            stack.push(i);
            dfs(mesh, g, radius, cap, stack, len + e.length, out)?;
            stack.pop();
        }
        Ok(())
    }
    dfs(mesh, g, radius, path_cap, &mut stack, 0.0, &mut out)?;
    out.retain(|p| p.length < radius);
    Ok(dedup_sorted(out, EPS_PATH))
}
