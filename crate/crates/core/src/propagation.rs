//! Geodesic interval tree construction by event-driven interval propagation.
//!
//! An [`Interval`] lives on a half-edge `h` and describes a family of
//! straight rays leaving its `center` (the source, unfolded into `h`'s frame)
//! that cross `face(h)` and hit `h` within `[lo, hi]`. The center is on the
//! face side of `h` (`center.y > 0`), so the rays travel through `face(h)`
//! before reaching the edge.
//!
//! Events are processed in `(time, seq)` order. An edge event projects an
//! interval across its half-edge into the neighbouring face; a vertex event
//! records a geodesic arriving at a vertex and, at interior hyperbolic
//! vertices, spawns pseudo-source intervals around it.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
use core::mem::size_of;

use crate::geom2d::{
    circular_window_query, direction_angle_in_frame, forward_gap, line_axis_crossing, CircularAngles, Side, Vec2,
};
use crate::math::{cos, sin, wrap, TAU};
use crate::mesh::{FaceId, HalfEdgeId, MeshError, SurfacePoint, TriangleMesh, VertexId};
use crate::path::{GeodesicPath, PathPoint, PointLoc};
use crate::{EPS_ANGLE, EPS_PATH};

/// Index into the interval arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct IntervalId(pub u32);

impl IntervalId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub parent: Option<IntervalId>,
    pub edge: HalfEdgeId,
    pub lo: f64,
    pub hi: f64,
    /// Unfolded source in `edge`'s frame.
    pub center: Vec2,
    /// Length of the geodesic from `s` to the center.
    pub depth: f64,
    /// Created at initialization or at a vertex event.
    pub pseudo_source_root: bool,
}

impl Interval {
    #[inline]
    pub fn face(&self) -> FaceId {
        FaceId(self.edge.0 / 3)
    }

    /// `|p − center| + depth` for `p` in this interval's frame.
    #[inline]
    pub fn distance(&self, p: Vec2) -> f64 {
        p.dist(self.center) + self.depth
    }

    /// First time the wavefront reaches the extent.
    pub fn edge_event_time(&self) -> f64 {
        let c = self.center;
        let dx = if c.x < self.lo {
            self.lo - c.x
        } else if c.x > self.hi {
            c.x - self.hi
        } else {
            0.0
        };
        Vec2::new(dx, c.y).norm() + self.depth
    }

    /// Time the wavefront reaches the origin of `edge`.
    #[inline]
    pub fn vertex_event_time(&self) -> f64 {
        self.center.norm() + self.depth
    }

    /// Edge parameter hit by the ray from the center through `p` (a point of
    /// `face()` in this frame), if that ray reaches the edge after `p`.
    pub fn project(&self, p: Vec2) -> Option<f64> {
        let c = self.center;
        if p.y.abs() <= 1e-14 * (1.0 + p.x.abs()) {
            Some(p.x)
        } else if c.y > p.y {
            Some(line_axis_crossing(c, p))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Mode {
    Complete,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildConfig {
    pub mode: Mode,
    /// Hard cap on processed events.
    pub event_cap: u64,
}

impl BuildConfig {
    pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

    pub fn new(mode: Mode) -> Self {
        BuildConfig {
            mode,
            event_cap: Self::DEFAULT_EVENT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("invalid source: {0}")]
    Source(#[from] MeshError),
    #[error("event cap of {events} reached at radius {reached_radius}")]
    EventCap { events: u64, reached_radius: f64 },
}

/// A geodesic recorded as arriving at a vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Arrival {
    /// Interval whose extent starts at the vertex.
    pub interval: IntervalId,
    pub time: f64,
    /// Incoming angle; only for interior hyperbolic vertices.
    pub angle: Option<f64>,
}

/// Outgoing angle range `[start, start + width]` generated at a vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OutgoingRange {
    pub start: f64,
    pub width: f64,
    pub arrival_time: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BuildStats {
    pub intervals: u64,
    pub edge_events: u64,
    pub vertex_events: u64,
    pub hyperbolic_vertex_events: u64,
    /// Hyperbolic vertex events that generated at least one interval.
    pub propagating_vertex_events: u64,
    pub max_queue: u64,
    pub reached_radius: f64,
    pub arena_bytes: u64,
}

impl BuildStats {
    /// Propagating / hyperbolic vertex events, if any hyperbolic event fired.
    pub fn propagating_ratio(&self) -> Option<f64> {
        (self.hyperbolic_vertex_events > 0)
            .then(|| self.propagating_vertex_events as f64 / self.hyperbolic_vertex_events as f64)
    }
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeodesicIntervalTree {
    pub mode: Mode,
    pub source: SurfacePoint,
    pub radius: f64,
    pub intervals: Vec<Interval>,
    /// Per vertex, in nondecreasing time.
    pub arrivals: Vec<Vec<Arrival>>,
    /// Per vertex, outgoing ranges that spawned pseudo-source intervals.
    pub ranges: Vec<Vec<OutgoingRange>>,
    pub stats: BuildStats,
    #[cfg_attr(feature = "serde", serde(skip))]
    by_half_edge: Vec<Vec<IntervalId>>,
    /// Per vertex, `(angle, arrival index)` sorted by angle.
    #[cfg_attr(feature = "serde", serde(skip))]
    angle_index: Vec<Vec<(f64, u32)>>,
}

impl GeodesicIntervalTree {
    #[inline]
    pub fn interval(&self, id: IntervalId) -> &Interval {
        &self.intervals[id.idx()]
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Intervals stored on `h`.
    pub fn on_half_edge(&self, h: HalfEdgeId) -> &[IntervalId] {
        self.by_half_edge.get(h.idx()).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn arrivals_at(&self, v: VertexId) -> &[Arrival] {
        &self.arrivals[v.idx()]
    }

    /// Arrivals at `v` whose incoming angle lies in the closed arc
    /// `[a, a + len]` (with `EPS_ANGLE` slack), on a circle of length `tau`.
    pub fn arrivals_in_arc(&self, v: VertexId, a: f64, len: f64, tau: f64) -> Vec<&Arrival> {
        let idx = &self.angle_index[v.idx()];
        let lo = wrap(a - EPS_ANGLE, tau);
        let span = len + 2.0 * EPS_ANGLE;
        let mut out = Vec::new();
        let mut take = |from: f64, to: f64| {
            let i = idx.partition_point(|e| e.0 < from);
            for e in &idx[i..] {
                if e.0 > to {
                    break;
                }
                out.push(&self.arrivals[v.idx()][e.1 as usize]);
            }
        };
        if span >= tau {
            take(f64::NEG_INFINITY, f64::INFINITY);
        } else if lo + span <= tau {
            take(lo, lo + span);
        } else {
            take(lo, f64::INFINITY);
            take(f64::NEG_INFINITY, lo + span - tau);
        }
        out
    }

    /// Rebuilds the lookup tables not carried by serialization.
    pub fn reindex(&mut self, half_edge_count: usize) {
        let mut by = vec![Vec::new(); half_edge_count];
        for (i, iv) in self.intervals.iter().enumerate() {
            by[iv.edge.idx()].push(IntervalId(i as u32));
        }
        self.by_half_edge = by;
        self.angle_index = self
            .arrivals
            .iter()
            .map(|list| {
                let mut v: Vec<(f64, u32)> = list
                    .iter()
                    .enumerate()
                    .filter_map(|(i, a)| a.angle.map(|x| (x, i as u32)))
                    .collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                v
            })
            .collect();
    }

    /// Bytes held by the interval arena and registry tables.
    pub fn arena_bytes(&self) -> u64 {
        let arrivals: usize = self.arrivals.iter().map(|a| a.len()).sum();
        let ranges: usize = self.ranges.iter().map(|a| a.len()).sum();
        (self.intervals.len() * (size_of::<Interval>() + size_of::<IntervalId>())
            + arrivals * (size_of::<Arrival>() + size_of::<(f64, u32)>())
            + ranges * size_of::<OutgoingRange>()) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EventKind {
    Edge,
    Vertex,
}

#[derive(Clone, Copy, Debug)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
    interval: IntervalId,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.seq.cmp(&self.seq))
    }
}

/// Edge parameters on the two far half-edges of the face beyond a shared edge.
///
/// Everything is in the frame of the far face's half-edge `t` on the shared
/// edge: `t` runs from `b = (0, 0)` to `a = (l, 0)`, the apex is `w`, and the
/// far half-edges are `a → w` (length `l1`) and `w → b` (length `l2`).
/// `center` lies below the edge and the cone passes through `[x0, x1]`.
/// Returns the extents on `a → w` and on `w → b`, each as `(lo, hi)`.
pub fn split_cone(
    center: Vec2,
    x0: f64,
    x1: f64,
    l: f64,
    w: Vec2,
    l1: f64,
    l2: f64,
) -> (Option<(f64, f64)>, Option<(f64, f64)>) {
    let a = Vec2::new(l, 0.0);
    let b = Vec2::ZERO;
    let hit = |x: f64, p: Vec2, q: Vec2, len: f64| -> f64 {
        let d = Vec2::new(x, 0.0) - center;
        let s = (center - p).cross(d) / (q - p).cross(d);
        s.clamp(0.0, 1.0) * len
    };
    // a → w
    let on_aw = |x: f64| -> f64 {
        if x == l {
            0.0
        } else {
            hit(x, a, w, l1)
        }
    };
    // w → b
    let on_wb = |x: f64| -> f64 {
        if x == 0.0 {
            l2
        } else {
            hit(x, w, b, l2)
        }
    };
    let xa = line_axis_crossing(center, w);
    // an apex on the cone boundary counts as inside so its vertex event fires
    let tol = 1e-12 * l;
    if xa < x0 - tol {
        (Some((on_aw(x1), on_aw(x0))), None)
    } else if xa > x1 + tol {
        (None, Some((on_wb(x1), on_wb(x0))))
    } else {
        (Some((on_aw(x1), l1)), Some((0.0, on_wb(x0))))
    }
}

/// Half-open wedge `[phi0, phi1]` of sector `h` (angles from `h`'s direction)
/// projected from `origin(h)` onto the opposite half-edge `next(h)`.
pub fn project_wedge(mesh: &TriangleMesh, h: HalfEdgeId, phi0: f64, phi1: f64) -> (f64, f64) {
    let theta = mesh.corner_angle(h);
    let g = mesh.next(h);
    let lg = mesh.he_len(g);
    let p1 = Vec2::new(mesh.he_len(h), 0.0);
    let p2 = mesh.apex(h);
    let at = |phi: f64| -> f64 {
        if phi <= 0.0 {
            0.0
        } else if phi >= theta {
            lg
        } else {
            let d = Vec2::new(cos(phi), sin(phi));
            let s = -d.cross(p1) / d.cross(p2 - p1);
            s.clamp(0.0, 1.0) * lg
        }
    };
    (at(phi0), at(phi1))
}

/// A newly made pseudo-source interval and whether it starts at a link vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoSource {
    pub interval: Interval,
    pub starts_at_vertex: bool,
    /// Zero-width ray kept only for the vertex event at its start.
    pub degenerate: bool,
}

/// Pseudo-source intervals around interior vertex `v` for outgoing angles
/// `[start, start + width]` (angles from `e_v`, counterclockwise). Range ends
/// within `EPS_ANGLE` of a sector boundary snap to it, and a range ending on
/// a boundary yields a degenerate ray towards the link vertex there.
pub fn make_pseudo_source_intervals(
    mesh: &TriangleMesh,
    v: VertexId,
    start: f64,
    width: f64,
    depth: f64,
    parent: Option<IntervalId>,
    min_len: f64,
) -> Vec<PseudoSource> {
    let Some(fan) = mesh.fan(v) else {
        return Vec::new();
    };
    let tau = mesh.total_angle(v);
    let s = wrap(start, tau);
    let end = s + width;
    let mut i = fan
        .iter()
        .rposition(|&h| mesh.sector_start(h) <= s)
        .unwrap_or(0);
    let mut base = 0.0;
    let mut out = Vec::new();
    for _ in 0..=fan.len() + 1 {
        let h = fan[i];
        let theta = mesh.corner_angle(h);
        let sec_lo = base + mesh.sector_start(h);
        let sec_hi = sec_lo + theta;
        let mut phi0 = (s - sec_lo).max(0.0);
        let mut phi1 = (end - sec_lo).min(theta);
        if phi0 < EPS_ANGLE {
            phi0 = 0.0;
        }
        if phi1 > theta - EPS_ANGLE {
            phi1 = theta;
        }
        if phi1 > -EPS_ANGLE {
            phi1 = phi1.max(0.0);
        }
        if phi1 >= phi0 {
            let (lo, hi) = project_wedge(mesh, h, phi0, phi1);
            let wide = hi - lo > min_len;
            let starts_at_vertex = phi0 == 0.0;
            if wide || starts_at_vertex {
                let g = mesh.next(h);
                out.push(PseudoSource {
                    interval: Interval {
                        parent,
                        edge: g,
                        lo,
                        hi: if wide { hi } else { lo },
                        center: mesh.apex(g),
                        depth,
                        pseudo_source_root: true,
                    },
                    starts_at_vertex,
                    degenerate: !wide,
                });
            }
        }
        if end < sec_hi - EPS_ANGLE {
            break;
        }
        i += 1;
        if i == fan.len() {
            i = 0;
            base += tau;
        }
    }
    out
}

/// Incoming angle at `origin(iv.edge)` of the geodesics of `iv` arriving there.
pub fn incoming_angle(mesh: &TriangleMesh, iv: &Interval) -> Option<f64> {
    direction_angle_in_frame(mesh, iv.edge, iv.center).ok()
}

/// Outgoing range for an arrival at angle `alpha` given earlier incoming
/// angles at the same vertex. Returns `(start, width)` or `None` when empty.
pub fn reduced_range<V>(prior: &CircularAngles<V>, alpha: f64) -> Option<(f64, f64)> {
    let tau = prior.tau();
    let delta = tau - TAU;
    // same direction as an earlier arrival: identical continuations
    if !prior.closed_arc(alpha, 0.0).is_empty() {
        return None;
    }
    let m = match circular_window_query(prior, alpha, delta, Side::Below) {
        Some((beta, _)) => delta - forward_gap(beta, alpha, tau),
        None => 0.0,
    };
    let n = match circular_window_query(prior, alpha, delta, Side::Above) {
        Some((gamma, _)) => forward_gap(alpha, gamma, tau),
        None => delta,
    };
    if n - m <= EPS_ANGLE {
        return None;
    }
    Some((wrap(alpha + PI + m, tau), n - m))
}

/// Incremental tree builder; [`build_git`] runs it to completion.
pub struct GitBuilder<'m> {
    mesh: &'m TriangleMesh,
    config: BuildConfig,
    tree: GeodesicIntervalTree,
    queue: BinaryHeap<Event>,
    seq: u64,
    events: u64,
    last_time: f64,
    /// Per saddle, incoming angles mapped to arrival indices.
    incoming: Vec<Option<CircularAngles<u32>>>,
    min_len: f64,
}

impl<'m> GitBuilder<'m> {
    pub fn new(mesh: &'m TriangleMesh, source: SurfacePoint, radius: f64, config: BuildConfig) -> Result<Self, BuildError> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(BuildError::InvalidRadius(radius));
        }
        let source = mesh.canonicalize(source)?;
        let nv = mesh.vertex_count();
        let tree = GeodesicIntervalTree {
            mode: config.mode,
            source,
            radius,
            intervals: Vec::new(),
            arrivals: vec![Vec::new(); nv],
            ranges: vec![Vec::new(); nv],
            stats: BuildStats::default(),
            by_half_edge: vec![Vec::new(); mesh.half_edge_count()],
            angle_index: Vec::new(),
        };
        let incoming = (0..nv)
            .map(|v| {
                let v = VertexId(v as u32);
                mesh.is_saddle(v).then(|| CircularAngles::new(mesh.total_angle(v)))
            })
            .collect();
        let mut b = GitBuilder {
            mesh,
            config,
            tree,
            queue: BinaryHeap::new(),
            seq: 0,
            events: 0,
            last_time: 0.0,
            incoming,
            min_len: 1e-12 * mesh.mean_edge_length(),
        };
        b.initialize();
        Ok(b)
    }

    fn push_interval(&mut self, iv: Interval) -> IntervalId {
        let id = IntervalId(self.tree.intervals.len() as u32);
        self.tree.by_half_edge[iv.edge.idx()].push(id);
        self.tree.intervals.push(iv);
        id
    }

    fn push_event(&mut self, kind: EventKind, id: IntervalId) {
        let iv = &self.tree.intervals[id.idx()];
        let time = match kind {
            EventKind::Edge => iv.edge_event_time(),
            EventKind::Vertex => iv.vertex_event_time(),
        };
        self.queue.push(Event {
            time,
            seq: self.seq,
            kind,
            interval: id,
        });
        self.seq += 1;
        self.tree.stats.max_queue = self.tree.stats.max_queue.max(self.queue.len() as u64);
    }

    /// Initial intervals on every half-edge facing the source.
    fn initialize(&mut self) {
        let m = self.mesh;
        let s = self.tree.source;
        let targets: Vec<HalfEdgeId> = match s {
            SurfacePoint::Face { face, .. } => m.face_half_edges(face).to_vec(),
            SurfacePoint::Edge { edge, .. } => {
                let h = m.edge_half_edge(edge);
                let mut t = vec![m.next(h), m.prev(h)];
                if let Some(tw) = m.twin(h) {
                    t.push(m.next(tw));
                    t.push(m.prev(tw));
                }
                t
            }
            SurfacePoint::Vertex(v) => m.outgoing(v).iter().map(|&h| m.next(h)).collect(),
        };
        for h in targets {
            let Some(center) = m.point_in_frame(h, &s) else {
                continue;
            };
            let id = self.push_interval(Interval {
                parent: None,
                edge: h,
                lo: 0.0,
                hi: m.he_len(h),
                center,
                depth: 0.0,
                pseudo_source_root: true,
            });
            self.push_event(EventKind::Edge, id);
            self.push_event(EventKind::Vertex, id);
        }
    }

    /// Time of the next event, if any remain.
    pub fn next_time(&self) -> Option<f64> {
        self.queue.peek().map(|e| e.time)
    }

    pub fn interval_count(&self) -> usize {
        self.tree.intervals.len()
    }

    pub fn events_processed(&self) -> u64 {
        self.events
    }

    /// Radius up to which the wavefront has been processed.
    pub fn reached_radius(&self) -> f64 {
        match self.next_time() {
            Some(t) => t.min(self.tree.radius),
            None => self.tree.radius,
        }
    }

    /// Processes one event. Returns `Ok(false)` once no event below the radius remains.
    pub fn step(&mut self) -> Result<bool, BuildError> {
        let Some(top) = self.queue.peek() else {
            return Ok(false);
        };
        if !(top.time < self.tree.radius) {
            return Ok(false);
        }
        if self.events >= self.config.event_cap {
            return Err(BuildError::EventCap {
                events: self.events,
                reached_radius: top.time,
            });
        }
        let ev = self.queue.pop().unwrap();
        debug_assert!(ev.time >= self.last_time - 1e-9 * (1.0 + self.last_time));
        self.last_time = ev.time;
        self.events += 1;
        match ev.kind {
            EventKind::Edge => self.handle_edge_event(ev.interval),
            EventKind::Vertex => self.handle_vertex_event(ev.interval, ev.time),
        }
        Ok(true)
    }

    /// Runs until the radius is reached, the queue empties or `limit` more events were processed.
    pub fn run_for(&mut self, limit: u64) -> Result<bool, BuildError> {
        for _ in 0..limit {
            if !self.step()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn run(&mut self) -> Result<(), BuildError> {
        while self.step()? {}
        Ok(())
    }

    /// Finalizes the tree. If stopped early, its radius becomes the reached radius.
    pub fn finish(mut self) -> GeodesicIntervalTree {
        let reached = self.reached_radius();
        self.tree.radius = reached;
        let nh = self.mesh.half_edge_count();
        self.tree.reindex(nh);
        let st = &mut self.tree.stats;
        st.intervals = self.tree.intervals.len() as u64;
        st.reached_radius = reached;
        self.tree.stats.arena_bytes = self.tree.arena_bytes();
        self.tree
    }

    fn handle_edge_event(&mut self, id: IntervalId) {
        self.tree.stats.edge_events += 1;
        let m = self.mesh;
        let iv = self.tree.intervals[id.idx()];
        let Some(t) = m.twin(iv.edge) else {
            return;
        };
        let l = m.he_len(iv.edge);
        let c = Vec2::new(l - iv.center.x, -iv.center.y);
        if !(c.y < 0.0) {
            return;
        }
        let n1 = m.next(t);
        let n2 = m.next(n1);
        let (aw, wb) = split_cone(c, l - iv.hi, l - iv.lo, l, m.apex(t), m.he_len(n1), m.he_len(n2));
        let two = aw.is_some() && wb.is_some();
        for (h, ext) in [(n1, aw), (n2, wb)] {
            let Some((lo, hi)) = ext else { continue };
            let wide = hi - lo > self.min_len;
            // a degenerate child on w → b still carries the vertex event at w
            if !wide && !(two && h == n2) {
                continue;
            }
            let center = m.frame_to_frame(t, h).apply(c);
            let child = self.push_interval(Interval {
                parent: Some(id),
                edge: h,
                lo,
                hi,
                center,
                depth: iv.depth,
                pseudo_source_root: false,
            });
            if wide {
                self.push_event(EventKind::Edge, child);
            }
            if two && h == n2 {
                self.push_event(EventKind::Vertex, child);
            }
        }
    }

    /// True when an earlier arrival at `v` is the same geodesic as interval `id`
    /// (two intervals sharing a boundary ray through `v`).
    fn repeats_arrival(&self, v: VertexId, id: IntervalId, alpha: f64, time: f64) -> bool {
        let m = self.mesh;
        let end = PathPoint {
            pos: m.position(v),
            loc: PointLoc::Vertex(v),
        };
        let tol = EPS_PATH * m.mean_edge_length().max(1.0);
        let Some(prior) = self.incoming[v.idx()].as_ref() else { return false };
        let arrivals = &self.tree.arrivals[v.idx()];
        let mut mine = None;
        for (_, &k) in prior.closed_arc(alpha, 0.0) {
            let a = &arrivals[k as usize];
            if (a.time - time).abs() > 1e-9 * (1.0 + time) {
                continue;
            }
            // reduced queries join at primitive roots, so those must agree too
            if self.config.mode == Mode::Reduced
                && primitive_root(m, &self.tree, id) != primitive_root(m, &self.tree, a.interval)
            {
                continue;
            }
            if mine.is_none() {
                mine = Some(backtrack(m, &self.tree, id, end));
            }
            let Some(Some(g)) = &mine else { return false };
            if let Some(other) = backtrack(m, &self.tree, a.interval, end) {
                if g.matches(&other, tol) {
                    return true;
                }
            }
        }
        false
    }

    fn handle_vertex_event(&mut self, id: IntervalId, time: f64) {
        self.tree.stats.vertex_events += 1;
        let m = self.mesh;
        let iv = self.tree.intervals[id.idx()];
        let v = m.origin(iv.edge);
        let saddle = m.is_saddle(v);
        let angle = if saddle { incoming_angle(m, &iv) } else { None };
        if let Some(alpha) = angle {
            if self.repeats_arrival(v, id, alpha, time) {
                return;
            }
        }
        let index = self.tree.arrivals[v.idx()].len() as u32;
        self.tree.arrivals[v.idx()].push(Arrival {
            interval: id,
            time,
            angle,
        });
        let Some(alpha) = angle else {
            return;
        };
        self.tree.stats.hyperbolic_vertex_events += 1;
        let tau = m.total_angle(v);
        let prior = self.incoming[v.idx()].as_mut().expect("saddle registry");
        let range = match self.config.mode {
            Mode::Complete => Some((wrap(alpha + PI, tau), tau - TAU)),
            Mode::Reduced => reduced_range(prior, alpha),
        };
        prior.insert(alpha, index);
        let Some((start, width)) = range else {
            return;
        };
        let children = make_pseudo_source_intervals(m, v, start, width, time, Some(id), self.min_len);
        if children.is_empty() {
            return;
        }
        self.tree.stats.propagating_vertex_events += 1;
        self.tree.ranges[v.idx()].push(OutgoingRange {
            start,
            width,
            arrival_time: time,
        });
        for ps in children {
            let cid = self.push_interval(ps.interval);
            if !ps.degenerate {
                self.push_event(EventKind::Edge, cid);
            }
            if ps.starts_at_vertex {
                self.push_event(EventKind::Vertex, cid);
            }
        }
    }
}

/// Vertex the primitive geodesic of `id` starts from; `None` for the source.
fn primitive_root(m: &TriangleMesh, tree: &GeodesicIntervalTree, mut id: IntervalId) -> Option<VertexId> {
    loop {
        let iv = &tree.intervals[id.idx()];
        match (iv.pseudo_source_root, iv.parent) {
            (true, Some(_)) => return Some(m.apex_vertex(iv.edge)),
            (_, None) => return None,
            (false, Some(p)) => id = p,
        }
    }
}

fn backtrack(m: &TriangleMesh, tree: &GeodesicIntervalTree, id: IntervalId, end: PathPoint) -> Option<GeodesicPath> {
    crate::query::construct_geodesic(m, tree, id, Vec2::ZERO, end)
        .ok()?
        .snapped(m)
}

/// Builds the tree for `source` up to radius `radius`.
pub fn build_git(
    mesh: &TriangleMesh,
    source: SurfacePoint,
    radius: f64,
    mode: Mode,
) -> Result<GeodesicIntervalTree, BuildError> {
    build_git_with(mesh, source, radius, BuildConfig::new(mode))
}

pub fn build_git_with(
    mesh: &TriangleMesh,
    source: SurfacePoint,
    radius: f64,
    config: BuildConfig,
) -> Result<GeodesicIntervalTree, BuildError> {
    let mut b = GitBuilder::new(mesh, source, radius, config)?;
    b.run()?;
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mesh::EdgeId;
    use proptest::prelude::*;

    fn centroid(f: u32) -> SurfacePoint {
        SurfacePoint::Face {
            face: FaceId(f),
            bary: [1.0 / 3.0; 3],
        }
    }

    #[test]
    fn tetrahedron_initialization_counts() {
        let m = fixtures::tetrahedron();
        let b = GitBuilder::new(&m, centroid(0), 1.0, BuildConfig::new(Mode::Complete)).unwrap();
        assert_eq!(b.interval_count(), 3);
        assert_eq!(b.queue.len(), 6);
        assert_eq!(b.queue.iter().filter(|e| e.kind == EventKind::Vertex).count(), 3);

        let b = GitBuilder::new(&m, SurfacePoint::Vertex(VertexId(0)), 1.0, BuildConfig::new(Mode::Complete)).unwrap();
        assert_eq!(b.interval_count(), 3);
        for iv in &b.tree.intervals {
            assert_ne!(m.origin(iv.edge), VertexId(0));
            assert_ne!(m.dest(iv.edge), VertexId(0));
        }
    }

    #[test]
    fn edge_source_gives_four_intervals() {
        let m = fixtures::dented_octahedron();
        let e = (0..m.edge_count() as u32)
            .map(EdgeId)
            .find(|&e| m.twin(m.edge_half_edge(e)).is_some())
            .unwrap();
        let s = SurfacePoint::Edge { edge: e, u: 0.4 };
        let b = GitBuilder::new(&m, s, 1.0, BuildConfig::new(Mode::Reduced)).unwrap();
        assert_eq!(b.interval_count(), 4);
    }

    #[test]
    fn radius_zero_keeps_initial_intervals() {
        let m = fixtures::tetrahedron();
        let t = build_git(&m, centroid(2), 0.0, Mode::Complete).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.stats.edge_events + t.stats.vertex_events, 0);
    }

    #[test]
    fn flat_square_exhausts_queue() {
        let m = fixtures::flat_square();
        let mut b = GitBuilder::new(&m, centroid(0), 10.0, BuildConfig::new(Mode::Complete)).unwrap();
        b.run().unwrap();
        assert!(b.queue.is_empty());
        let t = b.finish();
        assert!(t.intervals.iter().all(|iv| iv.depth == 0.0));
        assert_eq!(t.stats.hyperbolic_vertex_events, 0);
    }

    #[test]
    fn convex_mesh_modes_agree() {
        let m = fixtures::tetrahedron();
        for r in [0.5, 1.5, 3.0] {
            let a = build_git(&m, centroid(1), r, Mode::Complete).unwrap();
            let b = build_git(&m, centroid(1), r, Mode::Reduced).unwrap();
            assert_eq!(a.len(), b.len());
            assert_eq!(a.stats.hyperbolic_vertex_events, 0);
        }
    }

    #[test]
    fn full_extent_splits_at_apex() {
        let w = Vec2::new(0.3, 0.8);
        let l = 1.0;
        let (l1, l2) = ((w - Vec2::new(l, 0.0)).norm(), w.norm());
        let (aw, wb) = split_cone(Vec2::new(0.6, -0.7), 0.0, l, l, w, l1, l2);
        assert_eq!(aw, Some((0.0, l1)));
        assert_eq!(wb, Some((0.0, l2)));
    }

    #[test]
    fn cone_projection_example() {
        // far edge from (0,0) to (0.5,1); intersections at (1/18,1/9) and (1/3,2/3)
        let w = Vec2::new(0.5, 1.0);
        let (l1, l2) = ((w - Vec2::new(1.0, 0.0)).norm(), w.norm());
        let (aw, wb) = split_cone(Vec2::new(0.5, -1.0), 0.1, 0.4, 1.0, w, l1, l2);
        assert_eq!(aw, None);
        let (lo, hi) = wb.unwrap();
        // parameters on w → b; distances from (0,0) are l2 − param
        let s5 = 5f64.sqrt();
        assert!((l2 - hi - s5 / 18.0).abs() < 1e-12);
        assert!((l2 - lo - s5 / 3.0).abs() < 1e-12);
        // independent check: intersect the lines by hand
        let p = Vec2::new(1.0 / 18.0, 1.0 / 9.0);
        assert!((p.norm() - s5 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_edge_has_no_children() {
        let m = fixtures::flat_square();
        let t = build_git(&m, centroid(0), 10.0, Mode::Complete).unwrap();
        for (i, iv) in t.intervals.iter().enumerate() {
            if m.twin(iv.edge).is_none() {
                assert!(t.intervals.iter().all(|c| c.parent != Some(IntervalId(i as u32))));
            }
        }
    }

    #[test]
    fn equilateral_fan_pseudo_sources() {
        let m = fixtures::equilateral_fan();
        let v = fixtures::FAN_HUB;
        let h0 = m.fan(v).unwrap()[0];
        // start mid-sector of the first face, width π/2
        let all = make_pseudo_source_intervals(&m, v, PI / 6.0, PI / 2.0, 1.0, None, 0.0);
        // the range ends on a sector boundary: one more zero-width ray to the link vertex there
        assert_eq!(all.len(), 3);
        assert!(all[2].degenerate && all[2].starts_at_vertex);
        let out: Vec<_> = all.into_iter().filter(|p| !p.degenerate).collect();
        assert_eq!(out.len(), 2);
        assert!((out[0].interval.lo - 0.5).abs() < 1e-12);
        assert!((out[0].interval.hi - 1.0).abs() < 1e-12);
        assert!(!out[0].starts_at_vertex);
        assert_eq!(out[1].interval.lo, 0.0);
        assert!((out[1].interval.hi - 1.0).abs() < 1e-12);
        assert!(out[1].starts_at_vertex);
        assert_eq!(out[0].interval.edge, m.next(h0));
        for ps in &out {
            assert!(ps.interval.center.y > 0.0);
            assert!((ps.interval.center.norm() - 1.0).abs() < 1e-12 || ps.interval.center.dist(Vec2::new(1.0, 0.0)) > 0.0);
        }
    }

    #[test]
    fn fan_single_sector_and_full_sector() {
        let m = fixtures::equilateral_fan();
        let v = fixtures::FAN_HUB;
        let out = make_pseudo_source_intervals(&m, v, 0.1, 0.5, 0.0, None, 0.0);
        assert_eq!(out.len(), 1);
        let h0 = m.fan(v).unwrap()[0];
        let out = make_pseudo_source_intervals(&m, v, m.sector_start(h0), PI / 3.0, 0.0, None, 0.0);
        let out: Vec<_> = out.into_iter().filter(|p| !p.degenerate).collect();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].interval.lo, 0.0);
        assert!((out[0].interval.hi - 1.0).abs() < 1e-12);
        // width 2π/3 from a sector boundary spans three sectors with the
        // boundary rays included
        let out = make_pseudo_source_intervals(&m, v, PI / 3.0 + 0.2, 2.0 * PI / 3.0, 0.0, None, 0.0);
        assert_eq!(out.len(), 3);
        assert!(out[1..].iter().all(|p| p.starts_at_vertex));
    }

    #[test]
    fn reduced_range_examples() {
        let tau = 5.0 * PI / 2.0;
        let empty: CircularAngles<()> = CircularAngles::new(tau);
        let (s, w) = reduced_range(&empty, 0.0).unwrap();
        assert!((s - PI).abs() < 1e-12 && (w - PI / 2.0).abs() < 1e-12);

        let mut one = CircularAngles::new(tau);
        one.insert(0.0, ());
        let (s, w) = reduced_range(&one, 0.3).unwrap();
        assert!((s - 3.0 * PI / 2.0).abs() < 1e-12, "mu = {s}");
        assert!((w - 0.3).abs() < 1e-12);

        let mut two = CircularAngles::new(tau);
        two.insert(PI - 0.1, ());
        two.insert(PI + 0.1, ());
        assert_eq!(reduced_range(&two, PI), None);

        // exact duplicate direction
        assert_eq!(reduced_range(&one, 0.0), None);
    }

    #[test]
    fn complete_ratio_is_one() {
        let m = fixtures::dented_octahedron();
        let t = build_git(&m, centroid(5), 4.0, Mode::Complete).unwrap();
        assert!(t.stats.hyperbolic_vertex_events >= 1);
        assert_eq!(t.stats.propagating_ratio(), Some(1.0));
    }

    #[test]
    fn reduced_ratio_below_one() {
        let m = fixtures::dented_octahedron();
        let t = build_git(&m, centroid(5), 8.0, Mode::Reduced).unwrap();
        assert!(t.stats.hyperbolic_vertex_events >= 10);
        assert!(t.stats.propagating_ratio().unwrap() < 1.0);
        let c = build_git(&m, centroid(5), 8.0, Mode::Complete).unwrap();
        assert!(t.len() <= c.len());
    }

    #[test]
    fn event_cap_reports_radius() {
        let m = fixtures::coarse_torus();
        let cfg = BuildConfig {
            mode: Mode::Complete,
            event_cap: 50,
        };
        match build_git_with(&m, centroid(0), 100.0, cfg) {
            Err(BuildError::EventCap { events, reached_radius }) => {
                assert_eq!(events, 50);
                assert!(reached_radius > 0.0 && reached_radius < 100.0);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    fn reduced_ranges_disjoint(t: &GeodesicIntervalTree, m: &TriangleMesh) {
        for (v, rs) in t.ranges.iter().enumerate() {
            let tau = m.total_angle(VertexId(v as u32));
            for (i, a) in rs.iter().enumerate() {
                for b in &rs[i + 1..] {
                    // overlap length of two arcs on the circle
                    let d = forward_gap(a.start, b.start, tau);
                    let ov1 = (a.width - d).max(0.0);
                    let d2 = forward_gap(b.start, a.start, tau);
                    let ov2 = (b.width - d2).max(0.0);
                    assert!(ov1.max(ov2) <= 1e-9, "vertex {v}: {a:?} vs {b:?}");
                }
            }
        }
    }

    fn check_depths(t: &GeodesicIntervalTree) {
        for iv in &t.intervals {
            // depth = sum of primitive lengths along the root chain
            let mut cur = *iv;
            let mut sum = 0.0;
            loop {
                let Some(p) = cur.parent else { break };
                if cur.pseudo_source_root {
                    let parent = t.interval(p);
                    sum += parent.center.norm();
                }
                cur = *t.interval(p);
            }
            assert!((sum - iv.depth).abs() <= 1e-9 * iv.depth.max(1.0), "{sum} vs {}", iv.depth);
        }
    }

    fn random_face_point(m: &TriangleMesh, f: u32, a: f64, b: f64) -> SurfacePoint {
        let f = f % m.face_count() as u32;
        let (a, b) = (0.05 + 0.9 * a, 0.05 + 0.9 * b);
        let (u, w) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let bary = [1.0 - u - w, u, w];
        let bary = bary.map(|x: f64| x.max(0.01));
        let sum: f64 = bary.iter().sum();
        SurfacePoint::Face {
            face: FaceId(f),
            bary: bary.map(|x| x / sum),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reduced_ranges_are_disjoint(f in 0u32..64, a in 0.0f64..1.0, b in 0.0f64..1.0, r in 2.0f64..7.0) {
            for m in [fixtures::dented_octahedron(), fixtures::coarse_torus()] {
                let s = random_face_point(&m, f, a, b);
                let t = build_git(&m, s, r, Mode::Reduced).unwrap();
                reduced_ranges_disjoint(&t, &m);
                check_depths(&t);
            }
        }

        #[test]
        fn depth_bookkeeping_complete(f in 0u32..64, a in 0.0f64..1.0, b in 0.0f64..1.0, r in 1.0f64..5.0) {
            let m = fixtures::dented_octahedron();
            let s = random_face_point(&m, f, a, b);
            let t = build_git(&m, s, r, Mode::Complete).unwrap();
            check_depths(&t);
            for iv in &t.intervals {
                prop_assert!(iv.lo < iv.hi);
                prop_assert!(iv.lo >= 0.0 && iv.hi <= m.he_len(iv.edge));
                prop_assert!(iv.center.y > 0.0);
            }
        }

        #[test]
        fn every_saddle_event_propagates_in_complete_mode(f in 0u32..48, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let m = fixtures::coarse_torus();
            let s = random_face_point(&m, f, a, b);
            let t = build_git(&m, s, 5.0, Mode::Complete).unwrap();
            prop_assert_eq!(t.stats.propagating_vertex_events, t.stats.hyperbolic_vertex_events);
        }
    }

    #[test]
    fn arrival_times_nondecreasing() {
        let m = fixtures::coarse_torus();
        let t = build_git(&m, centroid(3), 6.0, Mode::Reduced).unwrap();
        for list in &t.arrivals {
            for w in list.windows(2) {
                assert!(w[0].time <= w[1].time);
            }
        }
        let _ = EdgeId(0);
    }
}
