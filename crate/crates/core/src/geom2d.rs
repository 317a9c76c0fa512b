//! Planar geometry in half-edge frames.
//!
//! Every half-edge `h` carries a local frame: origin at its start vertex, `+x`
//! along `h`, `+y` into the face on its left. Points are [`Vec2`]s used like
//! complex numbers, so a change of frame is one multiplication by a unit
//! vector plus a translation ([`RigidMotion2`]).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Bound, Mul, Neg, Sub};

use crate::math::{atan2, cos, hypot, sin, wrap};
use crate::mesh::{FaceId, HalfEdgeId, TriangleMesh, VertexId};
use crate::EPS_ANGLE;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(cos(theta), sin(theta))
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn angle(self) -> f64 {
        atan2(self.y, self.x)
    }

    /// Complex multiplication.
    #[inline]
    pub fn cmul(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x * o.x - self.y * o.y, self.x * o.y + self.y * o.x)
    }

    #[inline]
    pub fn conj(self) -> Vec2 {
        Vec2::new(self.x, -self.y)
    }

    #[inline]
    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    #[inline]
    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Rotation followed by translation: `p ↦ rot · p + trans` with `rot` a unit complex number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion2 {
    pub rot: Vec2,
    pub trans: Vec2,
}

impl RigidMotion2 {
    pub const IDENTITY: RigidMotion2 = RigidMotion2 {
        rot: Vec2 { x: 1.0, y: 0.0 },
        trans: Vec2 { x: 0.0, y: 0.0 },
    };

    pub fn new(theta: f64, trans: Vec2) -> Self {
        RigidMotion2 {
            rot: Vec2::from_angle(theta),
            trans,
        }
    }

    pub fn angle(&self) -> f64 {
        self.rot.angle()
    }

    #[inline]
    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.rot.cmul(p) + self.trans
    }

    /// Applies only the rotation (for direction vectors).
    #[inline]
    pub fn apply_dir(&self, d: Vec2) -> Vec2 {
        self.rot.cmul(d)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &RigidMotion2) -> RigidMotion2 {
        RigidMotion2 {
            rot: self.rot.cmul(first.rot),
            trans: self.rot.cmul(first.trans) + self.trans,
        }
    }

    pub fn inverse(&self) -> RigidMotion2 {
        let r = self.rot.conj();
        RigidMotion2 {
            rot: r,
            trans: -(r.cmul(self.trans)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Geom2dError {
    #[error("half-edge {0:?} lies on the boundary and has no twin")]
    BoundaryHalfEdge(HalfEdgeId),
    #[error("projection requires center below the edge and the point above it")]
    BadProjection,
    #[error("face {face:?} is not incident to vertex {vertex:?}")]
    NotIncident { vertex: VertexId, face: FaceId },
    #[error("direction lies outside the sector of face {face:?} at vertex {vertex:?}")]
    OutsideSector { vertex: VertexId, face: FaceId },
    #[error("direction vector is zero")]
    ZeroDirection,
}

/// Motion taking coordinates in `h`'s frame to coordinates in `twin(h)`'s
/// frame with the two faces developed into one plane: `(x, y) ↦ (L − x, −y)`.
pub fn unfold_across(mesh: &TriangleMesh, h: HalfEdgeId) -> Result<RigidMotion2, Geom2dError> {
    if mesh.twin(h).is_none() {
        return Err(Geom2dError::BoundaryHalfEdge(h));
    }
    Ok(RigidMotion2 {
        rot: Vec2::new(-1.0, 0.0),
        trans: Vec2::new(mesh.he_len(h), 0.0),
    })
}

/// Where the segment from `center` (below the edge) to `p` (above it) crosses `y = 0`.
pub fn project_on_edge(center: Vec2, p: Vec2) -> Result<f64, Geom2dError> {
    if !(center.y < 0.0) || !(p.y > 0.0) {
        return Err(Geom2dError::BadProjection);
    }
    Ok(line_axis_crossing(center, p))
}

/// x-coordinate where the line through `a` and `b` meets `y = 0`. Caller
/// guarantees `a.y != b.y`.
#[inline]
pub fn line_axis_crossing(a: Vec2, b: Vec2) -> f64 {
    let t = a.y / (a.y - b.y);
    a.x + (b.x - a.x) * t
}

/// Cumulative angle at `v` of direction `dir` (given in the face layout of
/// `f`), measured counterclockwise from the reference half-edge `e_v`.
///
/// The result is reduced modulo `τ(v)` for interior vertices.
pub fn direction_angle_at_vertex(
    mesh: &TriangleMesh,
    v: VertexId,
    f: FaceId,
    dir: Vec2,
) -> Result<f64, Geom2dError> {
    let h = mesh
        .corner_half_edge(f, v)
        .ok_or(Geom2dError::NotIncident { vertex: v, face: f })?;
    let local = mesh.layout_to_frame(h).apply_dir(dir);
    direction_angle_in_frame(mesh, h, local)
}

/// Same as [`direction_angle_at_vertex`] with `dir` expressed in the frame of
/// the outgoing half-edge `h` (origin `v`).
pub fn direction_angle_in_frame(mesh: &TriangleMesh, h: HalfEdgeId, dir: Vec2) -> Result<f64, Geom2dError> {
    if dir.x == 0.0 && dir.y == 0.0 {
        return Err(Geom2dError::ZeroDirection);
    }
    let v = mesh.origin(h);
    let theta = mesh.corner_angle(h);
    let mut phi = dir.angle();
    // directions just below the x axis wrap to ≈ -0
    if phi < -EPS_ANGLE || phi > theta + EPS_ANGLE {
        return Err(Geom2dError::OutsideSector {
            vertex: v,
            face: mesh.face_of(h),
        });
    }
    phi = phi.clamp(0.0, theta);
    let tau = mesh.total_angle(v);
    let a = mesh.sector_start(h) + phi;
    Ok(if mesh.is_boundary_vertex(v) { a } else { wrap(a, tau) })
}

/// Which side of the center a window query looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct AngleKey(f64);

impl Eq for AngleKey {}

impl PartialOrd for AngleKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AngleKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Ordered set of angles on a circle of circumference `tau`, each carrying a value.
#[derive(Clone, Debug)]
pub struct CircularAngles<V> {
    tau: f64,
    map: BTreeMap<(AngleKey, u32), V>,
    seq: u32,
}

impl<V> CircularAngles<V> {
    pub fn new(tau: f64) -> Self {
        CircularAngles {
            tau,
            map: BTreeMap::new(),
            seq: 0,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn insert(&mut self, angle: f64, value: V) {
        let a = wrap(angle, self.tau);
        self.map.insert((AngleKey(a), self.seq), value);
        self.seq += 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &V)> {
        self.map.iter().map(|((k, _), v)| (k.0, v))
    }

    /// Pieces of the arc `[a, a + len]` clipped to `[0, tau)`, in arc order.
    fn pieces(&self, a: f64, len: f64) -> ([(f64, f64); 2], usize) {
        let s = wrap(a, self.tau);
        if s + len <= self.tau {
            ([(s, s + len), (0.0, 0.0)], 1)
        } else {
            ([(s, self.tau), (0.0, s + len - self.tau)], 2)
        }
    }

    fn range(&self, lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> impl DoubleEndedIterator<Item = (f64, &V)> {
        let lo_b = if lo_open {
            Bound::Excluded((AngleKey(lo), u32::MAX))
        } else {
            Bound::Included((AngleKey(lo), 0))
        };
        let hi_b = if hi_open {
            Bound::Excluded((AngleKey(hi), 0))
        } else {
            Bound::Included((AngleKey(hi), u32::MAX))
        };
        let valid = lo < hi || (lo == hi && !lo_open && !hi_open);
        let iter = if valid { Some(self.map.range((lo_b, hi_b))) } else { None };
        iter.into_iter().flatten().map(|((k, _), v)| (k.0, v))
    }

    /// Elements of the open arc `(a, a + len)` shrunk by `EPS_ANGLE` at both ends, in arc order.
    pub fn open_arc(&self, a: f64, len: f64) -> Vec<(f64, &V)> {
        let inner = len - 2.0 * EPS_ANGLE;
        if inner <= 0.0 {
            return Vec::new();
        }
        let (p, n) = self.pieces(a + EPS_ANGLE, inner);
        let mut out = Vec::new();
        for (i, &(lo, hi)) in p[..n].iter().enumerate() {
            // the wrapped piece starts at 0, which lies inside the arc
            out.extend(self.range(lo, hi, i == 0, true));
        }
        out
    }

    /// Elements of the closed arc `[a, a + len]` widened by `EPS_ANGLE` at both ends, in arc order.
    pub fn closed_arc(&self, a: f64, len: f64) -> Vec<(f64, &V)> {
        let outer = len + 2.0 * EPS_ANGLE;
        if outer >= self.tau {
            return self.iter().collect();
        }
        let (p, n) = self.pieces(a - EPS_ANGLE, outer);
        let mut out = Vec::new();
        for &(lo, hi) in &p[..n] {
            let hi_open = n == 2 && hi == self.tau;
            out.extend(self.range(lo, hi, false, hi_open));
        }
        out
    }
}

/// Nearest element of `set` in the open circular window `(center − w, center)`
/// (`Side::Below`, returns the largest) or `(center, center + w)`
/// (`Side::Above`, returns the smallest).
pub fn circular_window_query<V>(set: &CircularAngles<V>, center: f64, w: f64, side: Side) -> Option<(f64, &V)> {
    match side {
        Side::Below => set.open_arc(center - w, w).into_iter().last(),
        Side::Above => set.open_arc(center, w).into_iter().next(),
    }
}

/// True when `x` lies within the closed circular arc `[a, a + len]` (with `EPS_ANGLE` slack).
pub fn in_closed_arc(x: f64, a: f64, len: f64, tau: f64) -> bool {
    let off = wrap(x - a, tau);
    off <= len + EPS_ANGLE || off >= tau - EPS_ANGLE
}

/// Circular distance from `a` forward to `b`, in `[0, tau)`.
#[inline]
pub fn forward_gap(a: f64, b: f64, tau: f64) -> f64 {
    wrap(b - a, tau)
}
