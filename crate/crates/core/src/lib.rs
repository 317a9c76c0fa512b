//! Exact enumeration of all geodesics of bounded length on a triangulated surface.
//!
//! Given a source point `s` on an orientable triangle mesh and a radius `R`,
//! [`propagation::build_git`] grows a *geodesic interval tree* by
//! event-driven interval propagation (continuous Dijkstra without trimming).
//! The finished tree answers, for any target `t`, the query "every locally
//! shortest path from `s` to `t` shorter than `R`" ([`query`]), and can also
//! emit the answer as a compact single-pair geodesic graph.
//!
//! Two build modes exist. [`Mode::Complete`] spawns the full admissible fan of
//! pseudo-source intervals at every hyperbolic vertex arrival;
//! [`Mode::Reduced`] spawns only the part of that fan not already covered by
//! earlier arrivals at the same vertex, which keeps the tree much smaller on
//! non-convex meshes while the query recovers the same set of geodesics.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, OBJ parsing and the
//! command line live in the `geodenum` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod fixtures;
pub mod geom2d;
pub mod math;
pub mod mesh;
pub mod oracle;
pub mod path;
pub mod propagation;
pub mod query;

pub use geom2d::{RigidMotion2, Vec2};
pub use mesh::{EdgeId, FaceId, HalfEdgeId, MeshError, SurfacePoint, TriangleMesh, VertexClass, VertexId};
pub use path::{GeodesicPath, PathPoint, PointLoc};
pub use propagation::{
    build_git, BuildConfig, BuildError, BuildStats, GeodesicIntervalTree, Interval, IntervalId, Mode,
};
pub use query::{GeodesicGraph, GraphNode, PrimitiveGeodesic, QueryError};

/// Absolute tolerance for angle comparisons and vertex classification (radians).
pub const EPS_ANGLE: f64 = 1e-9;

/// Snap distance used when canonicalizing surface points.
pub const EPS_SNAP: f64 = 1e-9;

/// Pointwise tolerance under which two polylines are the same geodesic.
pub const EPS_PATH: f64 = 1e-9;
