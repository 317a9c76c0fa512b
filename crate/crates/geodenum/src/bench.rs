//! Timed builds, checkpoint time series and radius sweeps.

use std::time::{Duration, Instant};

use geodenum_core::mesh::{SurfacePoint, TriangleMesh};
use geodenum_core::propagation::{BuildConfig, BuildError, BuildStats, GeodesicIntervalTree, GitBuilder, Mode};

/// Events between clock reads.
const CLOCK_STRIDE: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub elapsed: f64,
    pub reached_radius: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TimedBuildOptions {
    pub checkpoint_every: Option<Duration>,
    /// Stop after this long; the tree radius becomes the reached radius.
    pub budget: Option<Duration>,
}

#[derive(Debug)]
pub struct TimedBuild {
    pub tree: GeodesicIntervalTree,
    pub seconds: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub stopped_by_budget: bool,
}

pub fn timed_build(
    mesh: &TriangleMesh,
    source: SurfacePoint,
    radius: f64,
    config: BuildConfig,
    opts: TimedBuildOptions,
) -> Result<TimedBuild, BuildError> {
    let start = Instant::now();
    let mut b = GitBuilder::new(mesh, source, radius, config)?;
    let mut checkpoints = Vec::new();
    let mut next_cp = opts.checkpoint_every;
    let mut stopped_by_budget = false;
    while b.run_for(CLOCK_STRIDE)? {
        let el = start.elapsed();
        if let (Some(every), Some(due)) = (opts.checkpoint_every, next_cp) {
            if el >= due {
                checkpoints.push(Checkpoint {
                    elapsed: el.as_secs_f64(),
                    reached_radius: b.reached_radius(),
                    intervals: b.interval_count(),
                });
                next_cp = Some(due + every);
            }
        }
        if opts.budget.is_some_and(|bud| el >= bud) {
            stopped_by_budget = true;
            break;
        }
    }
    let tree = b.finish();
    let seconds = start.elapsed().as_secs_f64();
    if opts.checkpoint_every.is_some() {
        checkpoints.push(Checkpoint {
            elapsed: seconds,
            reached_radius: tree.radius,
            intervals: tree.len(),
        });
    }
    Ok(TimedBuild {
        tree,
        seconds,
        checkpoints,
        stopped_by_budget,
    })
}

pub fn checkpoints_csv(cps: &[Checkpoint]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["elapsed_seconds", "reached_radius", "intervals"])?;
    for c in cps {
        w.write_record([format!("{:?}", c.elapsed), format!("{:?}", c.reached_radius), c.intervals.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ASCII CSV"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub radius: f64,
    /// Radius in mean edge lengths.
    pub radius_normalized: f64,
    pub mode: Mode,
    pub intervals: u64,
    pub build_seconds: f64,
    pub events: u64,
    pub hyperbolic_vertex_events: u64,
    pub propagating_vertex_events: u64,
    /// Arena bytes of the tree, not process memory.
    pub memory_bytes: u64,
    /// Δlog N / Δlog R against the previous row of the same mode.
    pub dlogn_dlogr: Option<f64>,
    /// The event cap stopped this build; later radii of this mode are skipped.
    pub capped: bool,
}

/// One build per `(mode, radius)` cell, radii in the given order.
pub fn sweep(mesh: &TriangleMesh, source: SurfacePoint, radii: &[f64], modes: &[Mode], event_cap: u64) -> Result<Vec<BenchRow>, BuildError> {
    let mut rows = Vec::new();
    for &mode in modes {
        let mut prev: Option<(f64, u64)> = None;
        for &r in radii {
            let config = BuildConfig { mode, event_cap };
            let start = Instant::now();
            let mut b = GitBuilder::new(mesh, source, r, config)?;
            let capped = match b.run() {
                Ok(()) => false,
                Err(BuildError::EventCap { .. }) => true,
                Err(e) => return Err(e),
            };
            let tree = b.finish();
            let secs = start.elapsed().as_secs_f64();
            let st: &BuildStats = &tree.stats;
            let n = st.intervals;
            let slope = match prev {
                Some((r0, n0)) if n0 > 0 && n > 0 && r > r0 => Some(((n as f64).ln() - (n0 as f64).ln()) / (r.ln() - r0.ln())),
                _ => None,
            };
            rows.push(BenchRow {
                radius: r,
                radius_normalized: r / mesh.mean_edge_length(),
                mode,
                intervals: n,
                build_seconds: secs,
                events: st.edge_events + st.vertex_events,
                hyperbolic_vertex_events: st.hyperbolic_vertex_events,
                propagating_vertex_events: st.propagating_vertex_events,
                memory_bytes: st.arena_bytes,
                dlogn_dlogr: slope,
                capped,
            });
            if capped {
                break;
            }
            prev = Some((r, n));
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "radius",
        "radius_normalized",
        "mode",
        "intervals",
        "build_seconds",
        "events",
        "hyperbolic_vertex_events",
        "propagating_vertex_events",
        "memory_bytes",
        "dlogn_dlogr",
        "capped",
    ])?;
    for r in rows {
        w.write_record([
            format!("{:?}", r.radius),
            format!("{:?}", r.radius_normalized),
            match r.mode {
                Mode::Complete => "complete".into(),
                Mode::Reduced => "reduced".into(),
            },
            r.intervals.to_string(),
            format!("{:.6}", r.build_seconds),
            r.events.to_string(),
            r.hyperbolic_vertex_events.to_string(),
            r.propagating_vertex_events.to_string(),
            r.memory_bytes.to_string(),
            r.dlogn_dlogr.map(|s| format!("{s:.6}")).unwrap_or_default(),
            r.capped.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ASCII CSV"))
}
