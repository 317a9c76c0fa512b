use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use geodenum::bench::{self, TimedBuildOptions};
use geodenum::obj;
use geodenum::output::{self, GeodesicsDoc, GraphDoc};
use geodenum::point_spec::PointSpec;
use geodenum::tree_file;
use geodenum_core::fixtures;
use geodenum_core::mesh::TriangleMesh;
use geodenum_core::oracle::{self, OracleError};
use geodenum_core::propagation::{BuildConfig, BuildError, Mode};
use geodenum_core::query::{self, QueryConfig, QueryError};

/// Enumerate every geodesic shorter than a radius between two points of a triangle mesh.
#[derive(Parser)]
#[command(name = "geodenum", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Complete,
    Reduced,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Complete => Mode::Complete,
            ModeArg::Reduced => Mode::Reduced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Obj,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    FlatSquare,
    FlatGrid,
    Tetrahedron,
    Cube,
    DentedOctahedron,
    EquilateralFan,
    Torus,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a geodesic interval tree and write it as a tree file.
    Build {
        #[arg(long)]
        mesh: PathBuf,
        /// vertex:ID, edge:ID:U or face:ID:B0,B1,B2
        #[arg(long)]
        source: String,
        #[arg(long)]
        radius: f64,
        /// Read the radius in mean edge lengths.
        #[arg(long)]
        normalized: bool,
        #[arg(long, value_enum, default_value = "reduced")]
        mode: ModeArg,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = BuildConfig::DEFAULT_EVENT_CAP)]
        event_cap: u64,
        /// Sample (elapsed, reached radius, intervals) every SECONDS.
        #[arg(long, value_name = "SECONDS")]
        checkpoint_every: Option<f64>,
        /// Checkpoint CSV path; defaults to OUT with `.checkpoints.csv` appended.
        #[arg(long)]
        checkpoint_csv: Option<PathBuf>,
        /// Stop after SECONDS and keep the radius reached so far.
        #[arg(long, value_name = "SECONDS")]
        budget: Option<f64>,
    },
    /// Enumerate geodesics from the tree's source to a target.
    Query {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = QueryConfig::default().path_cap)]
        path_cap: usize,
    },
    /// Build the single-pair geodesic graph (reduced trees only).
    Graph {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        target: String,
        /// Also list every source-to-target path of the graph.
        #[arg(long)]
        expand: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = QueryConfig::default().path_cap)]
        path_cap: usize,
    },
    /// Sweep radii and report growth curves as CSV.
    Bench {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        source: String,
        /// Comma-separated radii, increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long)]
        normalized: bool,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "complete,reduced")]
        modes: Vec<ModeArg>,
        #[arg(long, default_value_t = BuildConfig::DEFAULT_EVENT_CAP)]
        event_cap: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write a built-in test mesh as OBJ.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        /// Torus ring segments or grid columns.
        #[arg(long, default_value_t = 8)]
        major: usize,
        /// Torus tube segments or grid rows.
        #[arg(long, default_value_t = 6)]
        minor: usize,
        #[arg(long, default_value_t = 3.0)]
        major_radius: f64,
        #[arg(long, default_value_t = 1.0)]
        minor_radius: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Brute-force enumeration for cross-checking small meshes.
    #[command(hide = true)]
    Oracle {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = oracle::DEFAULT_VISIT_CAP)]
        visit_cap: u64,
    },
}

struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn input(err: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, err: err.into() }
    }

    fn cap(err: impl Into<anyhow::Error>) -> Self {
        Failure { code: 3, err: err.into() }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::EventCap { .. } => Failure::cap(e),
            e => Failure::input(e),
        }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::DepthCap(_) | QueryError::PathCap(_) => Failure::cap(e),
            e => Failure::input(e),
        }
    }
}

type Res<T = ()> = Result<T, Failure>;

fn spec(s: &str) -> Res<PointSpec> {
    s.parse().map_err(Failure::input)
}

fn read_mesh(path: &Path) -> Res<TriangleMesh> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::input)?;
    obj::load_mesh(&text).with_context(|| format!("loading {}", path.display())).map_err(Failure::input)
}

fn read_tree(path: &Path) -> Res<(TriangleMesh, geodenum_core::propagation::GeodesicIntervalTree)> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display())).map_err(Failure::input)?;
    tree_file::read_tree(f).with_context(|| format!("reading {}", path.display())).map_err(Failure::input)
}

fn emit(out: Option<&Path>, text: &str) -> Res {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::input),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(Failure::input)
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

fn seconds(arg: Option<f64>, name: &str) -> Res<Option<Duration>> {
    arg.map(|s| Duration::try_from_secs_f64(s).map_err(|_| Failure::input(anyhow!("--{name} must be a non-negative number of seconds"))))
        .transpose()
}

fn run(cli: Cli) -> Res {
    match cli.cmd {
        Cmd::Build {
            mesh,
            source,
            radius,
            normalized,
            mode,
            out,
            event_cap,
            checkpoint_every,
            checkpoint_csv,
            budget,
        } => {
            let source = spec(&source)?;
            let m = read_mesh(&mesh)?;
            let r = if normalized { radius * m.mean_edge_length() } else { radius };
            let opts = TimedBuildOptions {
                checkpoint_every: seconds(checkpoint_every, "checkpoint-every")?,
                budget: seconds(budget, "budget")?,
            };
            let config = BuildConfig {
                mode: mode.into(),
                event_cap,
            };
            let b = bench::timed_build(&m, source.0, r, config, opts)?;
            let f = fs::File::create(&out).with_context(|| format!("creating {}", out.display())).map_err(Failure::input)?;
            tree_file::write_tree(f, &m, &b.tree).map_err(Failure::input)?;
            if opts.checkpoint_every.is_some() {
                let path = checkpoint_csv.unwrap_or_else(|| {
                    let mut p = out.clone().into_os_string();
                    p.push(".checkpoints.csv");
                    p.into()
                });
                let csv = bench::checkpoints_csv(&b.checkpoints).map_err(Failure::input)?;
                emit(Some(&path), &csv)?;
            }
            let st = &b.tree.stats;
            let mel = m.mean_edge_length();
            let text = format!(
                "intervals: {}\nedge_events: {}\nvertex_events: {}\nhyperbolic_vertex_events: {}\npropagating_vertex_events: {}\nmax_queue: {}\nradius: {:?}\nradius_normalized: {:?}\narena_bytes: {}\nstopped_by_budget: {}\nbuild_seconds: {:.6}\n",
                st.intervals,
                st.edge_events,
                st.vertex_events,
                st.hyperbolic_vertex_events,
                st.propagating_vertex_events,
                st.max_queue,
                b.tree.radius,
                b.tree.radius / mel,
                st.arena_bytes,
                b.stopped_by_budget,
                b.seconds,
            );
            emit(None, &text)
        }
        Cmd::Query {
            tree,
            target,
            format,
            out,
            path_cap,
        } => {
            let target = spec(&target)?;
            let (m, t) = read_tree(&tree)?;
            let paths = match t.mode {
                Mode::Complete => query::enum_complete(&m, &t, target.0)?,
                Mode::Reduced => {
                    let config = QueryConfig {
                        path_cap,
                        ..QueryConfig::default()
                    };
                    query::enum_reduced_with(&m, &t, target.0, config)?
                }
            };
            let text = match format {
                Format::Json => to_json(&GeodesicsDoc::new(
                    t.mode,
                    PointSpec(t.source).to_string(),
                    target.to_string(),
                    t.radius,
                    &paths,
                )),
                Format::Obj => output::geodesics_obj(&paths),
                Format::Csv => output::geodesics_csv(&paths).map_err(Failure::input)?,
            };
            emit(out.as_deref(), &text)
        }
        Cmd::Graph {
            tree,
            target,
            expand,
            out,
            path_cap,
        } => {
            let target = spec(&target)?;
            let (m, t) = read_tree(&tree)?;
            let g = query::build_geodesic_graph(&m, &t, target.0)?;
            let paths = if expand {
                Some(query::paths_of_graph(&m, &g, t.radius, path_cap)?)
            } else {
                None
            };
            let doc = GraphDoc::new(PointSpec(t.source).to_string(), target.to_string(), t.radius, &g, paths.as_deref());
            emit(out.as_deref(), &to_json(&doc))
        }
        Cmd::Bench {
            mesh,
            source,
            radii,
            normalized,
            modes,
            event_cap,
            out,
        } => {
            let source = spec(&source)?;
            let m = read_mesh(&mesh)?;
            let scale = if normalized { m.mean_edge_length() } else { 1.0 };
            let radii: Vec<f64> = radii.iter().map(|r| r * scale).collect();
            let modes: Vec<Mode> = modes.into_iter().map(Mode::from).collect();
            let rows = bench::sweep(&m, source.0, &radii, &modes, event_cap)?;
            let csv = bench::bench_csv(&rows).map_err(Failure::input)?;
            emit(out.as_deref(), &csv)
        }
        Cmd::Fixture {
            name,
            major,
            minor,
            major_radius,
            minor_radius,
            out,
        } => {
            let m = match name {
                FixtureName::FlatSquare => fixtures::flat_square(),
                FixtureName::FlatGrid => fixtures::flat_grid(major, minor),
                FixtureName::Tetrahedron => fixtures::tetrahedron(),
                FixtureName::Cube => fixtures::cube(),
                FixtureName::DentedOctahedron => fixtures::dented_octahedron(),
                FixtureName::EquilateralFan => fixtures::equilateral_fan(),
                FixtureName::Torus => {
                    if major < 3 || minor < 3 || !(minor_radius > 0.0 && major_radius > minor_radius) {
                        return Err(Failure::input(anyhow!("torus needs >= 3 segments each way and major radius > minor radius > 0")));
                    }
                    fixtures::torus(major, minor, major_radius, minor_radius)
                }
            };
            emit(out.as_deref(), &obj::emit_mesh(&m))
        }
        Cmd::Oracle {
            mesh,
            source,
            target,
            radius,
            visit_cap,
        } => {
            let (source, target) = (spec(&source)?, spec(&target)?);
            let m = read_mesh(&mesh)?;
            let paths = oracle::exhaustive_enumerate_with(&m, source.0, target.0, radius, visit_cap).map_err(|e| match e {
                OracleError::VisitCap(_) => Failure::cap(e),
                e => Failure::input(e),
            })?;
            let doc = GeodesicsDoc::new(Mode::Complete, source.to_string(), target.to_string(), radius, &paths);
            emit(None, &to_json(&doc))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            // thiserror sources often repeat inside their parent's message
            let mut msg = String::new();
            for part in f.err.chain().map(|e| e.to_string()) {
                if !msg.ends_with(&part) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&part);
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(f.code)
        }
    }
}
