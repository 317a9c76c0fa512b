use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn geodenum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geodenum")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = geodenum(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    geodenum(args).status.code().unwrap()
}

fn fixture(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let p = dir.path().join(format!("{name}.obj"));
    let mut args = vec!["fixture", name, "-o", p.to_str().unwrap()];
    args.extend_from_slice(extra);
    ok(&args);
    p
}

fn build(mesh: &Path, source: &str, radius: &str, mode: &str, out: &Path) -> String {
    ok(&[
        "build",
        "--mesh",
        mesh.to_str().unwrap(),
        "--source",
        source,
        "--radius",
        radius,
        "--mode",
        mode,
        "-o",
        out.to_str().unwrap(),
    ])
}

fn stat(stats: &str, key: &str) -> u64 {
    stats
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {stats}"))
        .parse()
        .unwrap()
}

#[test]
fn flat_square_same_face_query() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "flat-square", &[]);
    let tree = d.path().join("sq.tree");
    build(&mesh, "face:0:0.6,0.2,0.2", "3", "reduced", &tree);
    let out = ok(&["query", "--tree", tree.to_str().unwrap(), "--target", "face:0:0.2,0.6,0.2"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 1);
    assert_eq!(v["geodesics"][0]["points"].as_array().unwrap().len(), 2);

    let g: Value = serde_json::from_str(&ok(&["graph", "--tree", tree.to_str().unwrap(), "--target", "face:0:0.2,0.6,0.2"])).unwrap();
    assert_eq!(g["nodes"].as_array().unwrap().len(), 2);
    assert_eq!(g["edges"].as_array().unwrap().len(), 1);
    assert!(g.get("paths").is_none());
}

#[test]
fn target_beyond_radius_is_empty_success() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "flat-square", &[]);
    let tree = d.path().join("sq.tree");
    build(&mesh, "vertex:1", "0.5", "reduced", &tree);
    let out = geodenum(&["query", "--tree", tree.to_str().unwrap(), "--target", "vertex:3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 0);
    assert!(v["geodesics"].as_array().unwrap().is_empty());

    let g: Value = serde_json::from_str(&ok(&["graph", "--tree", tree.to_str().unwrap(), "--target", "vertex:3"])).unwrap();
    assert_eq!(g["nodes"], serde_json::json!(["s", "t"]));
    assert!(g["edges"].as_array().unwrap().is_empty());
}

#[test]
fn cube_corners_sorted() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "cube", &[]);
    let tree = d.path().join("c.tree");
    build(&mesh, "vertex:0", "2.3", "complete", &tree);
    let v: Value = serde_json::from_str(&ok(&["query", "--tree", tree.to_str().unwrap(), "--target", "vertex:7"])).unwrap();
    let gs = v["geodesics"].as_array().unwrap();
    assert_eq!(gs.len(), 6);
    let key = |g: &Value| -> Vec<f64> {
        let mut k = vec![g["length"].as_f64().unwrap()];
        k.extend(g["points"].as_array().unwrap().iter().flat_map(|p| p.as_array().unwrap().iter().map(|x| x.as_f64().unwrap())));
        k
    };
    for w in gs.windows(2) {
        assert!(key(&w[0]) <= key(&w[1]));
    }
    for g in gs {
        assert!((g["length"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9 * 5f64.sqrt());
    }
}

#[test]
fn convex_build_reports_no_hyperbolic_events() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "tetrahedron", &[]);
    let stats = build(&mesh, "face:0:0.33,0.33,0.34", "5", "reduced", &d.path().join("t.tree"));
    assert_eq!(stat(&stats, "hyperbolic_vertex_events"), 0);
    assert!(stat(&stats, "intervals") > 0);
}

#[test]
fn reduced_tree_not_larger_on_dented_octahedron() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "dented-octahedron", &[]);
    let c = build(&mesh, "face:3:0.2,0.3,0.5", "6", "complete", &d.path().join("c.tree"));
    let r = build(&mesh, "face:3:0.2,0.3,0.5", "6", "reduced", &d.path().join("r.tree"));
    assert!(stat(&r, "intervals") <= stat(&c, "intervals"));
}

#[test]
fn builds_and_queries_are_byte_identical() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "torus", &[]);
    let (a, b) = (d.path().join("a.tree"), d.path().join("b.tree"));
    build(&mesh, "face:7:0.2,0.3,0.5", "7", "reduced", &a);
    build(&mesh, "face:7:0.2,0.3,0.5", "7", "reduced", &b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    for fmt in ["json", "obj", "csv"] {
        let q = |t: &Path| ok(&["query", "--tree", t.to_str().unwrap(), "--target", "vertex:20", "--format", fmt]);
        assert_eq!(q(&a), q(&b));
    }
}

#[test]
fn torus_graph_expansion_matches_query() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "torus", &[]);
    let tree = d.path().join("t.tree");
    build(&mesh, "face:7:0.2,0.3,0.5", "8", "reduced", &tree);
    let target = "face:60:0.5,0.25,0.25";
    let q: Value = serde_json::from_str(&ok(&["query", "--tree", tree.to_str().unwrap(), "--target", target])).unwrap();
    let g: Value = serde_json::from_str(&ok(&["graph", "--tree", tree.to_str().unwrap(), "--target", target, "--expand"])).unwrap();
    let qs = q["geodesics"].as_array().unwrap();
    let ps = g["paths"].as_array().unwrap();
    assert!(qs.len() > 1);
    assert_eq!(qs.len(), ps.len());
    for (a, b) in qs.iter().zip(ps) {
        assert!((a["length"].as_f64().unwrap() - b["length"].as_f64().unwrap()).abs() < 1e-9);
        assert_eq!(a["points"].as_array().unwrap().len(), b["points"].as_array().unwrap().len());
    }
}

#[test]
fn other_formats() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "cube", &[]);
    let tree = d.path().join("c.tree");
    build(&mesh, "vertex:0", "2.3", "reduced", &tree);
    let obj = ok(&["query", "--tree", tree.to_str().unwrap(), "--target", "vertex:7", "--format", "obj"]);
    assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 6);
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 18);
    let csv = ok(&["query", "--tree", tree.to_str().unwrap(), "--target", "vertex:7", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("geodesic,length,point,x,y,z,loc,id"));
    assert_eq!(lines.count(), 18);
}

#[test]
fn checkpoints_and_budget() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "torus", &[]);
    let tree = d.path().join("t.tree");
    let cp = d.path().join("cp.csv");
    let m = mesh.to_str().unwrap();
    ok(&[
        "build", "--mesh", m, "--source", "vertex:0", "--radius", "6", "-o", tree.to_str().unwrap(),
        "--checkpoint-every", "0", "--checkpoint-csv", cp.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&cp).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["elapsed_seconds", "reached_radius", "intervals"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    let radii: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(radii.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(*radii.last().unwrap(), 6.0);

    let out = ok(&["build", "--mesh", m, "--source", "vertex:0", "--radius", "1e9", "-o", tree.to_str().unwrap(), "--budget", "0"]);
    assert!(out.contains("stopped_by_budget: true"));
}

#[test]
fn bench_csv_columns_and_convex_modes_agree() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "cube", &[]);
    let out = ok(&["bench", "--mesh", mesh.to_str().unwrap(), "--source", "vertex:0", "--radii", "1,2,3,4"]);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let h: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        h,
        [
            "radius", "radius_normalized", "mode", "intervals", "build_seconds", "events",
            "hyperbolic_vertex_events", "propagating_vertex_events", "memory_bytes", "dlogn_dlogr", "capped",
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for i in 0..4 {
        assert_eq!(&rows[i][2], "complete");
        assert_eq!(&rows[i + 4][2], "reduced");
        assert_eq!(rows[i][3], rows[i + 4][3]);
    }
    assert!(rows[0][9].is_empty() && !rows[1][9].is_empty());
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "dented-octahedron", &[]);
    let m = mesh.to_str().unwrap();
    let tree = d.path().join("c.tree");
    let t = tree.to_str().unwrap();
    build(&mesh, "vertex:1", "3", "complete", &tree);

    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["query", "--tree", t]), 1);
    assert_eq!(code(&["--help"]), 0);

    let g = geodenum(&["graph", "--tree", t, "--target", "vertex:2"]);
    assert_eq!(g.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&g.stderr).contains("graph requires reduced mode"));
    assert_eq!(code(&["query", "--tree", t, "--target", "vertex:99"]), 2);
    assert_eq!(code(&["query", "--tree", t, "--target", "corner:1"]), 2);
    assert_eq!(code(&["query", "--tree", m, "--target", "vertex:1"]), 2);
    let quad = d.path().join("quad.obj");
    std::fs::write(&quad, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
    assert_eq!(code(&["build", "--mesh", quad.to_str().unwrap(), "--source", "vertex:0", "--radius", "1", "-o", t]), 2);
    assert_eq!(code(&["build", "--mesh", m, "--source", "vertex:1", "--radius=-1", "-o", t]), 2);
    assert_eq!(code(&["build", "--mesh", m, "--source", "vertex:1", "--radius", "40", "--mode", "complete", "--event-cap", "500", "-o", t]), 3);
}

#[test]
fn hidden_oracle_matches_query() {
    let d = TempDir::new().unwrap();
    let mesh = fixture(&d, "cube", &[]);
    let v: Value = serde_json::from_str(&ok(&[
        "oracle", "--mesh", mesh.to_str().unwrap(), "--source", "vertex:0", "--target", "vertex:7", "--radius", "2.3",
    ]))
    .unwrap();
    assert_eq!(v["count"], 6);
}
