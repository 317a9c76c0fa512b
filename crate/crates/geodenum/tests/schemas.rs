use geodenum::output::{GeodesicsDoc, GraphDoc};
use geodenum::point_spec::PointSpec;
use geodenum::tree_file::tree_to_string;
use geodenum_core::fixtures;
use geodenum_core::mesh::FaceId;
use geodenum_core::propagation::{build_git, Mode};
use geodenum_core::query::{build_geodesic_graph, enum_complete, enum_reduced, paths_of_graph};
use serde_json::Value;

fn schema(name: &str) -> Value {
    let path = format!("{}/schemas/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn check(name: &str, doc: &Value) {
    let all: Vec<(String, Value)> = ["geodesics.schema.json", "graph.schema.json", "tree.schema.json"]
        .iter()
        .map(|n| {
            let s = schema(n);
            (s["$id"].as_str().unwrap().to_owned(), s)
        })
        .collect();
    let mut reg = jsonschema::Registry::new();
    for (id, s) in &all {
        reg = reg.add(id.as_str(), s).unwrap();
    }
    let reg = reg.prepare().unwrap();
    let root = schema(name);
    let v = jsonschema::options().with_registry(&reg).build(&root).unwrap();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn outputs_validate() {
    let m = fixtures::dented_octahedron();
    let s = m.face_centroid(FaceId(1));
    let t = m.face_centroid(FaceId(5));
    let src = PointSpec(s).to_string();
    let tgt = PointSpec(t).to_string();
    for mode in [Mode::Complete, Mode::Reduced] {
        let tree = build_git(&m, s, 5.0, mode).unwrap();
        let tv: Value = serde_json::from_str(&tree_to_string(&m, &tree)).unwrap();
        check("tree.schema.json", &tv);
        let paths = match mode {
            Mode::Complete => enum_complete(&m, &tree, t).unwrap(),
            Mode::Reduced => enum_reduced(&m, &tree, t).unwrap(),
        };
        assert!(!paths.is_empty());
        let doc = GeodesicsDoc::new(mode, src.clone(), tgt.clone(), tree.radius, &paths);
        check("geodesics.schema.json", &serde_json::to_value(&doc).unwrap());
        if mode == Mode::Reduced {
            let g = build_geodesic_graph(&m, &tree, t).unwrap();
            let expanded = paths_of_graph(&m, &g, tree.radius, 100_000).unwrap();
            for p in [None, Some(expanded.as_slice())] {
                let doc = GraphDoc::new(src.clone(), tgt.clone(), tree.radius, &g, p);
                check("graph.schema.json", &serde_json::to_value(&doc).unwrap());
            }
        }
    }
}

#[test]
fn schemas_reject_wrong_documents() {
    let m = fixtures::cube();
    let s = m.face_centroid(FaceId(0));
    let tree = build_git(&m, s, 2.0, Mode::Reduced).unwrap();
    let mut tv: Value = serde_json::from_str(&tree_to_string(&m, &tree)).unwrap();
    tv["version"] = 2.into();
    let root = schema("tree.schema.json");
    assert!(!jsonschema::is_valid(&root, &tv));
    let mut doc = serde_json::to_value(GeodesicsDoc::new(Mode::Reduced, "vertex:0".into(), "vertex:1".into(), 1.0, &[])).unwrap();
    assert!(jsonschema::is_valid(&schema("geodesics.schema.json"), &doc));
    doc["mode"] = "naive".into();
    assert!(!jsonschema::is_valid(&schema("geodesics.schema.json"), &doc));
}
